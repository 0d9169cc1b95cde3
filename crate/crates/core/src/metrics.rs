//! Confusion matrices, per-class precision/recall/F1 and macro-F1.
//!
//! Macro-F1 is the unweighted mean of per-class F1 over the classes that
//! actually occur in the gold labels; classes that only appear in predictions
//! still show up in the confusion matrix but contribute no F1 term.

use serde::Serialize;

use crate::error::{Error, Result};

/// K x K count matrix, rows = gold, columns = predicted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfusionMatrix {
    pub class_names: Vec<String>,
    /// Row-major counts, `counts[g * k + p]`.
    counts: Vec<u64>,
}

impl ConfusionMatrix {
    pub fn num_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn count(&self, gold: usize, pred: usize) -> u64 {
        self.counts[gold * self.num_classes() + pred]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    fn row_sum(&self, gold: usize) -> u64 {
        let k = self.num_classes();
        self.counts[gold * k..(gold + 1) * k].iter().sum()
    }

    fn col_sum(&self, pred: usize) -> u64 {
        let k = self.num_classes();
        (0..k).map(|g| self.counts[g * k + pred]).sum()
    }

    /// Rows of the matrix as a nested vec, for dumps and plotting.
    pub fn rows(&self) -> Vec<Vec<u64>> {
        let k = self.num_classes();
        (0..k)
            .map(|g| self.counts[g * k..(g + 1) * k].to_vec())
            .collect()
    }

    /// CSV dump: header row of predicted classes, then one row per gold class.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("gold");
        for name in &self.class_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        let k = self.num_classes();
        for g in 0..k {
            out.push_str(&self.class_names[g]);
            for p in 0..k {
                out.push_str(&format!(",{}", self.counts[g * k + p]));
            }
            out.push('\n');
        }
        out
    }
}

/// Precision/recall/F1 for one class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Number of gold examples of this class.
    pub support: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub confusion: ConfusionMatrix,
    pub per_class: Vec<ClassMetrics>,
    pub macro_f1: f64,
    pub accuracy: f64,
}

/// Count gold/pred pairs into a confusion matrix over `class_names`.
///
/// Errors on length mismatch, empty lists, or a label that is not one of
/// `class_names`.
pub fn confusion<G, P, N>(gold: &[G], pred: &[P], class_names: &[N]) -> Result<ConfusionMatrix>
where
    G: AsRef<str>,
    P: AsRef<str>,
    N: AsRef<str>,
{
    if gold.len() != pred.len() {
        return Err(Error::Shape(format!(
            "gold has {} labels but pred has {}",
            gold.len(),
            pred.len()
        )));
    }
    if gold.is_empty() {
        return Err(Error::Validation("cannot evaluate zero examples".into()));
    }
    let names: Vec<String> = class_names.iter().map(|n| n.as_ref().to_string()).collect();
    let index_of = |label: &str| -> Result<usize> {
        names
            .iter()
            .position(|n| n == label)
            .ok_or_else(|| Error::Validation(format!("label {label:?} is not a known class")))
    };
    let k = names.len();
    let mut counts = vec![0u64; k * k];
    for (g, p) in gold.iter().zip(pred.iter()) {
        let gi = index_of(g.as_ref())?;
        let pi = index_of(p.as_ref())?;
        counts[gi * k + pi] += 1;
    }
    Ok(ConfusionMatrix {
        class_names: names,
        counts,
    })
}

/// Confusion counts from class indices; the fast path used inside trainers.
pub fn confusion_from_indices(gold: &[usize], pred: &[usize], k: usize) -> Result<ConfusionMatrix> {
    if gold.len() != pred.len() {
        return Err(Error::Shape(format!(
            "gold has {} labels but pred has {}",
            gold.len(),
            pred.len()
        )));
    }
    if gold.is_empty() {
        return Err(Error::Validation("cannot evaluate zero examples".into()));
    }
    let mut counts = vec![0u64; k * k];
    for (&g, &p) in gold.iter().zip(pred.iter()) {
        if g >= k || p >= k {
            return Err(Error::Validation(format!(
                "label index out of range: gold={g} pred={p} k={k}"
            )));
        }
        counts[g * k + p] += 1;
    }
    Ok(ConfusionMatrix {
        class_names: (0..k).map(|i| i.to_string()).collect(),
        counts,
    })
}

fn per_class_metrics(cm: &ConfusionMatrix) -> Vec<ClassMetrics> {
    let k = cm.num_classes();
    (0..k)
        .map(|c| {
            let tp = cm.count(c, c) as f64;
            let col = cm.col_sum(c) as f64;
            let row = cm.row_sum(c) as f64;
            let precision = if col > 0.0 { tp / col } else { 0.0 };
            let recall = if row > 0.0 { tp / row } else { 0.0 };
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            ClassMetrics {
                precision,
                recall,
                f1,
                support: cm.row_sum(c),
            }
        })
        .collect()
}

/// Unweighted mean of per-class F1 over classes present in gold.
pub fn macro_f1(cm: &ConfusionMatrix) -> f64 {
    let metrics = per_class_metrics(cm);
    let mut sum = 0.0;
    let mut n = 0usize;
    for (c, m) in metrics.iter().enumerate() {
        if cm.row_sum(c) > 0 {
            sum += m.f1;
            n += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Macro-F1 straight from index label lists; convenience for trainers.
pub fn macro_f1_from_indices(gold: &[usize], pred: &[usize], k: usize) -> Result<f64> {
    Ok(macro_f1(&confusion_from_indices(gold, pred, k)?))
}

/// Full evaluation: confusion matrix, per-class metrics, macro-F1 and accuracy.
pub fn report<G, P, N>(gold: &[G], pred: &[P], class_names: &[N]) -> Result<EvalReport>
where
    G: AsRef<str>,
    P: AsRef<str>,
    N: AsRef<str>,
{
    let cm = confusion(gold, pred, class_names)?;
    Ok(report_from_confusion(cm))
}

pub fn report_from_confusion(cm: ConfusionMatrix) -> EvalReport {
    let per_class = per_class_metrics(&cm);
    let macro_f1 = macro_f1(&cm);
    let k = cm.num_classes();
    let trace: u64 = (0..k).map(|c| cm.count(c, c)).sum();
    let accuracy = trace as f64 / cm.total() as f64;
    EvalReport {
        confusion: cm,
        per_class,
        macro_f1,
        accuracy,
    }
}

impl EvalReport {
    /// Human-readable table.
    pub fn render_text(&self) -> String {
        let k = self.confusion.num_classes();
        let name_w = self
            .confusion
            .class_names
            .iter()
            .map(|n| n.len())
            .max()
            .unwrap_or(4)
            .max(4);
        let mut out = String::new();
        out.push_str(&format!("{:name_w$}  ", "g\\p"));
        for name in &self.confusion.class_names {
            out.push_str(&format!("{name:>8} "));
        }
        out.push('\n');
        for g in 0..k {
            out.push_str(&format!("{:name_w$}  ", self.confusion.class_names[g]));
            for p in 0..k {
                out.push_str(&format!("{:>8} ", self.confusion.count(g, p)));
            }
            out.push('\n');
        }
        out.push('\n');
        out.push_str(&format!(
            "{:name_w$}  {:>9} {:>9} {:>9} {:>9}\n",
            "class", "precision", "recall", "f1", "support"
        ));
        for (c, m) in self.per_class.iter().enumerate() {
            out.push_str(&format!(
                "{:name_w$}  {:>9.4} {:>9.4} {:>9.4} {:>9}\n",
                self.confusion.class_names[c], m.precision, m.recall, m.f1, m.support
            ));
        }
        out.push_str(&format!("\naccuracy  {:.4}\n", self.accuracy));
        out.push_str(&format!("macro-F1  {:.4}\n", self.macro_f1));
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_gold_rows_pred_columns() {
        let cm = confusion(&["NOT", "OFF"], &["NOT", "NOT"], &["NOT", "OFF"]).unwrap();
        assert_eq!(cm.rows(), vec![vec![1, 0], vec![1, 0]]);
    }

    #[test]
    fn equal_lists_give_diagonal() {
        let labels = ["a", "b", "b", "c", "a"];
        let cm = confusion(&labels, &labels, &["a", "b", "c"]).unwrap();
        let rows = cm.rows();
        for g in 0..3 {
            for p in 0..3 {
                if g != p {
                    assert_eq!(rows[g][p], 0);
                }
            }
        }
        assert_eq!(cm.total(), 5);
    }

    #[test]
    fn empty_lists_rejected() {
        let empty: [&str; 0] = [];
        assert!(confusion(&empty, &empty, &["a"]).is_err());
    }

    #[test]
    fn length_mismatch_and_unknown_label_rejected() {
        assert!(confusion(&["a"], &["a", "a"], &["a"]).is_err());
        assert!(confusion(&["a"], &["z"], &["a", "b"]).is_err());
    }

    #[test]
    fn perfect_predictions_score_one() {
        let labels = ["x", "y", "z", "x"];
        let r = report(&labels, &labels, &["x", "y", "z"]).unwrap();
        assert_eq!(r.macro_f1, 1.0);
        assert_eq!(r.accuracy, 1.0);
    }

    #[test]
    fn majority_baseline_hand_computed() {
        // 8 gold NOT + 2 gold OFF, everything predicted NOT:
        // F1(NOT) = 2*0.8*1.0/1.8 = 0.888..., F1(OFF) = 0, macro = 0.4444.
        let mut gold = vec!["NOT"; 8];
        gold.extend(vec!["OFF"; 2]);
        let pred = vec!["NOT"; 10];
        let r = report(&gold, &pred, &["NOT", "OFF"]).unwrap();
        assert!((r.macro_f1 - 0.4444).abs() < 1e-4);
        assert!((r.accuracy - 0.8).abs() < 1e-12);
        assert!((r.per_class[0].f1 - 2.0 * 0.8 / 1.8).abs() < 1e-12);
        assert_eq!(r.per_class[1].f1, 0.0);
    }

    #[test]
    fn macro_f1_ignores_gold_absent_classes() {
        // class "c" never occurs in gold but is predicted once.
        let gold = ["a", "a", "b"];
        let pred = ["a", "c", "b"];
        let cm = confusion(&gold, &pred, &["a", "b", "c"]).unwrap();
        // F1(a): P=1, R=0.5 -> 2/3; F1(b): 1.0; "c" excluded.
        assert!((macro_f1(&cm) - (2.0 / 3.0 + 1.0) / 2.0).abs() < 1e-12);
        // but the confusion matrix still has the prediction.
        assert_eq!(cm.count(0, 2), 1);
    }

    #[test]
    fn permuting_class_names_keeps_macro_f1() {
        let gold = ["a", "b", "a", "c", "c", "b", "a"];
        let pred = ["a", "a", "b", "c", "b", "b", "a"];
        let m1 = macro_f1(&confusion(&gold, &pred, &["a", "b", "c"]).unwrap());
        let m2 = macro_f1(&confusion(&gold, &pred, &["c", "a", "b"]).unwrap());
        assert!((m1 - m2).abs() < 1e-15);
    }

    #[test]
    fn accuracy_is_trace_over_total() {
        let gold = ["a", "b", "a", "b", "a"];
        let pred = ["a", "a", "a", "b", "b"];
        let r = report(&gold, &pred, &["a", "b"]).unwrap();
        let direct = gold
            .iter()
            .zip(pred.iter())
            .filter(|(g, p)| g == p)
            .count() as f64
            / gold.len() as f64;
        assert!((r.accuracy - direct).abs() < 1e-15);
    }

    /// Brute-force macro-F1 straight from label lists, independent of the
    /// ConfusionMatrix path. Used as the oracle for the exhaustive test.
    fn brute_force_macro_f1(gold: &[usize], pred: &[usize], k: usize) -> f64 {
        let mut f1s = Vec::new();
        for c in 0..k {
            let tp = gold
                .iter()
                .zip(pred)
                .filter(|(&g, &p)| g == c && p == c)
                .count() as f64;
            let fp = gold
                .iter()
                .zip(pred)
                .filter(|(&g, &p)| g != c && p == c)
                .count() as f64;
            let fn_ = gold
                .iter()
                .zip(pred)
                .filter(|(&g, &p)| g == c && p != c)
                .count() as f64;
            if tp + fn_ == 0.0 {
                continue; // class absent from gold
            }
            let precision = if tp + fp > 0.0 { tp / (tp + fp) } else { 0.0 };
            let recall = tp / (tp + fn_);
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            f1s.push(f1);
        }
        if f1s.is_empty() {
            0.0
        } else {
            f1s.iter().sum::<f64>() / f1s.len() as f64
        }
    }

    #[test]
    fn matches_brute_force_on_exhaustive_small_instances() {
        // every (gold, pred) pair over 3 classes for lengths 1..=4
        for len in 1usize..=4 {
            let total = 3usize.pow(len as u32);
            for gi in 0..total {
                for pi in 0..total {
                    let decode = |mut x: usize| {
                        (0..len)
                            .map(|_| {
                                let d = x % 3;
                                x /= 3;
                                d
                            })
                            .collect::<Vec<_>>()
                    };
                    let gold = decode(gi);
                    let pred = decode(pi);
                    let ours = macro_f1_from_indices(&gold, &pred, 3).unwrap();
                    let oracle = brute_force_macro_f1(&gold, &pred, 3);
                    assert!(
                        (ours - oracle).abs() < 1e-12,
                        "gold={gold:?} pred={pred:?} ours={ours} oracle={oracle}"
                    );
                }
            }
        }
    }

    #[test]
    fn matches_brute_force_on_random_longer_instances() {
        use rand::Rng;
        let mut rng = crate::rng::seeded_rng(7);
        for _ in 0..2000 {
            let len = rng.random_range(1..=12);
            let k = rng.random_range(1..=3);
            let gold: Vec<usize> = (0..len).map(|_| rng.random_range(0..k)).collect();
            let pred: Vec<usize> = (0..len).map(|_| rng.random_range(0..k)).collect();
            let ours = macro_f1_from_indices(&gold, &pred, k).unwrap();
            let oracle = brute_force_macro_f1(&gold, &pred, k);
            assert!((ours - oracle).abs() < 1e-12);
        }
    }
}
