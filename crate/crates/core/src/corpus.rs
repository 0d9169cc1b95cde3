//! OLID-format corpus loading.
//!
//! Training/trial files are tab-separated with a header and the three
//! hierarchical subtask columns; test sets come as an `id<TAB>tweet` file
//! joined against an `id,label` CSV. Label hierarchy (B requires A=OFF,
//! C requires B=TIN) is validated on load.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Task A label: offensive or not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OffenseLabel {
    Off,
    Not,
}

/// Task B label: targeted insult or untargeted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetLabel {
    Tin,
    Unt,
}

/// Task C label: individual, group, or other target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetKind {
    Ind,
    Grp,
    Oth,
}

macro_rules! label_strings {
    ($ty:ty { $($variant:path => $s:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(&self) -> &'static str {
                match self { $($variant => $s),+ }
            }
        }
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s { $($s => Ok($variant),)+ other => Err(Error::Validation(
                    format!("unknown {} label {other:?}", stringify!($ty)))) }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

label_strings!(OffenseLabel { OffenseLabel::Off => "OFF", OffenseLabel::Not => "NOT" });
label_strings!(TargetLabel { TargetLabel::Tin => "TIN", TargetLabel::Unt => "UNT" });
label_strings!(TargetKind {
    TargetKind::Ind => "IND",
    TargetKind::Grp => "GRP",
    TargetKind::Oth => "OTH",
});

/// One of the three classification tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    A,
    B,
    C,
}

impl Task {
    /// Canonical class-name order used for matrices and reports.
    pub fn class_names(&self) -> &'static [&'static str] {
        match self {
            Task::A => &["NOT", "OFF"],
            Task::B => &["TIN", "UNT"],
            Task::C => &["GRP", "IND", "OTH"],
        }
    }
}

impl FromStr for Task {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Task::A),
            "B" | "b" => Ok(Task::B),
            "C" | "c" => Ok(Task::C),
            other => Err(Error::Config(format!("unknown task {other:?}, expected A, B or C"))),
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Task::A => "A",
            Task::B => "B",
            Task::C => "C",
        })
    }
}

/// Hierarchical labels for one tweet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TaskLabel {
    pub task_a: OffenseLabel,
    pub task_b: Option<TargetLabel>,
    pub task_c: Option<TargetKind>,
}

impl TaskLabel {
    /// Validates the hierarchy: B requires A=OFF, C requires B=TIN.
    pub fn new(
        task_a: OffenseLabel,
        task_b: Option<TargetLabel>,
        task_c: Option<TargetKind>,
    ) -> Result<Self> {
        if task_b.is_some() && task_a != OffenseLabel::Off {
            return Err(Error::Validation(
                "task B label present on a tweet not labeled OFF".into(),
            ));
        }
        if task_c.is_some() && task_b != Some(TargetLabel::Tin) {
            return Err(Error::Validation(
                "task C label present on a tweet not labeled TIN".into(),
            ));
        }
        Ok(TaskLabel {
            task_a,
            task_b,
            task_c,
        })
    }

    /// The label string this record carries for `task`, if any.
    pub fn for_task(&self, task: Task) -> Option<&'static str> {
        match task {
            Task::A => Some(self.task_a.as_str()),
            Task::B => self.task_b.map(|l| l.as_str()),
            Task::C => self.task_c.map(|l| l.as_str()),
        }
    }
}

/// One tweet with optional labels (test tweets may be unlabeled).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TweetRecord {
    pub id: String,
    pub raw_text: String,
    pub labels: Option<TaskLabel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitTag {
    Train,
    Trial,
    Test,
}

/// An ordered collection of tweets; order is file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub records: Vec<TweetRecord>,
    pub split_tag: SplitTag,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Gold label strings for `task`; errors if any record lacks one.
    pub fn gold_labels(&self, task: Task) -> Result<Vec<&'static str>> {
        self.records
            .iter()
            .map(|r| {
                r.labels
                    .as_ref()
                    .and_then(|l| l.for_task(task))
                    .ok_or_else(|| {
                        Error::Validation(format!("record {} has no task {task} label", r.id))
                    })
            })
            .collect()
    }

    /// Gold class indices for `task` in the canonical class order.
    pub fn gold_indices(&self, task: Task) -> Result<Vec<usize>> {
        let names = task.class_names();
        self.gold_labels(task)?
            .into_iter()
            .map(|l| {
                names
                    .iter()
                    .position(|n| *n == l)
                    .ok_or_else(|| Error::Validation(format!("unexpected label {l}")))
            })
            .collect()
    }
}

fn decode_utf8(path: &Path, bytes: Vec<u8>) -> Result<String> {
    String::from_utf8(bytes).map_err(|e| {
        let line = 1 + bytes_line(e.as_bytes(), e.utf8_error().valid_up_to());
        Error::parse(path, line, "file is not valid UTF-8")
    })
}

fn bytes_line(bytes: &[u8], upto: usize) -> usize {
    bytes[..upto].iter().filter(|&&b| b == b'\n').count()
}

fn parse_optional<T: FromStr<Err = Error>>(field: &str) -> Result<Option<T>> {
    if field.eq_ignore_ascii_case("null") {
        Ok(None)
    } else {
        field.parse().map(Some)
    }
}

const TRAIN_HEADER: [&str; 5] = ["id", "tweet", "subtask_a", "subtask_b", "subtask_c"];

/// Load an OLID training/trial file.
///
/// Expects a header row `id tweet subtask_a subtask_b subtask_c` (tab
/// separated) and `NULL` (any case) for absent labels.
pub fn load_olid_training(path: impl AsRef<Path>, split: SplitTag) -> Result<Dataset> {
    let path = path.as_ref();
    let text = decode_utf8(path, std::fs::read(path)?)?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::parse(path, 1, "empty file, expected a header row"))?;
    let header_fields: Vec<&str> = header.trim_end_matches('\r').split('\t').collect();
    if header_fields != TRAIN_HEADER {
        return Err(Error::parse(
            path,
            1,
            format!("unexpected header {header_fields:?}, expected {TRAIN_HEADER:?}"),
        ));
    }

    let mut records = Vec::new();
    let mut seen_ids = HashSet::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end_matches('\r').split('\t').collect();
        if fields.len() != 5 {
            return Err(Error::parse(
                path,
                lineno,
                format!("expected 5 tab-separated columns, found {}", fields.len()),
            ));
        }
        let id = fields[0].trim();
        if id.is_empty() {
            return Err(Error::parse(path, lineno, "empty id"));
        }
        if !seen_ids.insert(id.to_string()) {
            return Err(Error::Validation(format!("duplicate id {id:?}")));
        }
        let task_a: OffenseLabel = fields[2].parse().map_err(|e| {
            Error::parse(path, lineno, format!("id {id}: {e}"))
        })?;
        let task_b = parse_optional::<TargetLabel>(fields[3])
            .map_err(|e| Error::parse(path, lineno, format!("id {id}: {e}")))?;
        let task_c = parse_optional::<TargetKind>(fields[4])
            .map_err(|e| Error::parse(path, lineno, format!("id {id}: {e}")))?;
        let labels = TaskLabel::new(task_a, task_b, task_c)
            .map_err(|e| Error::Validation(format!("id {id}: {e}")))?;
        records.push(TweetRecord {
            id: id.to_string(),
            raw_text: fields[1].to_string(),
            labels: Some(labels),
        });
    }
    Ok(Dataset {
        records,
        split_tag: split,
    })
}

/// Load a test split: an `id<TAB>tweet` file (with header) joined against an
/// `id,label` CSV (no header) carrying the gold label for `task`.
///
/// Labels for task B imply A=OFF, and for task C imply B=TIN, so the label
/// hierarchy stays intact on the joined records.
pub fn load_test_set(
    tweets_path: impl AsRef<Path>,
    labels_path: impl AsRef<Path>,
    task: Task,
) -> Result<Dataset> {
    let tweets_path = tweets_path.as_ref();
    let labels_path = labels_path.as_ref();

    let tweets_text = decode_utf8(tweets_path, std::fs::read(tweets_path)?)?;
    let mut tweet_lines = tweets_text.lines().enumerate();
    let (_, header) = tweet_lines
        .next()
        .ok_or_else(|| Error::parse(tweets_path, 1, "empty file, expected a header row"))?;
    let header_fields: Vec<&str> = header.trim_end_matches('\r').split('\t').collect();
    if header_fields.len() != 2 || header_fields[0] != "id" {
        return Err(Error::parse(
            tweets_path,
            1,
            format!("unexpected header {header_fields:?}, expected [\"id\", \"tweet\"]"),
        ));
    }

    let mut ids_in_order: Vec<String> = Vec::new();
    let mut texts: std::collections::HashMap<String, String> = Default::default();
    for (idx, line) in tweet_lines {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end_matches('\r').split('\t').collect();
        if fields.len() != 2 {
            return Err(Error::parse(
                tweets_path,
                lineno,
                format!("expected 2 tab-separated columns, found {}", fields.len()),
            ));
        }
        let id = fields[0].trim().to_string();
        if id.is_empty() {
            return Err(Error::parse(tweets_path, lineno, "empty id"));
        }
        if texts.insert(id.clone(), fields[1].to_string()).is_some() {
            return Err(Error::Validation(format!("duplicate id {id:?}")));
        }
        ids_in_order.push(id);
    }

    let labels_text = decode_utf8(labels_path, std::fs::read(labels_path)?)?;
    let mut labels: std::collections::HashMap<String, String> = Default::default();
    for (idx, line) in labels_text.lines().enumerate() {
        let lineno = idx + 1;
        if line.is_empty() {
            continue;
        }
        let (id, label) = line.trim_end_matches('\r').split_once(',').ok_or_else(|| {
            Error::parse(labels_path, lineno, "expected `id,label`")
        })?;
        let id = id.trim().to_string();
        if labels.insert(id.clone(), label.trim().to_string()).is_some() {
            return Err(Error::Validation(format!("duplicate label for id {id:?}")));
        }
    }

    let missing_labels: Vec<&String> =
        ids_in_order.iter().filter(|id| !labels.contains_key(*id)).collect();
    if !missing_labels.is_empty() {
        return Err(Error::Validation(format!(
            "ids missing from the labels file: {missing_labels:?}"
        )));
    }
    let tweet_ids: HashSet<&String> = ids_in_order.iter().collect();
    let missing_tweets: Vec<&String> =
        labels.keys().filter(|id| !tweet_ids.contains(id)).collect();
    if !missing_tweets.is_empty() {
        let mut missing: Vec<&String> = missing_tweets;
        missing.sort();
        return Err(Error::Validation(format!(
            "ids missing from the tweets file: {missing:?}"
        )));
    }

    let mut records = Vec::with_capacity(ids_in_order.len());
    for id in ids_in_order {
        let label_str = &labels[&id];
        let labels = match task {
            Task::A => TaskLabel::new(label_str.parse()?, None, None)?,
            Task::B => TaskLabel::new(OffenseLabel::Off, Some(label_str.parse()?), None)?,
            Task::C => TaskLabel::new(
                OffenseLabel::Off,
                Some(TargetLabel::Tin),
                Some(label_str.parse()?),
            )?,
        };
        let raw_text = texts.remove(&id).expect("id came from the tweets file");
        records.push(TweetRecord {
            id,
            raw_text,
            labels: Some(labels),
        });
    }
    Ok(Dataset {
        records,
        split_tag: SplitTag::Test,
    })
}

/// Keep the records that carry a label for `task` (task A keeps everything).
pub fn filter_for_task(dataset: &Dataset, task: Task) -> Result<Dataset> {
    let mut records = Vec::new();
    for r in &dataset.records {
        let labels = r.labels.as_ref().ok_or_else(|| {
            Error::Validation(format!("record {} is unlabeled, cannot filter", r.id))
        })?;
        let keep = match task {
            Task::A => true,
            Task::B => labels.task_b.is_some(),
            Task::C => labels.task_c.is_some(),
        };
        if keep {
            records.push(r.clone());
        }
    }
    Ok(Dataset {
        records,
        split_tag: dataset.split_tag,
    })
}
