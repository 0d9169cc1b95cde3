//! Tweet normalization and tokenization.
//!
//! The pipeline lowercases, strips everything that is not a letter, digit,
//! whitespace or allowed punctuation, expands contractions from a table, and
//! splits punctuation into standalone tokens. Every downstream model consumes
//! the resulting [`TokenSeq`]s.

use std::collections::HashMap;
use std::path::Path;

use crate::corpus::Dataset;
use crate::error::{Error, Result};

/// Punctuation characters that survive normalization. Everything else
/// (emoji, symbols, ...) is deleted.
pub const ALLOWED_PUNCT: &[char] = &[
    '.', ',', '!', '?', '\'', '"', ':', ';', '(', ')', '-', '#', '@', '_', '/',
];

fn is_allowed_punct(c: char) -> bool {
    ALLOWED_PUNCT.contains(&c)
}

fn is_token_char(c: char) -> bool {
    c.is_alphabetic() || c.is_numeric()
}

/// Word characters for contraction boundary detection.
fn is_word_char(c: char) -> bool {
    is_token_char(c) || c == '\''
}

/// Normalized token list for one tweet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenSeq {
    pub source_id: String,
    pub tokens: Vec<String>,
}

impl TokenSeq {
    pub fn new(source_id: impl Into<String>, tokens: Vec<String>) -> Self {
        TokenSeq {
            source_id: source_id.into(),
            tokens,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// Contraction -> expansion table, matched longest-first on word boundaries.
#[derive(Debug, Clone)]
pub struct ContractionTable {
    /// Keys grouped by first char; each group sorted by length descending.
    by_first: HashMap<char, Vec<(Vec<char>, String)>>,
    len: usize,
}

impl ContractionTable {
    /// Parse `contraction<TAB>expansion words` lines. `#` starts a comment.
    pub fn from_str_table(text: &str) -> Result<Self> {
        let mut seen: HashMap<String, String> = HashMap::new();
        for (lineno, raw_line) in text.lines().enumerate() {
            let line = raw_line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, expansion) = line.split_once('\t').ok_or_else(|| {
                Error::Validation(format!(
                    "contraction table line {}: expected `key<TAB>expansion`",
                    lineno + 1
                ))
            })?;
            let key = key.trim().to_lowercase().replace('\u{2019}', "'");
            let expansion = expansion.trim().to_lowercase();
            if key.is_empty() || expansion.is_empty() {
                return Err(Error::Validation(format!(
                    "contraction table line {}: empty key or expansion",
                    lineno + 1
                )));
            }
            if expansion.contains('\'') || expansion.contains('\u{2019}') {
                return Err(Error::Validation(format!(
                    "expansion of {key:?} contains an apostrophe"
                )));
            }
            if seen.insert(key.clone(), expansion).is_some() {
                return Err(Error::Validation(format!("duplicate contraction key {key:?}")));
            }
        }
        if seen.is_empty() {
            return Err(Error::Validation("contraction table is empty".into()));
        }
        // expansions must not themselves contain contraction keys, otherwise
        // normalize would not be idempotent.
        for (key, expansion) in &seen {
            for word in expansion.split_whitespace() {
                if seen.contains_key(word) {
                    return Err(Error::Validation(format!(
                        "expansion of {key:?} contains the contraction {word:?}"
                    )));
                }
            }
        }
        let len = seen.len();
        let mut by_first: HashMap<char, Vec<(Vec<char>, String)>> = HashMap::new();
        for (key, expansion) in seen {
            let chars: Vec<char> = key.chars().collect();
            by_first.entry(chars[0]).or_default().push((chars, expansion));
        }
        for group in by_first.values_mut() {
            group.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(&b.0)));
        }
        Ok(ContractionTable { by_first, len })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_str_table(&text)
    }

    /// The table shipped with the toolkit (standard English contractions).
    pub fn builtin() -> Self {
        Self::from_str_table(include_str!(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../data/contractions.tsv"
        )))
        .expect("builtin contraction table is valid")
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Longest key matching at `pos` on a word boundary, with its expansion.
    fn match_at(&self, chars: &[char], pos: usize) -> Option<(usize, &str)> {
        let group = self.by_first.get(&chars[pos])?;
        if pos > 0 && is_word_char(chars[pos - 1]) {
            return None;
        }
        for (key, expansion) in group {
            let end = pos + key.len();
            if end <= chars.len()
                && chars[pos..end] == key[..]
                && (end == chars.len() || !is_word_char(chars[end]))
            {
                return Some((key.len(), expansion));
            }
        }
        None
    }
}

impl Default for ContractionTable {
    fn default() -> Self {
        Self::builtin()
    }
}

/// Lowercase, strip disallowed characters, expand contractions and collapse
/// whitespace. Total over arbitrary UTF-8 and idempotent.
pub fn normalize(raw: &str, table: &ContractionTable) -> String {
    // lowercase, unify the typographic apostrophe, drop disallowed chars
    let mut kept: Vec<char> = Vec::with_capacity(raw.len());
    for c in raw.chars().flat_map(char::to_lowercase) {
        let c = if c == '\u{2019}' { '\'' } else { c };
        if is_token_char(c) || c.is_whitespace() || is_allowed_punct(c) {
            kept.push(c);
        }
    }
    // expand contractions, longest match wins
    let mut expanded = String::with_capacity(kept.len());
    let mut i = 0;
    while i < kept.len() {
        if let Some((key_len, expansion)) = table.match_at(&kept, i) {
            expanded.push_str(expansion);
            i += key_len;
        } else {
            expanded.push(kept[i]);
            i += 1;
        }
    }
    // collapse whitespace runs and trim
    expanded.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Split a normalized string on whitespace, then split each punctuation
/// character into its own token.
pub fn tokenize(normalized: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in normalized.split_whitespace() {
        let mut run = String::new();
        for c in chunk.chars() {
            if is_token_char(c) {
                run.push(c);
            } else {
                if !run.is_empty() {
                    tokens.push(std::mem::take(&mut run));
                }
                tokens.push(c.to_string());
            }
        }
        if !run.is_empty() {
            tokens.push(run);
        }
    }
    tokens
}

/// Normalize + tokenize one record's text.
pub fn preprocess(id: &str, raw: &str, table: &ContractionTable) -> TokenSeq {
    TokenSeq::new(id, tokenize(&normalize(raw, table)))
}

/// Element-wise preprocessing of a dataset, preserving order and ids.
pub fn preprocess_corpus(dataset: &Dataset, table: &ContractionTable) -> Vec<TokenSeq> {
    dataset
        .records
        .iter()
        .map(|r| preprocess(&r.id, &r.raw_text, table))
        .collect()
}
