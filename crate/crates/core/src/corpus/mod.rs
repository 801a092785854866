//! Document ingestion: cleaning raw text, extracting passages, and reading or
//! writing the corpus and benchmark files.

mod clean;
mod extract;
mod load;
pub(crate) mod schema;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{word_count, Group, LengthSetting};

pub use clean::clean_text;
pub use extract::{extract_from_text, extract_passages, is_sentence_terminal};
pub use load::{load_benchmark, load_corpus, load_passages, save_benchmark, save_passages};
pub use schema::SchemaError;

/// First publication year treated as unambiguously after a model's cutoff.
pub const CLEAN_FROM_YEAR: i32 = 2023;
/// Year whose documents are accepted but flagged, since cutoffs straddle it.
pub const AMBIGUOUS_YEAR: i32 = 2022;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("document is empty after cleaning")]
    EmptyAfterCleaning,
    #[error(
        "document {doc_id} yields at most {available} {setting} passages, {requested} requested"
    )]
    InsufficientText {
        doc_id: String,
        setting: LengthSetting,
        requested: usize,
        available: usize,
    },
    #[error("invalid document {doc_id:?}: {reason}")]
    InvalidDocument { doc_id: String, reason: String },
    #[error("invalid passage {passage_id:?}: {reason}")]
    InvalidPassage { passage_id: String, reason: String },
    #[error(transparent)]
    Schema(#[from] SchemaError),
    #[error("duplicate id {id:?} at record {record}")]
    DuplicateId { id: String, record: usize },
    #[error("record {record}: {source}")]
    InvalidRecord {
        record: usize,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

/// A titled work with its explicit group label.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    doc_id: String,
    title: String,
    author: String,
    publication_year: i32,
    group: Group,
    raw_text: String,
}

impl Document {
    /// Validates the document. The group label is never inferred from the
    /// year; it is checked against it (`clean` iff published 2023 or later).
    pub fn new(
        doc_id: impl Into<String>,
        title: impl Into<String>,
        author: impl Into<String>,
        publication_year: i32,
        group: Group,
        raw_text: impl Into<String>,
    ) -> Result<Self, CorpusError> {
        let doc = Document {
            doc_id: doc_id.into(),
            title: title.into(),
            author: author.into(),
            publication_year,
            group,
            raw_text: raw_text.into(),
        };
        let invalid = |reason: String| CorpusError::InvalidDocument {
            doc_id: doc.doc_id.clone(),
            reason,
        };
        if doc.doc_id.trim().is_empty() {
            return Err(invalid("doc_id is empty".into()));
        }
        if doc.raw_text.trim().is_empty() {
            return Err(invalid("raw_text is empty".into()));
        }
        let expected = if publication_year >= CLEAN_FROM_YEAR {
            Group::Clean
        } else {
            Group::Suspect
        };
        if group != expected {
            return Err(invalid(format!(
                "group {group} contradicts publication year {publication_year} (clean iff >= {CLEAN_FROM_YEAR})"
            )));
        }
        if publication_year == AMBIGUOUS_YEAR {
            log::warn!(
                "document {} was published in {AMBIGUOUS_YEAR}; model cutoffs make its membership ambiguous",
                doc.doc_id
            );
        }
        Ok(doc)
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    pub fn title(&self) -> &str {
        &self.title
    }

    pub fn author(&self) -> &str {
        &self.author
    }

    pub fn publication_year(&self) -> i32 {
        self.publication_year
    }

    pub fn group(&self) -> Group {
        self.group
    }

    pub fn raw_text(&self) -> &str {
        &self.raw_text
    }
}

/// A contiguous excerpt of a cleaned document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Passage {
    passage_id: String,
    doc_id: String,
    index: usize,
    text: String,
    length_setting: LengthSetting,
    word_count: usize,
}

impl Passage {
    pub fn new(
        passage_id: impl Into<String>,
        doc_id: impl Into<String>,
        index: usize,
        text: impl Into<String>,
        length_setting: LengthSetting,
    ) -> Result<Self, CorpusError> {
        let passage_id = passage_id.into();
        let text = text.into();
        let invalid = |reason: String| CorpusError::InvalidPassage {
            passage_id: passage_id.clone(),
            reason,
        };
        if !ends_with_terminal(&text) {
            return Err(invalid(
                "does not end with sentence-terminal punctuation".into(),
            ));
        }
        let words = word_count(&text);
        if !length_setting.accepts(words) {
            let (lo, hi) = length_setting.word_band();
            return Err(invalid(format!(
                "{words} words is outside the {length_setting} band [{lo}, {hi}]"
            )));
        }
        if has_markup(&text) {
            return Err(invalid("contains markup".into()));
        }
        Ok(Passage {
            passage_id,
            doc_id: doc_id.into(),
            index,
            text,
            length_setting,
            word_count: words,
        })
    }

    pub fn passage_id(&self) -> &str {
        &self.passage_id
    }

    pub fn doc_id(&self) -> &str {
        &self.doc_id
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn length_setting(&self) -> LengthSetting {
        self.length_setting
    }

    pub fn word_count(&self) -> usize {
        self.word_count
    }
}

pub(crate) fn passage_id(doc_id: &str, setting: LengthSetting, index: usize) -> String {
    format!("{doc_id}-{setting}-{index:03}")
}

const CLOSERS: &[char] = &['"', '\'', '\u{201d}', '\u{2019}', ')', ']', '\u{bb}'];

/// True when `text` ends in `.`, `!`, `?` or an ellipsis, optionally followed
/// by closing quotes or brackets.
pub fn ends_with_terminal(text: &str) -> bool {
    let core = text.trim_end().trim_end_matches(CLOSERS);
    core.ends_with(['.', '!', '?', '\u{2026}'])
}

fn has_markup(text: &str) -> bool {
    schema::TAG.is_match(text)
}
