//! Small domain enums shared by every stage of the pipeline.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// One of the four answer positions of a multiple-choice question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    A,
    B,
    C,
    D,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::A, Label::B, Label::C, Label::D];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Label> {
        Self::ALL.get(index).copied()
    }

    pub fn as_char(self) -> char {
        (b'A' + self as u8) as char
    }

    pub fn from_char(c: char) -> Option<Label> {
        match c.to_ascii_uppercase() {
            'A' => Some(Label::A),
            'B' => Some(Label::B),
            'C' => Some(Label::C),
            'D' => Some(Label::D),
            _ => None,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) if c.is_ascii_uppercase() => {
                Label::from_char(c).ok_or_else(|| format!("invalid label {s:?}"))
            }
            _ => Err(format!("invalid label {s:?}")),
        }
    }
}

/// Group membership of a document: `suspect` documents may have been seen in
/// training, `clean` ones were published after the model's cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Clean,
    Suspect,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::Clean => "clean",
            Group::Suspect => "suspect",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Group {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "clean" => Ok(Group::Clean),
            "suspect" => Ok(Group::Suspect),
            other => Err(format!("invalid group {other:?}")),
        }
    }
}

/// Target passage length. Token counts are approximated by word counts
/// (`words = tokens * 0.75`) so the corpus stays tokenizer independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthSetting {
    Short64,
    Medium128,
    Long256,
}

impl LengthSetting {
    /// Allowed deviation from [`target_words`](Self::target_words), in words.
    pub const TOLERANCE_WORDS: usize = 10;

    pub fn target_tokens(self) -> usize {
        match self {
            LengthSetting::Short64 => 64,
            LengthSetting::Medium128 => 128,
            LengthSetting::Long256 => 256,
        }
    }

    pub fn target_words(self) -> usize {
        self.target_tokens() * 3 / 4
    }

    /// Inclusive word-count band a passage of this setting must fall in.
    pub fn word_band(self) -> (usize, usize) {
        let t = self.target_words();
        (t - Self::TOLERANCE_WORDS, t + Self::TOLERANCE_WORDS)
    }

    pub fn accepts(self, word_count: usize) -> bool {
        let (lo, hi) = self.word_band();
        (lo..=hi).contains(&word_count)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LengthSetting::Short64 => "short64",
            LengthSetting::Medium128 => "medium128",
            LengthSetting::Long256 => "long256",
        }
    }
}

impl fmt::Display for LengthSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for LengthSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "short64" => Ok(LengthSetting::Short64),
            "medium128" => Ok(LengthSetting::Medium128),
            "long256" => Ok(LengthSetting::Long256),
            other => Err(format!("invalid length setting {other:?}")),
        }
    }
}

/// Whitespace-delimited word count, the token proxy used throughout.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}
