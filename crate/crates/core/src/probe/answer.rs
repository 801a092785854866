use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::types::Label;

/// A parsed model answer. Refusals score as incorrect.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Answer {
    Label(Label),
    Refusal,
}

impl Answer {
    pub fn label(self) -> Option<Label> {
        match self {
            Answer::Label(l) => Some(l),
            Answer::Refusal => None,
        }
    }
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Answer::Label(l) => write!(f, "{l}"),
            Answer::Refusal => f.write_str("REFUSAL"),
        }
    }
}

impl FromStr for Answer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "REFUSAL" {
            Ok(Answer::Refusal)
        } else {
            s.parse().map(Answer::Label)
        }
    }
}

impl Serialize for Answer {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Answer {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

static KEYWORD: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r"(?i)\b(?:answer(?:\s+is)?|option|example|choice)\s*[:\-]?\s*\(?([abcd])\b")
        .unwrap()
});
static PAREN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\(([abcd])\)").unwrap());
static BARE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\b([ABCD])\b").unwrap());

const WRAPPING: &[char] = &['(', ')', '[', ']', '<', '>', '.', ':', '*', '\'', '"', '`'];

/// Extracts the answer label from a raw reply.
///
/// Tried in order: the whole reply is a label (`B`, `b.`, `(C)`); a label after
/// `answer`, `answer is`, `option`, `example` or `choice`; a parenthesized
/// label anywhere; the first standalone uppercase `A`-`D`. Otherwise a refusal.
pub fn parse_answer(raw: &str) -> Answer {
    let bare = raw
        .trim()
        .trim_matches(|c: char| c.is_whitespace() || WRAPPING.contains(&c));
    let mut chars = bare.chars();
    if let (Some(c), None) = (chars.next(), chars.next()) {
        if let Some(l) = Label::from_char(c) {
            return Answer::Label(l);
        }
    }
    for re in [&*KEYWORD, &*PAREN, &*BARE] {
        if let Some(c) = re.captures(raw).and_then(|c| c[1].chars().next()) {
            if let Some(l) = Label::from_char(c) {
                return Answer::Label(l);
            }
        }
    }
    Answer::Refusal
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        let cases = [
            ("B", Answer::Label(Label::B)),
            ("The correct answer is (C).", Answer::Label(Label::C)),
            ("I cannot reproduce copyrighted text.", Answer::Refusal),
            ("A.", Answer::Label(Label::A)),
            ("(D)", Answer::Label(Label::D)),
            ("Answer: A", Answer::Label(Label::A)),
            ("Example A", Answer::Label(Label::A)),
            ("d", Answer::Label(Label::D)),
            ("  <C>  ", Answer::Label(Label::C)),
            ("I think it is B, the second one.", Answer::Label(Label::B)),
            ("option c seems right", Answer::Label(Label::C)),
            ("", Answer::Refusal),
        ];
        for (raw, want) in cases {
            assert_eq!(parse_answer(raw), want, "{raw:?}");
        }
    }

    #[test]
    fn answer_serializes_as_string() {
        assert_eq!(
            serde_json::to_string(&Answer::Label(Label::C)).unwrap(),
            "\"C\""
        );
        assert_eq!(
            serde_json::to_string(&Answer::Refusal).unwrap(),
            "\"REFUSAL\""
        );
        assert_eq!(
            serde_json::from_str::<Answer>("\"REFUSAL\"").unwrap(),
            Answer::Refusal
        );
        assert!(serde_json::from_str::<Answer>("\"E\"").is_err());
    }
}
