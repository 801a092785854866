use std::collections::HashMap;
use std::sync::LazyLock;

use regex::Regex;

use super::BaselineError;
use crate::providers::{Client, CompletionRequest, Prompt};

pub const MASK: &str = "[MASK]";

const CLOZE_HEAD: &str = "The passage below has had one word replaced by [MASK] everywhere it occurs. Reply with only that single word and nothing else.\nPassage: ";
const CLOZE_TAIL: &str = "\nAnswer:";

const STOPWORDS: &[&str] = &[
    "a", "about", "after", "again", "all", "also", "am", "an", "and", "any", "are", "as", "at",
    "be", "because", "been", "before", "being", "but", "by", "can", "could", "did", "do", "does",
    "down", "each", "even", "every", "for", "from", "had", "has", "have", "he", "her", "here",
    "hers", "him", "his", "how", "i", "if", "in", "into", "is", "it", "its", "just", "like", "may",
    "me", "might", "more", "most", "much", "must", "my", "no", "nor", "not", "now", "of", "off",
    "oh", "on", "once", "one", "only", "or", "other", "our", "out", "over", "said", "she",
    "should", "so", "some", "such", "than", "that", "the", "their", "them", "then", "there",
    "these", "they", "this", "those", "through", "to", "too", "under", "up", "upon", "very", "was",
    "we", "were", "what", "when", "where", "which", "while", "who", "whom", "why", "will", "with",
    "would", "yes", "yet", "you", "your",
];

static WORD: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\p{L}+(?:['’]\p{L}+)*").unwrap());

/// A passage with one word masked throughout, and that word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskedPassage {
    pub masked_text: String,
    pub answer: String,
}

fn is_stopword(word: &str) -> bool {
    STOPWORDS
        .binary_search(&word.to_lowercase().as_str())
        .is_ok()
}

struct Occurrence<'a> {
    word: &'a str,
    start: usize,
    end: usize,
    initial: bool,
}

fn occurrences(text: &str) -> Vec<Occurrence<'_>> {
    let mut out = Vec::new();
    let mut prev_end = 0;
    for m in WORD.find_iter(text) {
        let gap = &text[prev_end..m.start()];
        let initial = out.is_empty() || gap.contains(['.', '!', '?', '…', '\n']);
        out.push(Occurrence {
            word: m.as_str(),
            start: m.start(),
            end: m.end(),
            initial,
        });
        prev_end = m.end();
    }
    out
}

fn replace_where(text: &str, occ: &[Occurrence<'_>], hit: impl Fn(&str) -> bool) -> String {
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    for o in occ.iter().filter(|o| hit(o.word)) {
        out.push_str(&text[last..o.start]);
        out.push_str(MASK);
        last = o.end;
    }
    out.push_str(&text[last..]);
    out
}

/// Masks the passage's most frequent proper name, or failing that its most
/// frequent content word of four or more letters.
///
/// A capitalized non-stopword counts as a name when it appears somewhere other
/// than the start of a sentence, or never appears in lowercase. Names seen
/// mid-sentence win over sentence-initial ones; then higher count; then
/// earlier first occurrence.
pub fn mask_passage(text: &str) -> Result<MaskedPassage, BaselineError> {
    let occ = occurrences(text);
    let lowercase_seen: std::collections::HashSet<String> = occ
        .iter()
        .filter(|o| o.word.chars().next().is_some_and(char::is_lowercase))
        .map(|o| o.word.to_string())
        .collect();

    // word -> (mid-sentence count, total count, first index)
    let mut names: HashMap<&str, (usize, usize, usize)> = HashMap::new();
    for (i, o) in occ.iter().enumerate() {
        if !o.word.chars().next().is_some_and(char::is_uppercase) || is_stopword(o.word) {
            continue;
        }
        let e = names.entry(o.word).or_insert((0, 0, i));
        e.1 += 1;
        if !o.initial {
            e.0 += 1;
        }
    }
    let name = names
        .iter()
        .filter(|(w, (mid, _, _))| *mid > 0 || !lowercase_seen.contains(&w.to_lowercase()))
        .max_by_key(|(_, (mid, total, first))| (*mid > 0, *total, std::cmp::Reverse(*first)))
        .map(|(w, _)| *w);
    if let Some(name) = name {
        return Ok(MaskedPassage {
            masked_text: replace_where(text, &occ, |w| w == name),
            answer: name.to_string(),
        });
    }

    let mut nouns: HashMap<String, (usize, usize)> = HashMap::new();
    for (i, o) in occ.iter().enumerate() {
        if o.word.chars().count() >= 4 && !is_stopword(o.word) {
            nouns.entry(o.word.to_lowercase()).or_insert((0, i)).0 += 1;
        }
    }
    let noun = nouns
        .into_iter()
        .max_by_key(|(_, (count, first))| (*count, std::cmp::Reverse(*first)))
        .map(|(w, _)| w)
        .ok_or(BaselineError::Unmaskable)?;
    Ok(MaskedPassage {
        masked_text: replace_where(text, &occ, |w| w.to_lowercase() == noun),
        answer: noun,
    })
}

pub fn build_cloze_prompt(masked_text: &str) -> String {
    format!("{CLOZE_HEAD}{masked_text}{CLOZE_TAIL}")
}

/// The masked passage inside a prompt built by [`build_cloze_prompt`].
pub fn parse_cloze_prompt(prompt: &str) -> Option<&str> {
    prompt.strip_prefix(CLOZE_HEAD)?.strip_suffix(CLOZE_TAIL)
}

fn fold(s: &str) -> String {
    s.trim()
        .trim_matches(|c: char| c.is_ascii_punctuation() || c.is_whitespace() || "“”‘’".contains(c))
        .to_lowercase()
}

/// True when the reply names the masked word, ignoring case and surrounding punctuation.
pub fn cloze_matches(reply: &str, answer: &str) -> bool {
    fold(reply) == fold(answer)
}

/// Asks the model to fill the mask at temperature 0.
pub fn name_cloze(client: &Client, text: &str) -> Result<bool, BaselineError> {
    let masked = mask_passage(text)?;
    let request = CompletionRequest::new(
        Prompt::Single(build_cloze_prompt(&masked.masked_text)),
        0.0,
        8,
    );
    let reply = client.complete(&request)?;
    Ok(cloze_matches(&reply, &masked.answer))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stopwords_sorted() {
        assert!(STOPWORDS.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn masks_repeated_name() {
        let m = mask_passage("Harry ran. Harry jumped.").unwrap();
        assert_eq!(m.masked_text, "[MASK] ran. [MASK] jumped.");
        assert_eq!(m.answer, "Harry");
    }

    #[test]
    fn prefers_mid_sentence_names() {
        let m =
            mask_passage("Suddenly the door opened and Ron came in. Then Ron sat down.").unwrap();
        assert_eq!(m.answer, "Ron");
        assert_eq!(
            m.masked_text,
            "Suddenly the door opened and [MASK] came in. Then [MASK] sat down."
        );
    }

    #[test]
    fn falls_back_to_noun() {
        let m = mask_passage("The rain fell on the rain gauge.").unwrap();
        assert_eq!(m.answer, "rain");
        assert_eq!(m.masked_text, "The [MASK] fell on the [MASK] gauge.");
    }

    #[test]
    fn stopwords_only_is_unmaskable() {
        assert!(matches!(
            mask_passage("The the the."),
            Err(BaselineError::Unmaskable)
        ));
    }

    #[test]
    fn prompt_round_trip_and_matching() {
        let p = build_cloze_prompt("[MASK] ran.");
        assert_eq!(parse_cloze_prompt(&p), Some("[MASK] ran."));
        assert!(cloze_matches("harry.", "Harry"));
        assert!(cloze_matches(" Harry ", "Harry"));
        assert!(!cloze_matches("Ron", "Harry"));
    }
}
