use std::sync::LazyLock;

use regex::Regex;

use super::{token_sort_ratio, BaselineError};
use crate::providers::{Client, CompletionRequest, Prompt};

/// Completions scoring above this token-sort ratio count as reproductions.
pub const MATCH_THRESHOLD: f64 = 80.0;

static WORD: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\S+").unwrap());

/// A passage split into a prefix of `n` words and the following `n` words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixSplit<'a> {
    /// The passage verbatim up to the end of word `n`.
    pub prefix: &'a str,
    /// Words `n + 1 ..= 2n`, joined by single spaces.
    pub suffix: String,
    pub suffix_words: usize,
}

pub fn split_prefix(text: &str, n: usize) -> Result<PrefixSplit<'_>, BaselineError> {
    let words: Vec<_> = WORD.find_iter(text).collect();
    if n == 0 || words.len() < 2 * n {
        return Err(BaselineError::PassageTooShort {
            words: words.len(),
            needed: 2 * n.max(1),
        });
    }
    Ok(PrefixSplit {
        prefix: &text[..words[n - 1].end()],
        suffix: words[n..2 * n]
            .iter()
            .map(|m| m.as_str())
            .collect::<Vec<_>>()
            .join(" "),
        suffix_words: n,
    })
}

/// Whether `completion`, cut to the suffix's word count, reproduces `suffix`.
pub fn prefix_matches(completion: &str, suffix: &str, suffix_words: usize) -> bool {
    let head: Vec<&str> = completion.split_whitespace().take(suffix_words).collect();
    token_sort_ratio(&head.join(" "), suffix) > MATCH_THRESHOLD
}

/// Feeds the first `n` words and checks the model continues with the next `n`.
/// `max_tokens` is twice the suffix word count.
pub fn prefix_probe(client: &Client, text: &str, n: usize) -> Result<bool, BaselineError> {
    let split = split_prefix(text, n)?;
    let request =
        CompletionRequest::new(Prompt::Single(split.prefix.to_string()), 0.0, 2 * n as u32);
    let completion = client.complete(&request)?;
    Ok(prefix_matches(
        &completion,
        &split.suffix,
        split.suffix_words,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_keeps_prefix_verbatim() {
        let s = split_prefix("one  two\nthree four five six seven", 3).unwrap();
        assert_eq!(s.prefix, "one  two\nthree");
        assert_eq!(s.suffix, "four five six");
        assert!(matches!(
            split_prefix("one two three", 2),
            Err(BaselineError::PassageTooShort {
                words: 3,
                needed: 4
            })
        ));
    }

    #[test]
    fn matching_is_order_invariant_and_truncated() {
        assert!(prefix_matches("six four five", "four five six", 3));
        assert!(prefix_matches(
            "four five six and then more words",
            "four five six",
            3
        ));
        assert!(!prefix_matches(
            "The weather had turned by then",
            "four five six",
            3
        ));
    }
}
