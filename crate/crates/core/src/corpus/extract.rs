use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{clean_text, passage_id, CorpusError, Document, Passage, CLOSERS};
use crate::types::LengthSetting;

const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "st", "jr", "sr", "prof", "rev", "gen", "capt", "col", "lt", "sgt",
    "vs", "etc", "e.g", "i.e", "mt", "messrs", "mme", "mlle",
];

/// Extra shuffles tried before falling back to an earliest-end schedule.
const RESHUFFLES: u64 = 16;

#[derive(Debug, Clone, Copy)]
struct Word {
    start: usize,
    end: usize,
    terminal: bool,
    /// Starts a sentence: first word, follows a terminal word, or opens a paragraph.
    opens: bool,
}

/// True when `word` closes a sentence: it ends with `.`, `!`, `?` or `…`
/// (closing quotes or brackets may follow) and is not a known abbreviation or
/// a single-letter initial.
pub fn is_sentence_terminal(word: &str) -> bool {
    let core = word.trim_end_matches(CLOSERS);
    if core.ends_with(['!', '?', '\u{2026}']) {
        return true;
    }
    let Some(stem) = core.strip_suffix('.') else {
        return false;
    };
    if stem.ends_with('.') {
        // "..." style ellipsis
        return true;
    }
    let stem = stem.trim_start_matches(|c: char| !c.is_alphanumeric());
    let mut chars = stem.chars();
    if let (Some(c), None) = (chars.next(), chars.next()) {
        if c.is_uppercase() {
            return false;
        }
    }
    !ABBREVIATIONS.contains(&stem.to_lowercase().as_str())
}

fn tokenize(text: &str) -> Vec<Word> {
    let mut words = Vec::new();
    let mut start = None;
    let mut newline_pending = true;
    let push = |words: &mut Vec<Word>, s: usize, e: usize, newline: bool| {
        let opens = newline || words.last().is_none_or(|w: &Word| w.terminal);
        words.push(Word {
            start: s,
            end: e,
            terminal: is_sentence_terminal(&text[s..e]),
            opens,
        });
    };
    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                push(&mut words, s, i, newline_pending);
                newline_pending = false;
            }
            if c == '\n' {
                newline_pending = true;
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        push(&mut words, s, text.len(), newline_pending);
    }
    words
}

/// Candidate windows as inclusive word-index ranges: each starts on a sentence
/// opening and runs to the last terminal word that keeps the count in band.
fn candidate_windows(words: &[Word], setting: LengthSetting) -> Vec<(usize, usize)> {
    let (lo, hi) = setting.word_band();
    let mut out = Vec::new();
    for (s, w) in words.iter().enumerate() {
        if !w.opens {
            continue;
        }
        let last = (s + hi - 1).min(words.len().saturating_sub(1));
        if last + 1 < s + lo {
            continue;
        }
        if let Some(e) = (s + lo - 1..=last).rev().find(|&e| words[e].terminal) {
            out.push((s, e));
        }
    }
    out
}

fn overlaps(a: (usize, usize), b: (usize, usize)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

fn greedy_random(
    windows: &[(usize, usize)],
    count: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<(usize, usize)> {
    let mut order = windows.to_vec();
    order.shuffle(rng);
    let mut chosen: Vec<(usize, usize)> = Vec::with_capacity(count);
    for w in order {
        if chosen.len() == count {
            break;
        }
        if chosen.iter().all(|&c| !overlaps(c, w)) {
            chosen.push(w);
        }
    }
    chosen
}

/// Maximum set of pairwise disjoint windows (interval scheduling by earliest end).
fn earliest_end_schedule(windows: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut sorted = windows.to_vec();
    sorted.sort_by_key(|&(s, e)| (e, s));
    let mut out: Vec<(usize, usize)> = Vec::new();
    for w in sorted {
        if out.last().is_none_or(|&(_, e)| w.0 > e) {
            out.push(w);
        }
    }
    out
}

/// Extracts `count` pairwise non-overlapping passages from already cleaned
/// text. Start sentences are drawn uniformly without replacement from a
/// generator seeded with `seed`; the result is ordered by position.
pub fn extract_from_text(
    doc_id: &str,
    cleaned: &str,
    setting: LengthSetting,
    count: usize,
    seed: u64,
) -> Result<Vec<Passage>, CorpusError> {
    let words = tokenize(cleaned);
    let windows = candidate_windows(&words, setting);
    let max_disjoint = earliest_end_schedule(&windows);
    if max_disjoint.len() < count {
        return Err(CorpusError::InsufficientText {
            doc_id: doc_id.to_string(),
            setting,
            requested: count,
            available: max_disjoint.len(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = greedy_random(&windows, count, &mut rng);
    let mut attempt = 0;
    while chosen.len() < count && attempt < RESHUFFLES {
        attempt += 1;
        rng.set_stream(attempt);
        chosen = greedy_random(&windows, count, &mut rng);
    }
    if chosen.len() < count {
        chosen = max_disjoint
            .choose_multiple(&mut rng, count)
            .copied()
            .collect();
    }
    chosen.sort_unstable();

    chosen
        .into_iter()
        .enumerate()
        .map(|(index, (s, e))| {
            let text = &cleaned[words[s].start..words[e].end];
            Passage::new(
                passage_id(doc_id, setting, index),
                doc_id,
                index,
                text,
                setting,
            )
        })
        .collect()
}

/// Cleans the document and extracts `count` passages of the given length setting.
pub fn extract_passages(
    doc: &Document,
    setting: LengthSetting,
    count: usize,
    seed: u64,
) -> Result<Vec<Passage>, CorpusError> {
    let cleaned = clean_text(doc.raw_text())?;
    extract_from_text(doc.doc_id(), &cleaned, setting, count, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sentence(i: usize, words: usize) -> String {
        let mut s: Vec<String> = (0..words).map(|j| format!("w{i}x{j}")).collect();
        s[0] = format!("Start{i}");
        s.join(" ") + "."
    }

    fn synthetic_text(sentences: usize) -> String {
        (0..sentences)
            .map(|i| sentence(i, 8 + (i * 7) % 9))
            .collect::<Vec<_>>()
            .join(" ")
    }

    #[test]
    fn terminal_detection() {
        assert!(is_sentence_terminal("end."));
        assert!(is_sentence_terminal("end?\u{201d}"));
        assert!(is_sentence_terminal("wait..."));
        assert!(!is_sentence_terminal("Mr."));
        assert!(!is_sentence_terminal("J."));
        assert!(!is_sentence_terminal("word,"));
    }

    #[test]
    fn deterministic_for_a_seed() {
        let text = synthetic_text(600);
        let a = extract_from_text("d", &text, LengthSetting::Medium128, 34, 7).unwrap();
        let b = extract_from_text("d", &text, LengthSetting::Medium128, 34, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 34);
        let c = extract_from_text("d", &text, LengthSetting::Medium128, 34, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn passages_are_disjoint_substrings() {
        let text = synthetic_text(300);
        let ps = extract_from_text("d", &text, LengthSetting::Short64, 20, 3).unwrap();
        let mut spans: Vec<(usize, usize)> = ps
            .iter()
            .map(|p| {
                let s = text.find(p.text()).expect("substring");
                (s, s + p.text().len())
            })
            .collect();
        spans.sort();
        for pair in spans.windows(2) {
            assert!(pair[0].1 <= pair[1].0);
        }
        for (i, p) in ps.iter().enumerate() {
            assert_eq!(p.index(), i);
            assert!(p.text().starts_with("Start"));
        }
    }

    #[test]
    fn too_short_document_reports_capacity() {
        let text = synthetic_text(16); // ~200 words
        match extract_from_text("d", &text, LengthSetting::Long256, 5, 1) {
            Err(CorpusError::InsufficientText {
                available,
                requested,
                ..
            }) => {
                assert_eq!(requested, 5);
                assert!(available <= 1);
            }
            other => panic!("expected InsufficientText, got {other:?}"),
        }
    }

    #[test]
    fn fills_to_exact_capacity() {
        let text = synthetic_text(120);
        let words = tokenize(&text);
        let max = earliest_end_schedule(&candidate_windows(&words, LengthSetting::Short64)).len();
        let ps = extract_from_text("d", &text, LengthSetting::Short64, max, 11).unwrap();
        assert_eq!(ps.len(), max);
    }
}
