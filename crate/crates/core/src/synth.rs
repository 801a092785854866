//! Synthetic documents, passages and paraphrases for offline simulation.
//!
//! Text is drawn from a small vocabulary with a keyed ChaCha stream, so the
//! same seed and key always give the same prose.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::corpus::{CorpusError, Document};
use crate::paraphrase::{check_paraphrase, McqaItem, PassageMeta};
use crate::types::{Group, LengthSetting};

const NAMES: &[&str] = &[
    "Ada", "Bram", "Cora", "Dmitri", "Elena", "Farid", "Greta", "Hugo", "Ines", "Jonah", "Kira",
    "Lucan", "Mira", "Nadia", "Oskar", "Petra",
];

const WORDS: &[&str] = &[
    "river",
    "lantern",
    "morning",
    "harbor",
    "letter",
    "window",
    "garden",
    "winter",
    "station",
    "kitchen",
    "silver",
    "quiet",
    "narrow",
    "distant",
    "broken",
    "golden",
    "heavy",
    "bright",
    "careful",
    "sudden",
    "walked",
    "carried",
    "watched",
    "opened",
    "followed",
    "remembered",
    "folded",
    "waited",
    "answered",
    "gathered",
    "across",
    "beneath",
    "toward",
    "behind",
    "beside",
    "along",
    "slowly",
    "again",
    "almost",
    "never",
    "often",
    "still",
    "stone",
    "bridge",
    "orchard",
    "candle",
    "market",
    "meadow",
    "ledger",
    "compass",
    "shadow",
    "engine",
    "ribbon",
    "thunder",
    "salt",
    "copper",
    "paper",
    "village",
    "mountain",
    "doorway",
    "voice",
    "story",
    "promise",
    "journey",
    "evening",
    "season",
    "pocket",
    "ticket",
    "signal",
    "blanket",
    "chapel",
    "valley",
    "tower",
    "basket",
    "mirror",
    "feather",
    "iron",
    "lamp",
    "the",
    "a",
    "and",
    "of",
    "with",
    "from",
    "into",
    "under",
    "over",
    "her",
    "his",
    "their",
    "was",
    "had",
    "were",
    "could",
    "would",
    "then",
    "while",
];

fn keyed_rng(seed: u64, key: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(key.as_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

fn sentence(rng: &mut ChaCha8Rng, len: usize) -> String {
    let mut words: Vec<String> = Vec::with_capacity(len);
    if rng.gen_bool(0.4) {
        words.push(NAMES.choose(rng).expect("non-empty").to_string());
    }
    while words.len() < len {
        words.push(WORDS.choose(rng).expect("non-empty").to_string());
    }
    words[0] = capitalize(&words[0]);
    format!("{}.", words.join(" "))
}

/// A passage whose word count falls inside `setting`'s band.
pub fn passage_text(seed: u64, key: &str, setting: LengthSetting) -> String {
    let mut rng = keyed_rng(seed, key);
    let target = setting.target_words();
    let mut sentences = Vec::new();
    let mut n = 0;
    // Sentences of at most 10 words overshoot the target by at most 9, inside the ±10 band.
    while n < target {
        let len = rng.gen_range(5..=10);
        sentences.push(sentence(&mut rng, len));
        n += len;
    }
    sentences.join(" ")
}

/// Multi-paragraph prose of roughly `words` words.
pub fn document_text(seed: u64, key: &str, words: usize) -> String {
    let mut rng = keyed_rng(seed, key);
    let mut paragraphs = Vec::new();
    let mut n = 0;
    while n < words {
        let mut para = Vec::new();
        for _ in 0..rng.gen_range(3..=7) {
            let len = rng.gen_range(6..=14);
            para.push(sentence(&mut rng, len));
            n += len;
        }
        paragraphs.push(para.join(" "));
    }
    paragraphs.join("\n\n")
}

fn shuffled(text: &str, rng: &mut ChaCha8Rng) -> String {
    let mut words: Vec<String> = text
        .split_whitespace()
        .map(|w| w.trim_end_matches(['.', '!', '?']).to_lowercase())
        .filter(|w| !w.is_empty())
        .collect();
    words.shuffle(rng);
    if let Some(first) = words.first_mut() {
        *first = capitalize(first);
    }
    format!("{}.", words.join(" "))
}

/// Three word-order rewrites of `text`. Each passes [`check_paraphrase`]
/// whenever the text has enough distinct words to allow it.
pub fn paraphrase_variants(text: &str, seed: u64) -> [String; 3] {
    let mut out: Vec<String> = Vec::with_capacity(3);
    let mut rng = keyed_rng(seed, text);
    for attempt in 0..64u64 {
        if out.len() == 3 {
            break;
        }
        rng.set_stream(attempt);
        let candidate = shuffled(text, &mut rng);
        if candidate.trim() != text.trim()
            && !out.contains(&candidate)
            && check_paraphrase(text, out.len(), &candidate).is_ok()
        {
            out.push(candidate);
        }
    }
    // Degenerate input (too few distinct words): still return three distinct texts.
    while out.len() < 3 {
        out.push(format!("{} ({})", text.trim(), out.len() + 1));
    }
    out.try_into().expect("three variants")
}

/// Identity of a synthetic document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticDoc {
    pub doc_id: String,
    pub title: String,
    pub author: String,
    pub group: Group,
}

impl SyntheticDoc {
    pub fn new(doc_id: impl Into<String>, group: Group) -> Self {
        let doc_id = doc_id.into();
        SyntheticDoc {
            title: format!("The Book of {}", capitalize(&doc_id)),
            author: format!("{} Writer", NAMES[doc_id.len() % NAMES.len()]),
            doc_id,
            group,
        }
    }

    /// Publication year consistent with the group.
    pub fn year(&self) -> i32 {
        match self.group {
            Group::Clean => 2024,
            Group::Suspect => 2015,
        }
    }

    pub fn document(&self, seed: u64, words: usize) -> Result<Document, CorpusError> {
        Document::new(
            &self.doc_id,
            &self.title,
            &self.author,
            self.year(),
            self.group,
            document_text(seed, &self.doc_id, words),
        )
    }
}

/// `count` documents named `{prefix}{i:03}`.
pub fn synthetic_docs(prefix: &str, group: Group, count: usize) -> Vec<SyntheticDoc> {
    (0..count)
        .map(|i| SyntheticDoc::new(format!("{prefix}{i:03}"), group))
        .collect()
}

/// `n` items for `doc`, each a fresh synthetic passage with word-order paraphrases.
pub fn synthetic_items(
    doc: &SyntheticDoc,
    n: usize,
    setting: LengthSetting,
    seed: u64,
) -> Vec<McqaItem> {
    (0..n)
        .map(|i| {
            let passage_id = format!("{}-{}-{i:03}", doc.doc_id, setting);
            let text = passage_text(seed, &passage_id, setting);
            let meta = PassageMeta {
                passage_id,
                doc_id: doc.doc_id.clone(),
                title: doc.title.clone(),
                author: doc.author.clone(),
                group: doc.group,
                length_setting: setting,
            };
            let variants = paraphrase_variants(&text, seed);
            McqaItem::new(meta, text, variants.to_vec())
                .expect("synthetic passages have enough distinct words")
                .with_paraphrase_model("synthetic")
        })
        .collect()
}
