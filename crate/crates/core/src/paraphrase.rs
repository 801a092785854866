//! Paraphrase generation and the multiple-choice item it produces.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{Document, Passage};
use crate::providers::{Client, CompletionRequest, Prompt, ProviderError};
use crate::types::{word_count, Group, Label, LengthSetting};

/// Sampling temperature for paraphrasing: a little variety between the three rewrites.
pub const PARAPHRASE_TEMPERATURE: f64 = 0.1;
pub const DEFAULT_RETRIES: u32 = 3;
/// Maximum relative word-count difference between a paraphrase and its original.
pub const MAX_LENGTH_DEVIATION: f64 = 0.40;
/// Minimum normalized character edit distance from the original.
pub const MIN_EDIT_DISTANCE: f64 = 0.15;

const SHORT_PROMPT: &str = "Generate always 3 possible paraphrases for the following text that is identified as Example A: <text>.\n\
Format your output as:\n\
Example B: <paraphrase 1>\n\
\n\
Example C: <paraphrase 2>\n\
\n\
Example D: <paraphrase 3>\n\
\n\
--\n\
Example A: ";

const LONG_PROMPT: &str = "Rewrite this entire text (all sentences with no exception) expressing the same meaning using different words. Aim to keep the rewriting similar in length to the original text.\n\
Do it three times. The text to be rewritten is identified as <Example A>.\n\
Format your output as:\n\
Example B: <insert paraphrase B>\n\
\n\
Example C: <insert paraphrase C>\n\
\n\
Example D: <insert paraphrase D>\n\
\n\
--\n\
Example A: ";

const MARKERS: [(&str, Label); 3] = [
    ("Example B:", Label::B),
    ("Example C:", Label::C),
    ("Example D:", Label::D),
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ItemError {
    #[error("expected 3 paraphrases, got {0}")]
    WrongCount(usize),
    #[error("original passage is empty")]
    EmptyOriginal,
    #[error("paraphrase {0} equals the original")]
    SameAsOriginal(usize),
    #[error("paraphrases {0} and {1} are identical")]
    Duplicate(usize, usize),
    #[error("paraphrase {index} has {words} words against {original} in the original")]
    LengthOutOfRange {
        index: usize,
        words: usize,
        original: usize,
    },
    #[error("paraphrase {index} is a near copy (edit distance {distance:.3})")]
    TooSimilar { index: usize, distance: f64 },
}

#[derive(Debug, Error)]
pub enum ParaphraseError {
    #[error("response lacks marker for option {0}")]
    MissingMarker(Label),
    #[error("paraphrase for option {0} is empty")]
    EmptyParaphrase(Label),
    #[error(transparent)]
    Invalid(#[from] ItemError),
    #[error("no valid paraphrases after {attempts} attempts; last error: {last_error}")]
    Failure {
        attempts: u32,
        last_error: String,
        last_response: String,
    },
    #[error(transparent)]
    Provider(#[from] ProviderError),
}

/// Identification and provenance shared by a passage's item and its trials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassageMeta {
    pub passage_id: String,
    pub doc_id: String,
    pub title: String,
    pub author: String,
    pub group: Group,
    pub length_setting: LengthSetting,
}

impl PassageMeta {
    pub fn for_passage(passage: &Passage, doc: &Document) -> Self {
        PassageMeta {
            passage_id: passage.passage_id().to_string(),
            doc_id: doc.doc_id().to_string(),
            title: doc.title().to_string(),
            author: doc.author().to_string(),
            group: doc.group(),
            length_setting: passage.length_setting(),
        }
    }
}

/// One verbatim passage and exactly three paraphrases of it.
#[derive(Debug, Clone, PartialEq)]
pub struct McqaItem {
    pub meta: PassageMeta,
    original: String,
    paraphrases: [String; 3],
    paraphrase_model: Option<String>,
    stored_label: Label,
}

/// On-disk benchmark record; `options[label]` is the verbatim passage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    pub passage_id: String,
    pub doc_id: String,
    pub title: String,
    pub author: String,
    pub group: Group,
    pub length_setting: LengthSetting,
    pub options: [String; 4],
    pub label: Label,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paraphrase_model: Option<String>,
}

impl McqaItem {
    pub fn new(
        meta: PassageMeta,
        original: impl Into<String>,
        paraphrases: Vec<String>,
    ) -> Result<Self, ItemError> {
        let original = original.into();
        check_item(&original, &paraphrases)?;
        let paraphrases: [String; 3] = paraphrases.try_into().expect("count checked");
        Ok(McqaItem {
            meta,
            original,
            paraphrases,
            paraphrase_model: None,
            stored_label: Label::A,
        })
    }

    pub fn with_paraphrase_model(mut self, model: impl Into<String>) -> Self {
        self.paraphrase_model = Some(model.into());
        self
    }

    /// Position of the original when the item is written out. Items start in
    /// canonical form with the original at A.
    pub fn with_stored_label(mut self, label: Label) -> Self {
        self.stored_label = label;
        self
    }

    pub fn original(&self) -> &str {
        &self.original
    }

    pub fn paraphrases(&self) -> &[String; 3] {
        &self.paraphrases
    }

    pub fn paraphrase_model(&self) -> Option<&str> {
        self.paraphrase_model.as_deref()
    }

    pub fn stored_label(&self) -> Label {
        self.stored_label
    }

    /// Source texts indexed for permutation: 0 is the original, 1..=3 the paraphrases.
    pub fn sources(&self) -> [&str; 4] {
        [
            &self.original,
            &self.paraphrases[0],
            &self.paraphrases[1],
            &self.paraphrases[2],
        ]
    }

    pub fn to_record(&self) -> BenchmarkRecord {
        let mut rest = self.paraphrases.iter();
        let options = std::array::from_fn(|i| {
            if i == self.stored_label.index() {
                self.original.clone()
            } else {
                rest.next().expect("three paraphrases").clone()
            }
        });
        BenchmarkRecord {
            passage_id: self.meta.passage_id.clone(),
            doc_id: self.meta.doc_id.clone(),
            title: self.meta.title.clone(),
            author: self.meta.author.clone(),
            group: self.meta.group,
            length_setting: self.meta.length_setting,
            options,
            label: self.stored_label,
            paraphrase_model: self.paraphrase_model.clone(),
        }
    }

    pub fn from_record(record: BenchmarkRecord) -> Result<Self, ItemError> {
        let label = record.label;
        let mut original = String::new();
        let mut paraphrases = Vec::with_capacity(3);
        for (i, o) in record.options.into_iter().enumerate() {
            if i == label.index() {
                original = o;
            } else {
                paraphrases.push(o);
            }
        }
        let meta = PassageMeta {
            passage_id: record.passage_id,
            doc_id: record.doc_id,
            title: record.title,
            author: record.author,
            group: record.group,
            length_setting: record.length_setting,
        };
        let mut item = McqaItem::new(meta, original, paraphrases)?.with_stored_label(label);
        item.paraphrase_model = record.paraphrase_model;
        Ok(item)
    }
}

fn check_item(original: &str, paraphrases: &[String]) -> Result<(), ItemError> {
    if paraphrases.len() != 3 {
        return Err(ItemError::WrongCount(paraphrases.len()));
    }
    let original_words = word_count(original);
    if original_words == 0 {
        return Err(ItemError::EmptyOriginal);
    }
    for (i, p) in paraphrases.iter().enumerate() {
        if p.trim() == original.trim() {
            return Err(ItemError::SameAsOriginal(i));
        }
        for (j, q) in paraphrases.iter().enumerate().skip(i + 1) {
            if p.trim() == q.trim() {
                return Err(ItemError::Duplicate(i, j));
            }
        }
        let words = word_count(p);
        let deviation = (words as f64 - original_words as f64).abs() / original_words as f64;
        if deviation > MAX_LENGTH_DEVIATION {
            return Err(ItemError::LengthOutOfRange {
                index: i,
                words,
                original: original_words,
            });
        }
    }
    Ok(())
}

/// Checks one paraphrase against the original: word count within
/// [`MAX_LENGTH_DEVIATION`] and normalized character edit distance at least
/// [`MIN_EDIT_DISTANCE`].
pub fn check_paraphrase(original: &str, index: usize, paraphrase: &str) -> Result<(), ItemError> {
    let original_words = word_count(original);
    let words = word_count(paraphrase);
    let deviation = (words as f64 - original_words as f64).abs() / original_words.max(1) as f64;
    if deviation > MAX_LENGTH_DEVIATION {
        return Err(ItemError::LengthOutOfRange {
            index,
            words,
            original: original_words,
        });
    }
    let distance = 1.0 - strsim::normalized_levenshtein(original, paraphrase);
    if distance < MIN_EDIT_DISTANCE {
        return Err(ItemError::TooSimilar { index, distance });
    }
    Ok(())
}

/// Item invariants plus [`check_paraphrase`] on each of the three.
pub fn quality_gate(original: &str, paraphrases: &[String]) -> Result<(), ItemError> {
    check_item(original, paraphrases)?;
    for (index, p) in paraphrases.iter().enumerate() {
        check_paraphrase(original, index, p)?;
    }
    Ok(())
}

/// Paraphrase prompt for the passage's length: the long setting uses the
/// rewrite-everything wording, shorter ones the three-paraphrases wording.
pub fn build_paraphrase_prompt(setting: LengthSetting, ref_text: &str) -> String {
    let head = match setting {
        LengthSetting::Short64 | LengthSetting::Medium128 => SHORT_PROMPT,
        LengthSetting::Long256 => LONG_PROMPT,
    };
    format!("{head}{ref_text}")
}

/// The reference text of a prompt built by [`build_paraphrase_prompt`].
pub fn parse_paraphrase_prompt(prompt: &str) -> Option<&str> {
    prompt
        .strip_prefix(SHORT_PROMPT)
        .or_else(|| prompt.strip_prefix(LONG_PROMPT))
}

/// Extracts the bodies after `Example B:`, `Example C:` and `Example D:`.
/// Prose before the first marker is ignored.
pub fn parse_paraphrase_response(response: &str) -> Result<[String; 3], ParaphraseError> {
    let mut starts = [0usize; 3];
    let mut from = 0;
    for (k, (marker, label)) in MARKERS.iter().enumerate() {
        let pos = response[from..]
            .find(marker)
            .ok_or(ParaphraseError::MissingMarker(*label))?;
        starts[k] = from + pos;
        from = from + pos + marker.len();
    }
    let mut out: [String; 3] = Default::default();
    for k in 0..3 {
        let body_start = starts[k] + MARKERS[k].0.len();
        let body_end = if k < 2 { starts[k + 1] } else { response.len() };
        let mut body = &response[body_start..body_end];
        if k == 2 {
            if let Some(cut) = body.find("\n--") {
                body = &body[..cut];
            }
        }
        let body = body.trim();
        if body.is_empty() {
            return Err(ParaphraseError::EmptyParaphrase(MARKERS[k].1));
        }
        out[k] = body.to_string();
    }
    Ok(out)
}

/// Renders three paraphrases in the format the prompt asks for.
pub fn format_paraphrase_response(paraphrases: &[String; 3]) -> String {
    format!(
        "Example B: {}\n\nExample C: {}\n\nExample D: {}",
        paraphrases[0], paraphrases[1], paraphrases[2]
    )
}

/// Asks the client for three paraphrases of `passage` at temperature 0.1,
/// retrying up to `retries` times when the reply does not parse or fails
/// validation.
pub fn generate_paraphrases(
    client: &Client,
    passage: &Passage,
    doc: &Document,
    retries: u32,
) -> Result<McqaItem, ParaphraseError> {
    generate_paraphrases_at(client, passage, doc, retries, PARAPHRASE_TEMPERATURE)
}

/// [`generate_paraphrases`] at an explicit temperature.
pub fn generate_paraphrases_at(
    client: &Client,
    passage: &Passage,
    doc: &Document,
    retries: u32,
    temperature: f64,
) -> Result<McqaItem, ParaphraseError> {
    let prompt = build_paraphrase_prompt(passage.length_setting(), passage.text());
    // Roughly two tokens per word for three rewrites plus markers.
    let max_tokens = (passage.word_count() as u32 * 3 + 16) * 2;
    let attempts = retries + 1;
    let mut last_error = String::new();
    let mut last_response = String::new();
    for attempt in 0..attempts {
        let mut request =
            CompletionRequest::new(Prompt::Single(prompt.clone()), temperature, max_tokens);
        request.attempt = attempt;
        let response = client.complete(&request)?;
        let outcome = parse_paraphrase_response(&response).and_then(|ps| {
            quality_gate(passage.text(), &ps)?;
            Ok(McqaItem::new(
                PassageMeta::for_passage(passage, doc),
                passage.text(),
                ps.to_vec(),
            )?
            .with_paraphrase_model(client.model_name()))
        });
        match outcome {
            Ok(item) => return Ok(item),
            Err(e) => {
                log::warn!(
                    "paraphrase attempt {}/{attempts} for {} failed: {e}",
                    attempt + 1,
                    passage.passage_id()
                );
                last_error = e.to_string();
                last_response = response;
            }
        }
    }
    Err(ParaphraseError::Failure {
        attempts,
        last_error,
        last_response,
    })
}
