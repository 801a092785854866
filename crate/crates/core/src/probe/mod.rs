//! Permutation trials, evaluation prompts and document-level accuracy.

mod answer;
mod prompt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use answer::{parse_answer, Answer};
pub use prompt::{build_mcqa_prompt, split_mcqa_options, PromptStyle};

use crate::calibration::{apply_calibration, CalibrationVector};
use crate::paraphrase::McqaItem;
use crate::pool::map_ordered;
use crate::providers::{normalize_label_probs, Client, CompletionRequest, ProviderError};
use crate::types::Label;

/// Trials per item: every ordering of four options.
pub const PERMUTATIONS: usize = 24;
/// Evaluation temperature.
pub const PROBE_TEMPERATURE: f64 = 0.0;

/// One ordering of an item's four sources. `ordering[pos]` is the source
/// index shown at position `pos`; source 0 is the verbatim passage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationTrial {
    pub trial_id: String,
    pub passage_id: String,
    pub ordering: [usize; 4],
    pub correct_label: Label,
    pub options: [String; 4],
}

/// All 24 permutations of `[0, 1, 2, 3]` in lexicographic order.
pub fn orderings() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(PERMUTATIONS);
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let p = [a, b, c, d];
                    if (0..4).all(|x| p.contains(&x)) {
                        out.push(p);
                    }
                }
            }
        }
    }
    out
}

pub fn correct_label(ordering: &[usize; 4]) -> Label {
    let pos = ordering
        .iter()
        .position(|&s| s == 0)
        .expect("ordering is a permutation");
    Label::ALL[pos]
}

pub fn enumerate_permutations(item: &McqaItem) -> Vec<PermutationTrial> {
    let sources = item.sources();
    orderings()
        .into_iter()
        .enumerate()
        .map(|(n, ordering)| PermutationTrial {
            trial_id: format!("{}#{n:02}", item.meta.passage_id),
            passage_id: item.meta.passage_id.clone(),
            ordering,
            correct_label: correct_label(&ordering),
            options: ordering.map(|s| sources[s].to_string()),
        })
        .collect()
}

/// Outcome of one trial, as written to the transcript.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial_id: String,
    pub passage_id: String,
    pub ordering: [usize; 4],
    pub correct_label: Label,
    pub predicted_label: Answer,
    /// Label probabilities renormalized over A-D, before any calibration.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_probs: Option<[f64; 4]>,
    pub raw_response: String,
    pub model: String,
    pub timestamp: String,
}

impl TrialResult {
    pub fn is_correct(&self) -> bool {
        self.predicted_label == Answer::Label(self.correct_label)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentScore {
    pub doc_id: String,
    pub n_trials: usize,
    pub n_correct: usize,
    pub accuracy: f64,
    pub refusal_count: usize,
    /// Calibrated trials that fell back to the text answer for lack of label probabilities.
    #[serde(default)]
    pub missing_logprobs: usize,
}

impl DocumentScore {
    pub fn from_results(doc_id: &str, results: &[TrialResult], missing_logprobs: usize) -> Self {
        let n_trials = results.len();
        let n_correct = results.iter().filter(|r| r.is_correct()).count();
        DocumentScore {
            doc_id: doc_id.to_string(),
            n_trials,
            n_correct,
            accuracy: if n_trials == 0 {
                0.0
            } else {
                n_correct as f64 / n_trials as f64
            },
            refusal_count: results
                .iter()
                .filter(|r| r.predicted_label == Answer::Refusal)
                .count(),
            missing_logprobs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeOptions {
    pub style: PromptStyle,
    pub temperature: f64,
    pub workers: usize,
    pub max_tokens: u32,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            style: PromptStyle::Chat,
            temperature: PROBE_TEMPERATURE,
            workers: 4,
            max_tokens: 8,
        }
    }
}

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("items span several documents ({0} and {1})")]
    MixedDocuments(String, String),
    #[error("calibration needs label probabilities, which {0} does not provide")]
    NoLabelProbs(String),
    #[error("trial {trial_id}: {source}")]
    Trial {
        trial_id: String,
        #[source]
        source: ProviderError,
    },
}

/// Runs every permutation trial of `items`. With `want_probs`, label
/// probabilities are requested too; a trial whose reply lacks some label keeps
/// its text answer and `label_probs: None`.
pub fn run_trials(
    client: &Client,
    items: &[McqaItem],
    want_probs: bool,
    opts: &ProbeOptions,
) -> Result<Vec<TrialResult>, ProbeError> {
    if want_probs && !client.capabilities().label_probs {
        return Err(ProbeError::NoLabelProbs(client.model_name().to_string()));
    }
    let jobs: Vec<(&McqaItem, PermutationTrial)> = items
        .iter()
        .flat_map(|item| {
            enumerate_permutations(item)
                .into_iter()
                .map(move |t| (item, t))
        })
        .collect();
    let outcomes = map_ordered(&jobs, opts.workers, |(item, trial)| {
        run_trial(client, item, trial, want_probs, opts).map_err(|source| ProbeError::Trial {
            trial_id: trial.trial_id.clone(),
            source,
        })
    });
    outcomes.into_iter().collect()
}

fn run_trial(
    client: &Client,
    item: &McqaItem,
    trial: &PermutationTrial,
    want_probs: bool,
    opts: &ProbeOptions,
) -> Result<TrialResult, ProviderError> {
    let prompt = build_mcqa_prompt(trial, &item.meta.title, &item.meta.author, opts.style);
    let request = CompletionRequest::new(prompt, opts.temperature, opts.max_tokens);
    let (raw_response, label_probs) = if want_probs {
        let completion = client.label_completion(&request)?;
        match normalize_label_probs(&completion.label_probs) {
            Ok(p) => (completion.text, Some(p)),
            Err(ProviderError::MissingLogprobs) => (completion.text, None),
            Err(e) => return Err(e),
        }
    } else {
        (client.complete(&request)?, None)
    };
    Ok(TrialResult {
        trial_id: trial.trial_id.clone(),
        passage_id: trial.passage_id.clone(),
        ordering: trial.ordering,
        correct_label: trial.correct_label,
        predicted_label: parse_answer(&raw_response),
        label_probs,
        raw_response,
        model: client.model_name().to_string(),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    })
}

/// Document accuracy over all 24 permutations of each item, at
/// `opts.temperature` (0 unless overridden).
///
/// With a calibration vector the prediction is the argmax of calibrated label
/// probabilities; otherwise it is the label parsed from the reply. Returns the
/// transcript alongside the score.
pub fn score_document(
    client: &Client,
    items: &[McqaItem],
    calibration: Option<&CalibrationVector>,
    opts: &ProbeOptions,
) -> Result<(DocumentScore, Vec<TrialResult>), ProbeError> {
    let doc_id = match items.first() {
        Some(first) => first.meta.doc_id.clone(),
        None => String::new(),
    };
    if let Some(other) = items.iter().find(|i| i.meta.doc_id != doc_id) {
        return Err(ProbeError::MixedDocuments(
            doc_id,
            other.meta.doc_id.clone(),
        ));
    }
    let mut results = run_trials(client, items, calibration.is_some(), opts)?;
    let mut missing = 0;
    if let Some(cal) = calibration {
        for r in &mut results {
            match r.label_probs {
                Some(p) => r.predicted_label = Answer::Label(apply_calibration(&p, cal).1),
                None => missing += 1,
            }
        }
        if missing > 0 {
            log::warn!("{doc_id}: {missing} trials lacked label probabilities; used text answers");
        }
    }
    Ok((
        DocumentScore::from_results(&doc_id, &results, missing),
        results,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paraphrase::PassageMeta;
    use crate::types::{Group, LengthSetting};
    use std::collections::{BTreeMap, HashSet};

    fn item() -> McqaItem {
        let meta = PassageMeta {
            passage_id: "doc-short64-000".into(),
            doc_id: "doc".into(),
            title: "A Title".into(),
            author: "An Author".into(),
            group: Group::Suspect,
            length_setting: LengthSetting::Short64,
        };
        McqaItem::new(
            meta,
            "The original words go here.",
            vec![
                "Here go the first rewrite.".into(),
                "Second rewrite sits right here.".into(),
                "A third rewrite is placed here.".into(),
            ],
        )
        .unwrap()
    }

    #[test]
    fn twenty_four_balanced_trials() {
        let trials = enumerate_permutations(&item());
        assert_eq!(trials.len(), 24);
        let distinct: HashSet<_> = trials.iter().map(|t| t.ordering).collect();
        assert_eq!(distinct.len(), 24);
        let mut hist = BTreeMap::new();
        for t in &trials {
            *hist.entry(t.correct_label).or_insert(0) += 1;
            assert_eq!(t.options[t.correct_label.index()], item().original());
        }
        assert!(hist.values().all(|&n| n == 6));
        assert_eq!(trials[0].ordering, [0, 1, 2, 3]);
        assert_eq!(trials[0].trial_id, "doc-short64-000#00");
        let mut sorted = trials.iter().map(|t| t.ordering).collect::<Vec<_>>();
        sorted.sort();
        assert_eq!(
            sorted,
            trials.iter().map(|t| t.ordering).collect::<Vec<_>>()
        );
    }

    #[test]
    fn correct_label_is_position_of_original() {
        assert_eq!(correct_label(&[0, 1, 2, 3]), Label::A);
        assert_eq!(correct_label(&[2, 3, 0, 1]), Label::C);
    }

    #[test]
    fn prompts_round_trip_options() {
        for style in [PromptStyle::Chat, PromptStyle::SystemUser] {
            for t in enumerate_permutations(&item()) {
                let p = build_mcqa_prompt(&t, "A Title", "An Author", style);
                let opts = split_mcqa_options(p.user_text()).unwrap();
                assert_eq!(opts.map(str::to_string), t.options);
            }
        }
        assert!(split_mcqa_options("Continue this sentence").is_none());
    }

    #[test]
    fn orderings_differ_only_in_option_bodies() {
        let trials = enumerate_permutations(&item());
        let a = build_mcqa_prompt(&trials[0], "T", "U", PromptStyle::Chat).full_text();
        let b = build_mcqa_prompt(&trials[7], "T", "U", PromptStyle::Chat).full_text();
        let strip = |s: &str, t: &PermutationTrial| {
            t.options
                .iter()
                .fold(s.to_string(), |acc, o| acc.replacen(o.as_str(), "", 1))
        };
        assert_ne!(a, b);
        assert_eq!(strip(&a, &trials[0]), strip(&b, &trials[7]));
    }
}
