//! Label-prior calibration estimated on clean documents.
//!
//! Each label's average probability `P̄` over clean documents is pushed back to
//! 0.25 by an additive adjustment `Δ = 0.25 - P̄`, applied before argmax.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::paraphrase::McqaItem;
use crate::probe::{run_trials, ProbeError, ProbeOptions};
use crate::providers::Client;
use crate::types::{Group, Label};

pub const DEFAULT_MIN_DOCS: usize = 5;
pub const RECOMMENDED_DOCS: usize = 30;
/// A calibrated document passes when every label mean lies in this interval.
pub const WELL_CALIBRATED: (f64, f64) = (0.15, 0.35);
const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("{found} clean documents with usable trials; at least {min} required")]
    InsufficientCleanDocs { found: usize, min: usize },
    #[error("document {0} is not in the clean group")]
    NotClean(String),
    #[error("document {0} is both a calibration source and a probe target")]
    Overlap(String),
    #[error("invalid calibration vector: {0}")]
    Invalid(String),
    #[error(transparent)]
    Probe(#[from] ProbeError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Format {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

/// Per-label additive adjustments. `P̄` is recoverable as `0.25 - delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationVector {
    pub model: String,
    pub delta: [f64; 4],
    pub source_doc_count: usize,
    pub source_trial_count: usize,
    #[serde(default)]
    pub excluded_trials: usize,
    #[serde(default)]
    pub source_doc_ids: Vec<String>,
    pub created_at: String,
}

impl CalibrationVector {
    /// Builds a vector from the across-document mean label probabilities.
    pub fn from_means(model: impl Into<String>, mean: [f64; 4]) -> Result<Self, CalibrationError> {
        let cal = CalibrationVector {
            model: model.into(),
            delta: mean.map(|p| 0.25 - p),
            source_doc_count: 0,
            source_trial_count: 0,
            excluded_trials: 0,
            source_doc_ids: Vec::new(),
            created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        };
        cal.validate()?;
        Ok(cal)
    }

    pub fn zero(model: impl Into<String>) -> Self {
        Self::from_means(model, [0.25; 4]).expect("zero vector is valid")
    }

    pub fn validate(&self) -> Result<(), CalibrationError> {
        let sum: f64 = self.delta.iter().sum();
        if sum.abs() > SUM_TOLERANCE {
            return Err(CalibrationError::Invalid(format!(
                "deltas sum to {sum}, not 0"
            )));
        }
        if let Some(d) = self
            .delta
            .iter()
            .find(|d| !(-0.75 - SUM_TOLERANCE..=0.25 + SUM_TOLERANCE).contains(*d))
        {
            return Err(CalibrationError::Invalid(format!(
                "delta {d} outside [-0.75, 0.25]"
            )));
        }
        Ok(())
    }

    /// Average label probabilities on the source documents.
    pub fn mean_probs(&self) -> [f64; 4] {
        self.delta.map(|d| 0.25 - d)
    }

    /// Fails if any of `doc_ids` was used to estimate this vector.
    pub fn ensure_disjoint<'a>(
        &self,
        doc_ids: impl IntoIterator<Item = &'a str>,
    ) -> Result<(), CalibrationError> {
        for id in doc_ids {
            if self.source_doc_ids.iter().any(|s| s == id) {
                return Err(CalibrationError::Overlap(id.to_string()));
            }
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<(), CalibrationError> {
        let io = |source| CalibrationError::Io {
            path: path.display().to_string(),
            source,
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(io)?;
        }
        let text = serde_json::to_string_pretty(self).expect("vector serializes");
        std::fs::write(path, text + "\n").map_err(io)
    }

    pub fn load(path: &Path) -> Result<Self, CalibrationError> {
        let text = std::fs::read_to_string(path).map_err(|source| CalibrationError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let cal: CalibrationVector =
            serde_json::from_str(&text).map_err(|source| CalibrationError::Format {
                path: path.display().to_string(),
                source,
            })?;
        cal.validate()?;
        Ok(cal)
    }
}

/// Adds the adjustments and takes the argmax, ties going to the earlier label.
/// Adjusted values are not renormalized and may be negative.
pub fn apply_calibration(label_probs: &[f64; 4], cal: &CalibrationVector) -> ([f64; 4], Label) {
    let adjusted = std::array::from_fn(|i| label_probs[i] + cal.delta[i]);
    (adjusted, argmax(&adjusted))
}

pub fn argmax(values: &[f64; 4]) -> Label {
    let mut best = 0;
    for i in 1..4 {
        if values[i] > values[best] {
            best = i;
        }
    }
    Label::ALL[best]
}

/// Mean of each label's probability over one document's trials.
pub fn mean_label_probs(probs: &[[f64; 4]]) -> Option<[f64; 4]> {
    if probs.is_empty() {
        return None;
    }
    let n = probs.len() as f64;
    Some(std::array::from_fn(|l| {
        probs.iter().map(|p| p[l]).sum::<f64>() / n
    }))
}

/// Two-stage average: per-document means first, then their mean, so long
/// documents carry no extra weight.
pub fn across_document_mean(per_doc: &[[f64; 4]]) -> Option<[f64; 4]> {
    mean_label_probs(per_doc)
}

/// Result of estimating a calibration vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationRun {
    pub vector: CalibrationVector,
    /// Raw (uncalibrated) mean label probabilities of each source document.
    pub doc_means: Vec<(String, [f64; 4])>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationOptions {
    pub min_docs: usize,
    pub probe: ProbeOptions,
}

impl Default for CalibrationOptions {
    fn default() -> Self {
        CalibrationOptions {
            min_docs: DEFAULT_MIN_DOCS,
            probe: ProbeOptions::default(),
        }
    }
}

/// Probes every item of every clean document under all 24 orderings,
/// collecting label probabilities, and derives `Δ = 0.25 - P̄`.
///
/// Trials without a full set of label probabilities are excluded and counted.
pub fn compute_calibration(
    client: &Client,
    docs: &[(String, Vec<McqaItem>)],
    opts: &CalibrationOptions,
) -> Result<CalibrationRun, CalibrationError> {
    for (doc_id, items) in docs {
        if items.iter().any(|i| i.meta.group != Group::Clean) {
            return Err(CalibrationError::NotClean(doc_id.clone()));
        }
    }
    if docs.len() < RECOMMENDED_DOCS {
        log::warn!(
            "calibrating on {} documents; {RECOMMENDED_DOCS} are recommended",
            docs.len()
        );
    }
    let mut doc_means = Vec::new();
    let mut trials = 0;
    let mut excluded = 0;
    for (doc_id, items) in docs {
        let results = run_trials(client, items, true, &opts.probe)?;
        let probs: Vec<[f64; 4]> = results.iter().filter_map(|r| r.label_probs).collect();
        excluded += results.len() - probs.len();
        trials += probs.len();
        match mean_label_probs(&probs) {
            Some(mean) => doc_means.push((doc_id.clone(), mean)),
            None => log::warn!("{doc_id}: no trial returned label probabilities; skipped"),
        }
    }
    if excluded > 0 {
        log::warn!("{excluded} trials excluded for missing label probabilities");
    }
    if doc_means.len() < opts.min_docs {
        return Err(CalibrationError::InsufficientCleanDocs {
            found: doc_means.len(),
            min: opts.min_docs,
        });
    }
    let means: Vec<[f64; 4]> = doc_means.iter().map(|(_, m)| *m).collect();
    let overall = across_document_mean(&means).expect("at least one document");
    let mut vector = CalibrationVector::from_means(client.model_name(), overall)?;
    vector.source_doc_count = doc_means.len();
    vector.source_trial_count = trials;
    vector.excluded_trials = excluded;
    vector.source_doc_ids = doc_means.iter().map(|(id, _)| id.clone()).collect();
    Ok(CalibrationRun { vector, doc_means })
}

/// Per-document verdicts of the well-calibrated check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCheck {
    pub per_doc: Vec<bool>,
    pub proportion: f64,
}

/// A document is well calibrated when all four of its adjusted mean label
/// probabilities fall inside [`WELL_CALIBRATED`].
pub fn check_calibration(per_doc_label_means: &[[f64; 4]]) -> CalibrationCheck {
    let (lo, hi) = WELL_CALIBRATED;
    let per_doc: Vec<bool> = per_doc_label_means
        .iter()
        .map(|m| m.iter().all(|p| (lo..=hi).contains(p)))
        .collect();
    let passing = per_doc.iter().filter(|b| **b).count();
    let proportion = if per_doc.is_empty() {
        0.0
    } else {
        passing as f64 / per_doc.len() as f64
    };
    CalibrationCheck {
        per_doc,
        proportion,
    }
}

/// Raw per-document means shifted by the calibration adjustments.
pub fn adjusted_means(raw: &[[f64; 4]], cal: &CalibrationVector) -> Vec<[f64; 4]> {
    raw.iter()
        .map(|m| std::array::from_fn(|i| m[i] + cal.delta[i]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64; 4], b: &[f64; 4]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    #[test]
    fn uniform_means_give_zero_delta() {
        assert_eq!(
            CalibrationVector::from_means("m", [0.25; 4]).unwrap().delta,
            [0.0; 4]
        );
    }

    #[test]
    fn constant_bias_delta() {
        let cal = CalibrationVector::from_means("m", [0.55, 0.15, 0.15, 0.15]).unwrap();
        assert!(close(&cal.delta, &[-0.30, 0.10, 0.10, 0.10]));
    }

    #[test]
    fn apply_examples() {
        let zero = CalibrationVector::zero("m");
        assert_eq!(apply_calibration(&[0.25; 4], &zero).1, Label::A);
        let cal = CalibrationVector {
            delta: [-0.2, 0.0, 0.0, 0.0],
            ..zero.clone()
        };
        let (adj, label) = apply_calibration(&[0.4, 0.3, 0.2, 0.1], &cal);
        assert!(close(&adj, &[0.2, 0.3, 0.2, 0.1]));
        assert_eq!(label, Label::B);
    }

    #[test]
    fn one_hot_survives_any_valid_delta() {
        let cal = CalibrationVector {
            delta: [-0.75, 0.25, 0.25, 0.25],
            ..CalibrationVector::zero("m")
        };
        for l in Label::ALL {
            let mut p = [0.0; 4];
            p[l.index()] = 1.0;
            assert_eq!(apply_calibration(&p, &cal).1, l);
        }
    }

    #[test]
    fn check_examples() {
        let c = check_calibration(&[[0.25; 4], [0.40, 0.20, 0.20, 0.20]]);
        assert_eq!(c.per_doc, vec![true, false]);
        assert_eq!(c.proportion, 0.5);
    }

    #[test]
    fn two_stage_average() {
        // Doc 1 has three trials, doc 2 one; each document weighs the same.
        let d1 = mean_label_probs(&[[1.0, 0.0, 0.0, 0.0]; 3]).unwrap();
        let d2 = mean_label_probs(&[[0.0, 1.0, 0.0, 0.0]]).unwrap();
        assert_eq!(
            across_document_mean(&[d1, d2]).unwrap(),
            [0.5, 0.5, 0.0, 0.0]
        );
    }

    #[test]
    fn validation_and_round_trip() {
        let bad = CalibrationVector {
            delta: [0.1, 0.0, 0.0, 0.0],
            ..CalibrationVector::zero("m")
        };
        assert!(bad.validate().is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cal.json");
        let mut cal = CalibrationVector::from_means("m", [0.4, 0.3, 0.2, 0.1]).unwrap();
        cal.source_doc_ids = vec!["c1".into()];
        cal.save(&path).unwrap();
        let back = CalibrationVector::load(&path).unwrap();
        assert_eq!(back, cal);
        assert!(back.ensure_disjoint(["s1"]).is_ok());
        assert!(matches!(
            back.ensure_disjoint(["c1"]),
            Err(CalibrationError::Overlap(_))
        ));
    }
}
