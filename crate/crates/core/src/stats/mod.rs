//! Group-level evaluation: ROC AUC, separation threshold, bootstrap and t-test.

mod bootstrap;
mod report;
mod roc;
mod ttest;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bootstrap::{bootstrap_evaluate, BootstrapConfig, EvaluationResult, TTestMode};
pub use report::{detection_report, CalibrationStatus, DetectionReport, ReportMeta, ReportRow};
pub use roc::{best_threshold, roc_auc};
pub use ttest::{welch_t_test, TTestResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("the {0} group is empty")]
    EmptyGroup(&'static str),
    #[error("non-finite score {score} for {doc_id}")]
    NonFinite { doc_id: String, score: f64 },
    #[error("t-test needs at least 2 values per sample, got {0} and {1}")]
    TooFewSamples(usize, usize),
    #[error("bootstrap needs at least one iteration")]
    NoIterations,
}

/// Which way a score points when a document is a training member.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    #[default]
    HigherIsMember,
    LowerIsMember,
}

impl Direction {
    /// Maps a score so that larger always means "more likely a member".
    pub fn orient(self, score: f64) -> f64 {
        match self {
            Direction::HigherIsMember => score,
            Direction::LowerIsMember => -score,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::HigherIsMember => "higher_is_member",
            Direction::LowerIsMember => "lower_is_member",
        }
    }
}

/// Document scores of the suspect and clean groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupScores {
    pub suspect: Vec<(String, f64)>,
    pub clean: Vec<(String, f64)>,
    pub direction: Direction,
}

impl GroupScores {
    pub fn new(
        suspect: Vec<(String, f64)>,
        clean: Vec<(String, f64)>,
        direction: Direction,
    ) -> Result<Self, StatsError> {
        let g = GroupScores {
            suspect,
            clean,
            direction,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), StatsError> {
        if self.suspect.is_empty() {
            return Err(StatsError::EmptyGroup("suspect"));
        }
        if self.clean.is_empty() {
            return Err(StatsError::EmptyGroup("clean"));
        }
        if let Some((doc_id, score)) = self
            .suspect
            .iter()
            .chain(&self.clean)
            .find(|(_, s)| !s.is_finite())
        {
            return Err(StatsError::NonFinite {
                doc_id: doc_id.clone(),
                score: *score,
            });
        }
        Ok(())
    }
}

pub(crate) fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population standard deviation (divides by n).
pub(crate) fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64).sqrt()
}
