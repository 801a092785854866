//! File-based stage commands behind the `decop` binary.
//!
//! Every command reads its inputs from files, writes its artifacts plus a
//! `status.json` into an output directory, and goes through the response
//! cache, so a rerun with an unchanged cache makes no provider calls.

mod client;
mod commands;
mod config;
mod files;
mod simulate;

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use client::{build_client, credential, simulated_config};
pub use commands::{
    cmd_baseline, cmd_calibrate, cmd_evaluate, cmd_extract, cmd_paraphrase, cmd_probe, cmd_report,
    BaselineArgs, CalibrateArgs, EvaluateArgs, EvaluationFile, ExtractArgs, ParaphraseArgs,
    ProbeArgs, ReportArgs,
};
pub use config::{
    BaselineConfig, ProviderConfig, ProviderKind, RateLimitConfig, RunConfig, SimulationConfig,
    Temperatures,
};
pub use files::{read_jsonl, write_jsonl};
pub use simulate::{cmd_simulate, SimulateArgs};

use crate::providers::CallCounts;
use crate::stats::Direction;
use crate::types::Group;

pub const STATUS_FILE: &str = "status.json";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("missing input {what}: {path} does not exist")]
    MissingInput { what: &'static str, path: PathBuf },
    #[error("credential environment variable {0} is not set")]
    Credentials(&'static str),
    #[error("{path}: {message}")]
    File { path: PathBuf, message: String },
    #[error(transparent)]
    Corpus(#[from] crate::corpus::CorpusError),
    #[error(transparent)]
    Provider(#[from] crate::providers::ProviderError),
    #[error(transparent)]
    Calibration(#[from] crate::calibration::CalibrationError),
    #[error(transparent)]
    Stats(#[from] crate::stats::StatsError),
}

impl PipelineError {
    pub(crate) fn file(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        PipelineError::File {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

/// A document a command could not finish.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Incomplete {
    pub doc_id: String,
    pub error: String,
}

/// Machine-readable outcome of a command, written as `status.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Status {
    pub command: String,
    pub ok: bool,
    pub config_hash: String,
    pub completed: Vec<String>,
    pub incomplete: Vec<Incomplete>,
    pub outputs: Vec<PathBuf>,
    pub provider_calls: u64,
    pub cache_hits: u64,
    pub retries: u64,
}

impl Status {
    pub(crate) fn new(command: &str, cfg: &RunConfig) -> Self {
        Status {
            command: command.to_string(),
            ok: true,
            config_hash: cfg.config_hash(),
            completed: Vec::new(),
            incomplete: Vec::new(),
            outputs: Vec::new(),
            provider_calls: 0,
            cache_hits: 0,
            retries: 0,
        }
    }

    pub(crate) fn add_counts(&mut self, c: CallCounts) {
        self.provider_calls += c.provider_calls;
        self.cache_hits += c.cache_hits;
        self.retries += c.retries;
    }

    pub(crate) fn fail(&mut self, doc_id: &str, error: impl ToString) {
        let error = error.to_string();
        log::error!("{doc_id}: {error}");
        self.incomplete.push(Incomplete {
            doc_id: doc_id.to_string(),
            error,
        });
        self.ok = false;
    }

    pub(crate) fn write(&self, dir: &std::path::Path) -> Result<(), PipelineError> {
        let path = dir.join(STATUS_FILE);
        std::fs::create_dir_all(dir).map_err(|e| PipelineError::file(dir, e))?;
        let text = serde_json::to_string_pretty(self).expect("status serializes");
        std::fs::write(&path, text + "\n").map_err(|e| PipelineError::file(&path, e))
    }
}

/// One document's score under one method; the shared format of `scores.jsonl`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRecord {
    pub doc_id: String,
    pub group: Group,
    /// `decop` or a baseline method name.
    pub method: String,
    pub score: f64,
    pub direction: Direction,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_correct: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refusal_count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub missing_logprobs: Option<usize>,
}

pub const DECOP_METHOD: &str = "decop";
