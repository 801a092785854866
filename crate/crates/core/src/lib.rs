//! Training-data membership auditing for language models.
//!
//! A document is probed by asking the model to pick its verbatim passage out of
//! three paraphrases, across all 24 orderings of the four options. Documents
//! the model was trained on are answered correctly far more often than
//! documents published after its cutoff; a bootstrap AUC and Welch t-test
//! between a `suspect` and a `clean` group turn those per-document accuracies
//! into a verdict.
//!
//! The pipeline stages map onto modules:
//!
//! - [`corpus`]: clean raw text and extract fixed-length passages.
//! - [`paraphrase`]: build the paraphrase prompt and validate the three rewrites.
//! - [`probe`]: permutation trials, evaluation prompts, answer parsing, scoring.
//! - [`calibration`]: per-label prior correction estimated on clean documents.
//! - [`baselines`]: perplexity, zlib, lowercase, Min-K% Prob, prefix probing, name cloze.
//! - [`stats`]: ROC AUC, separation threshold, bootstrap, Welch t-test, reports.
//! - [`providers`]: model access with caching, rate limiting and a simulated model.
//! - [`pipeline`]: file-based stage commands used by the `decop` binary.

pub mod baselines;
pub mod calibration;
pub mod corpus;
pub mod paraphrase;
pub mod pipeline;
pub mod pool;
pub mod probe;
pub mod providers;
pub mod stats;
pub mod synth;
pub mod types;

pub use calibration::CalibrationVector;
pub use corpus::{Document, Passage};
pub use paraphrase::McqaItem;
pub use probe::{DocumentScore, PermutationTrial, TrialResult};
pub use providers::{Client, Provider};
pub use stats::{Direction, EvaluationResult, GroupScores};
pub use types::{Group, Label, LengthSetting};
