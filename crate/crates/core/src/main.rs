use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use decop::pipeline::{self, RunConfig, Status};

#[derive(Parser)]
#[command(
    name = "decop",
    version,
    about = "Audit whether documents were in a language model's training data"
)]
struct Cli {
    /// TOML run configuration; built-in defaults (simulated provider) when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Clean documents and extract fixed-length passages.
    Extract {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Write three paraphrases per passage into a benchmark file.
    Paraphrase {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        passages: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Probe every document with all 24 option orderings.
    Probe {
        #[arg(long)]
        benchmark: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        calibration: Option<PathBuf>,
    },
    /// Estimate label calibration on clean documents.
    Calibrate {
        #[arg(long)]
        benchmark: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Held-out clean documents for the well-calibrated check.
        #[arg(long)]
        check_benchmark: Option<PathBuf>,
    },
    /// Score documents with the configured baseline methods.
    Baseline {
        #[arg(long)]
        benchmark: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Bootstrap AUC, threshold and t-test over a scores file.
    Evaluate {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        method: Option<String>,
    },
    /// Render the detection report.
    Report {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        evaluation: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        #[arg(long)]
        calibration: Option<PathBuf>,
    },
    /// Run the whole pipeline offline on synthetic documents.
    Simulate {
        #[arg(long)]
        out_dir: PathBuf,
        /// Also score the configured baselines.
        #[arg(long)]
        baselines: bool,
    },
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    let cfg = match &cli.config {
        Some(path) => {
            RunConfig::load(path).with_context(|| format!("loading {}", path.display()))?
        }
        None => RunConfig::default(),
    };
    let status = match cli.command {
        Command::Extract { corpus, out_dir } => {
            pipeline::cmd_extract(&cfg, &pipeline::ExtractArgs { corpus, out_dir })
        }
        Command::Paraphrase {
            corpus,
            passages,
            out_dir,
        } => pipeline::cmd_paraphrase(
            &cfg,
            &pipeline::ParaphraseArgs {
                corpus,
                passages,
                out_dir,
            },
        ),
        Command::Probe {
            benchmark,
            out_dir,
            calibration,
        } => pipeline::cmd_probe(
            &cfg,
            &pipeline::ProbeArgs {
                benchmark,
                out_dir,
                calibration,
            },
        ),
        Command::Calibrate {
            benchmark,
            out_dir,
            check_benchmark,
        } => pipeline::cmd_calibrate(
            &cfg,
            &pipeline::CalibrateArgs {
                benchmark,
                out_dir,
                check_benchmark,
            },
        ),
        Command::Baseline { benchmark, out_dir } => {
            pipeline::cmd_baseline(&cfg, &pipeline::BaselineArgs { benchmark, out_dir })
        }
        Command::Evaluate {
            scores,
            out_dir,
            method,
        } => pipeline::cmd_evaluate(
            &cfg,
            &pipeline::EvaluateArgs {
                scores,
                method,
                out_dir,
            },
        ),
        Command::Report {
            scores,
            evaluation,
            out_dir,
            calibration,
        } => pipeline::cmd_report(
            &cfg,
            &pipeline::ReportArgs {
                scores,
                evaluation,
                calibration,
                out_dir,
            },
        ),
        Command::Simulate { out_dir, baselines } => {
            pipeline::cmd_simulate(&cfg, &pipeline::SimulateArgs { out_dir, baselines })
        }
    }?;
    Ok(status)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(status) if status.ok => ExitCode::SUCCESS,
        Ok(status) => {
            let docs: Vec<&str> = status
                .incomplete
                .iter()
                .map(|i| i.doc_id.as_str())
                .collect();
            eprintln!(
                "{}: incomplete documents: {}",
                status.command,
                docs.join(", ")
            );
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
