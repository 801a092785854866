use std::path::{Path, PathBuf};

use serde_json::json;

use super::commands::{
    by_document, cmd_calibrate, cmd_evaluate, cmd_extract, cmd_paraphrase, cmd_probe, cmd_report,
    BaselineArgs, CalibrateArgs, EvaluateArgs, ExtractArgs, ParaphraseArgs, ProbeArgs, ReportArgs,
    BENCHMARK_FILE, CALIBRATION_FILE, EVALUATION_FILE, PASSAGES_FILE, SCORES_FILE,
};
use super::files::require;
use super::{write_jsonl, PipelineError, ProviderKind, RunConfig, Status};
use crate::corpus::{load_benchmark, save_benchmark};
use crate::synth::{synthetic_docs, SyntheticDoc};
use crate::types::Group;

#[derive(Debug, Clone)]
pub struct SimulateArgs {
    pub out_dir: PathBuf,
    /// Also score the configured baselines.
    pub baselines: bool,
}

fn write_corpus(
    cfg: &RunConfig,
    docs: &[SyntheticDoc],
    dir: &Path,
) -> Result<PathBuf, PipelineError> {
    // Four times the words the passages need leaves room for disjoint windows.
    let words = cfg.passages_per_doc * cfg.length_setting.target_words() * 4;
    let mut manifest = Vec::new();
    for d in docs {
        let doc = d.document(cfg.simulation.seed, words)?;
        let file = format!("{}.txt", d.doc_id);
        let path = dir.join(&file);
        std::fs::create_dir_all(dir).map_err(|e| PipelineError::file(dir, e))?;
        std::fs::write(&path, doc.raw_text()).map_err(|e| PipelineError::file(&path, e))?;
        manifest.push(json!({
            "doc_id": d.doc_id,
            "title": d.title,
            "author": d.author,
            "publication_year": d.year(),
            "group": d.group,
            "file": file,
        }));
    }
    let path = dir.join("manifest.jsonl");
    write_jsonl(&path, &manifest)?;
    Ok(path)
}

fn absorb(total: &mut Status, stage: Status) {
    total.provider_calls += stage.provider_calls;
    total.cache_hits += stage.cache_hits;
    total.retries += stage.retries;
    total.outputs.extend(stage.outputs);
    for i in stage.incomplete {
        total.fail(&format!("{}: {}", stage.command, i.doc_id), i.error);
    }
}

/// The whole pipeline offline on synthetic documents and the simulated model:
/// corpus, extraction, paraphrasing, optional calibration on separate clean
/// documents, probing, evaluation and the report.
pub fn cmd_simulate(cfg: &RunConfig, args: &SimulateArgs) -> Result<Status, PipelineError> {
    if cfg.provider.kind != ProviderKind::Simulated
        || cfg.paraphraser().kind != ProviderKind::Simulated
    {
        return Err(PipelineError::Config(
            "simulate needs simulated provider and paraphraser".into(),
        ));
    }
    let out = &args.out_dir;
    let sim = &cfg.simulation;
    let mut docs = synthetic_docs("suspect", Group::Suspect, sim.suspect_docs);
    docs.extend(synthetic_docs("clean", Group::Clean, sim.clean_docs));
    let cal_docs = synthetic_docs("calib", Group::Clean, sim.calibration_docs);
    docs.extend(cal_docs.iter().cloned());

    let mut total = Status::new("simulate", cfg);
    let manifest = write_corpus(cfg, &docs, &out.join("corpus"))?;
    let extract = cmd_extract(
        cfg,
        &ExtractArgs {
            corpus: manifest.clone(),
            out_dir: out.join("extract"),
        },
    )?;
    absorb(&mut total, extract);
    let para = cmd_paraphrase(
        cfg,
        &ParaphraseArgs {
            corpus: manifest,
            passages: out.join("extract").join(PASSAGES_FILE),
            out_dir: out.join("paraphrase"),
        },
    )?;
    absorb(&mut total, para);

    let items = load_benchmark(&out.join("paraphrase").join(BENCHMARK_FILE))?;
    let is_cal = |doc: &str| cal_docs.iter().any(|d| d.doc_id == doc);
    let (cal_items, eval_items): (Vec<_>, Vec<_>) =
        items.into_iter().partition(|i| is_cal(&i.meta.doc_id));
    let eval_path = out.join("split").join("evaluation.jsonl");
    save_benchmark(&eval_path, &eval_items)?;

    let calibration = if cal_items.is_empty() {
        None
    } else {
        let cal_path = out.join("split").join("calibration.jsonl");
        save_benchmark(&cal_path, &cal_items)?;
        let stage = cmd_calibrate(
            cfg,
            &CalibrateArgs {
                benchmark: cal_path,
                out_dir: out.join("calibrate"),
                check_benchmark: Some(eval_path.clone()),
            },
        )?;
        absorb(&mut total, stage);
        Some(out.join("calibrate").join(CALIBRATION_FILE))
    };

    let probe = cmd_probe(
        cfg,
        &ProbeArgs {
            benchmark: eval_path.clone(),
            out_dir: out.join("probe"),
            calibration: calibration.clone(),
        },
    )?;
    total.completed = probe.completed.clone();
    absorb(&mut total, probe);

    let scores = out.join("probe").join(SCORES_FILE);
    require("scores", &scores)?;
    absorb(
        &mut total,
        cmd_evaluate(
            cfg,
            &EvaluateArgs {
                scores: scores.clone(),
                method: None,
                out_dir: out.join("evaluate"),
            },
        )?,
    );
    absorb(
        &mut total,
        cmd_report(
            cfg,
            &ReportArgs {
                scores,
                evaluation: out.join("evaluate").join(EVALUATION_FILE),
                calibration,
                out_dir: out.join("report"),
            },
        )?,
    );

    if args.baselines {
        let stage = super::cmd_baseline(
            cfg,
            &BaselineArgs {
                benchmark: eval_path,
                out_dir: out.join("baseline"),
            },
        )?;
        absorb(&mut total, stage);
    }
    log::info!(
        "simulated {} documents: {} provider calls, {} cache hits",
        by_document(eval_items).len(),
        total.provider_calls,
        total.cache_hits
    );
    total.write(out)?;
    Ok(total)
}
