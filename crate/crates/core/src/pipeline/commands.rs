use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::files::{read_json, require, write_json};
use super::{
    build_client, read_jsonl, write_jsonl, PipelineError, RunConfig, ScoreRecord, Status,
    DECOP_METHOD,
};
use crate::baselines::{aggregate_outcomes, run_document, BaselineOutcome, BaselineParams};
use crate::calibration::{
    adjusted_means, check_calibration, compute_calibration, mean_label_probs, CalibrationOptions,
    CalibrationVector,
};
use crate::corpus::{
    extract_passages, load_benchmark, load_corpus, load_passages, save_benchmark, save_passages,
};
use crate::paraphrase::{generate_paraphrases_at, McqaItem};
use crate::pool::map_ordered;
use crate::probe::{run_trials, score_document, ProbeOptions, TrialResult};
use crate::stats::{
    bootstrap_evaluate, detection_report, CalibrationStatus, Direction, EvaluationResult,
    GroupScores, ReportMeta, ReportRow,
};
use crate::types::Group;

pub const PASSAGES_FILE: &str = "passages.jsonl";
pub const BENCHMARK_FILE: &str = "benchmark.jsonl";
pub const SCORES_FILE: &str = "scores.jsonl";
pub const TRANSCRIPTS_FILE: &str = "transcripts.jsonl";
pub const OUTCOMES_FILE: &str = "baseline_outcomes.jsonl";
pub const CALIBRATION_FILE: &str = "calibration.json";
pub const CALIBRATION_CHECK_FILE: &str = "calibration_check.json";
pub const EVALUATION_FILE: &str = "evaluation.json";

pub(crate) fn probe_options(cfg: &RunConfig) -> ProbeOptions {
    ProbeOptions {
        style: cfg.prompt_style,
        temperature: cfg.temperatures.probe,
        workers: cfg.parallelism,
        ..ProbeOptions::default()
    }
}

/// Items grouped by document, documents in order of first appearance.
pub(crate) fn by_document(items: Vec<McqaItem>) -> Vec<(String, Vec<McqaItem>)> {
    let mut out: Vec<(String, Vec<McqaItem>)> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    for item in items {
        let i = *index.entry(item.meta.doc_id.clone()).or_insert_with(|| {
            out.push((item.meta.doc_id.clone(), Vec::new()));
            out.len() - 1
        });
        out[i].1.push(item);
    }
    out
}

fn load_items(what: &'static str, path: &Path) -> Result<Vec<McqaItem>, PipelineError> {
    require(what, path)?;
    Ok(load_benchmark(path)?)
}

#[derive(Debug, Clone)]
pub struct ExtractArgs {
    pub corpus: PathBuf,
    pub out_dir: PathBuf,
}

/// Cleans each document and extracts `passages_per_doc` passages.
pub fn cmd_extract(cfg: &RunConfig, args: &ExtractArgs) -> Result<Status, PipelineError> {
    require("corpus manifest", &args.corpus)?;
    let docs = load_corpus(&args.corpus)?;
    let mut status = Status::new("extract", cfg);
    let mut passages = Vec::new();
    for doc in &docs {
        match extract_passages(
            doc,
            cfg.length_setting,
            cfg.passages_per_doc,
            cfg.extract_seed,
        ) {
            Ok(ps) => {
                passages.extend(ps);
                status.completed.push(doc.doc_id().to_string());
            }
            Err(e) => status.fail(doc.doc_id(), e),
        }
    }
    let out = args.out_dir.join(super::commands::PASSAGES_FILE);
    save_passages(&out, &passages)?;
    status.outputs.push(out);
    status.write(&args.out_dir)?;
    Ok(status)
}

#[derive(Debug, Clone)]
pub struct ParaphraseArgs {
    pub corpus: PathBuf,
    pub passages: PathBuf,
    pub out_dir: PathBuf,
}

/// Generates three paraphrases per passage and writes the benchmark with
/// each original at position A.
pub fn cmd_paraphrase(cfg: &RunConfig, args: &ParaphraseArgs) -> Result<Status, PipelineError> {
    require("corpus manifest", &args.corpus)?;
    require("passages", &args.passages)?;
    let docs = load_corpus(&args.corpus)?;
    let passages = load_passages(&args.passages)?;
    let client = build_client(cfg, cfg.paraphraser(), &[])?;
    let by_id: BTreeMap<&str, _> = docs.iter().map(|d| (d.doc_id(), d)).collect();

    let results = map_ordered(&passages, cfg.parallelism, |p| {
        match by_id.get(p.doc_id()) {
            Some(doc) => generate_paraphrases_at(
                &client,
                p,
                doc,
                cfg.paraphrase_retries,
                cfg.temperatures.paraphrase,
            )
            .map_err(|e| format!("{}: {e}", p.passage_id())),
            None => Err(format!(
                "{}: document {} not in corpus",
                p.passage_id(),
                p.doc_id()
            )),
        }
    });

    let mut status = Status::new("paraphrase", cfg);
    let mut items = Vec::new();
    let mut failed: BTreeMap<String, String> = BTreeMap::new();
    for (p, r) in passages.iter().zip(results) {
        match r {
            Ok(item) => items.push(item),
            Err(e) => {
                failed.entry(p.doc_id().to_string()).or_insert(e);
            }
        }
    }
    let mut seen = Vec::new();
    for p in &passages {
        if !seen.iter().any(|d| d == p.doc_id()) {
            seen.push(p.doc_id().to_string());
        }
    }
    for doc in seen {
        match failed.get(&doc) {
            Some(e) => status.fail(&doc, e),
            None => status.completed.push(doc),
        }
    }
    let out = args.out_dir.join(BENCHMARK_FILE);
    save_benchmark(&out, &items)?;
    status.outputs.push(out);
    status.add_counts(client.counts());
    status.write(&args.out_dir)?;
    Ok(status)
}

#[derive(Debug, Clone)]
pub struct ProbeArgs {
    pub benchmark: PathBuf,
    pub out_dir: PathBuf,
    /// Overrides the config's calibration path.
    pub calibration: Option<PathBuf>,
}

pub(crate) fn decop_record(score: &crate::probe::DocumentScore, group: Group) -> ScoreRecord {
    ScoreRecord {
        doc_id: score.doc_id.clone(),
        group,
        method: DECOP_METHOD.to_string(),
        score: score.accuracy,
        direction: Direction::HigherIsMember,
        n_trials: Some(score.n_trials),
        n_correct: Some(score.n_correct),
        refusal_count: Some(score.refusal_count),
        missing_logprobs: Some(score.missing_logprobs),
    }
}

/// Runs the 24-permutation probe on every document of the benchmark.
pub fn cmd_probe(cfg: &RunConfig, args: &ProbeArgs) -> Result<Status, PipelineError> {
    let items = load_items("benchmark", &args.benchmark)?;
    let calibration = match args.calibration.as_ref().or(cfg.calibration.as_ref()) {
        Some(path) => {
            require("calibration", path)?;
            Some(CalibrationVector::load(path)?)
        }
        None => None,
    };
    let docs = by_document(items.clone());
    if let Some(cal) = &calibration {
        cal.ensure_disjoint(docs.iter().map(|(d, _)| d.as_str()))?;
    }
    let client = build_client(cfg, &cfg.provider, &items)?;
    if calibration.is_some() && !client.capabilities().label_probs {
        return Err(PipelineError::Config(format!(
            "calibration needs label probabilities, which {} does not provide",
            client.model_name()
        )));
    }
    let (status, _) = probe_documents(cfg, &client, &docs, calibration.as_ref(), &args.out_dir)?;
    Ok(status)
}

pub(crate) fn probe_documents(
    cfg: &RunConfig,
    client: &crate::providers::Client,
    docs: &[(String, Vec<McqaItem>)],
    calibration: Option<&CalibrationVector>,
    out_dir: &Path,
) -> Result<(Status, Vec<TrialResult>), PipelineError> {
    let opts = probe_options(cfg);
    let mut status = Status::new("probe", cfg);
    let mut records = Vec::new();
    let mut transcripts = Vec::new();
    for (doc_id, items) in docs {
        match score_document(client, items, calibration, &opts) {
            Ok((score, results)) => {
                records.push(decop_record(&score, items[0].meta.group));
                transcripts.extend(results);
                status.completed.push(doc_id.clone());
            }
            Err(e) => status.fail(doc_id, e),
        }
    }
    let scores = out_dir.join(SCORES_FILE);
    write_jsonl(&scores, &records)?;
    let tr = out_dir.join(TRANSCRIPTS_FILE);
    write_jsonl(&tr, &transcripts)?;
    status.outputs.extend([scores, tr]);
    status.add_counts(client.counts());
    status.write(out_dir)?;
    Ok((status, transcripts))
}

#[derive(Debug, Clone)]
pub struct CalibrateArgs {
    /// Clean documents to estimate the vector from.
    pub benchmark: PathBuf,
    pub out_dir: PathBuf,
    /// Held-out clean documents to run the well-calibrated check on.
    pub check_benchmark: Option<PathBuf>,
}

/// Per-document result of the well-calibrated check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub doc_id: String,
    pub adjusted_means: [f64; 4],
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckFile {
    pub docs: Vec<CheckRecord>,
    pub proportion: f64,
}

fn clean_only(items: Vec<McqaItem>) -> Vec<McqaItem> {
    let total = items.len();
    let clean: Vec<McqaItem> = items
        .into_iter()
        .filter(|i| i.meta.group == Group::Clean)
        .collect();
    if clean.len() < total {
        log::info!(
            "ignoring {} items from suspect documents",
            total - clean.len()
        );
    }
    clean
}

/// Adjusted per-document label means and the well-calibrated verdicts for
/// trials that carry label probabilities.
pub fn calibration_check(
    transcripts: &[(String, Vec<TrialResult>)],
    cal: &CalibrationVector,
) -> CheckFile {
    let mut ids = Vec::new();
    let mut raw = Vec::new();
    for (doc_id, results) in transcripts {
        let probs: Vec<[f64; 4]> = results.iter().filter_map(|r| r.label_probs).collect();
        if let Some(m) = mean_label_probs(&probs) {
            ids.push(doc_id.clone());
            raw.push(m);
        }
    }
    let adjusted = adjusted_means(&raw, cal);
    let check = check_calibration(&adjusted);
    CheckFile {
        docs: ids
            .into_iter()
            .zip(adjusted)
            .zip(&check.per_doc)
            .map(|((doc_id, adjusted_means), pass)| CheckRecord {
                doc_id,
                adjusted_means,
                pass: *pass,
            })
            .collect(),
        proportion: check.proportion,
    }
}

pub fn cmd_calibrate(cfg: &RunConfig, args: &CalibrateArgs) -> Result<Status, PipelineError> {
    let items = clean_only(load_items("calibration benchmark", &args.benchmark)?);
    let check_items = match &args.check_benchmark {
        Some(p) => clean_only(load_items("check benchmark", p)?),
        None => Vec::new(),
    };
    let mut known = items.clone();
    known.extend(check_items.iter().cloned());
    let client = build_client(cfg, &cfg.provider, &known)?;
    let docs = by_document(items);
    let opts = CalibrationOptions {
        probe: probe_options(cfg),
        ..CalibrationOptions::default()
    };
    let run = compute_calibration(&client, &docs, &opts)?;
    let mut status = Status::new("calibrate", cfg);
    status.completed = run.vector.source_doc_ids.clone();
    let out = args.out_dir.join(CALIBRATION_FILE);
    run.vector.save(&out)?;
    status.outputs.push(out);

    if !check_items.is_empty() {
        let check_docs = by_document(check_items);
        run.vector
            .ensure_disjoint(check_docs.iter().map(|(d, _)| d.as_str()))?;
        let mut transcripts = Vec::new();
        for (doc_id, items) in check_docs {
            match run_trials(&client, &items, true, &opts.probe) {
                Ok(results) => transcripts.push((doc_id, results)),
                Err(e) => status.fail(&doc_id, e),
            }
        }
        let check = calibration_check(&transcripts, &run.vector);
        log::info!(
            "well calibrated: {:.1}% of {} documents",
            100.0 * check.proportion,
            check.docs.len()
        );
        let path = args.out_dir.join(CALIBRATION_CHECK_FILE);
        write_json(&path, &check)?;
        status.outputs.push(path);
    }
    status.add_counts(client.counts());
    status.write(&args.out_dir)?;
    Ok(status)
}

#[derive(Debug, Clone)]
pub struct BaselineArgs {
    pub benchmark: PathBuf,
    pub out_dir: PathBuf,
}

/// Scores every document with the configured baseline methods.
pub fn cmd_baseline(cfg: &RunConfig, args: &BaselineArgs) -> Result<Status, PipelineError> {
    let items = load_items("benchmark", &args.benchmark)?;
    let methods = &cfg.baselines.methods;
    if methods.is_empty() {
        return Err(PipelineError::Config("baselines.methods is empty".into()));
    }
    let client = build_client(cfg, &cfg.provider, &items)?;
    let caps = client.capabilities();
    if let Some(m) = methods
        .iter()
        .find(|m| m.needs_token_logprobs() && !caps.token_logprobs)
    {
        return Err(PipelineError::Config(format!(
            "baseline {m} needs token logprobs, which {} does not provide",
            client.model_name()
        )));
    }
    let params = BaselineParams {
        k_percent: cfg.baselines.k_percent,
        workers: cfg.parallelism,
    };
    let mut status = Status::new("baseline", cfg);
    let mut outcomes: Vec<BaselineOutcome> = Vec::new();
    let mut records = Vec::new();
    for (doc_id, items) in by_document(items) {
        let result = run_document(&client, &items, methods, &params)
            .and_then(|o| aggregate_outcomes(&o).map(|scores| (o, scores)));
        match result {
            Ok((o, scores)) => {
                outcomes.extend(o);
                records.extend(scores.into_iter().map(|s| ScoreRecord {
                    doc_id: s.doc_id,
                    group: items[0].meta.group,
                    method: s.method.to_string(),
                    score: s.value,
                    direction: s.direction,
                    n_trials: None,
                    n_correct: None,
                    refusal_count: None,
                    missing_logprobs: None,
                }));
                status.completed.push(doc_id);
            }
            Err(e) => status.fail(&doc_id, e),
        }
    }
    let out = args.out_dir.join(OUTCOMES_FILE);
    write_jsonl(&out, &outcomes)?;
    let scores = args.out_dir.join(SCORES_FILE);
    write_jsonl(&scores, &records)?;
    status.outputs.extend([out, scores]);
    status.add_counts(client.counts());
    status.write(&args.out_dir)?;
    Ok(status)
}

#[derive(Debug, Clone)]
pub struct EvaluateArgs {
    pub scores: PathBuf,
    /// Which method's scores to evaluate; needed when the file holds several.
    pub method: Option<String>,
    pub out_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationFile {
    pub method: String,
    pub config_hash: String,
    pub evaluation: EvaluationResult,
}

fn select_method(records: &[ScoreRecord], method: Option<&str>) -> Result<String, PipelineError> {
    let mut methods: Vec<&str> = records.iter().map(|r| r.method.as_str()).collect();
    methods.sort_unstable();
    methods.dedup();
    match method {
        Some(m) if methods.contains(&m) => Ok(m.to_string()),
        Some(m) => Err(PipelineError::Config(format!(
            "no scores for method {m}; found {methods:?}"
        ))),
        None if methods.len() == 1 => Ok(methods[0].to_string()),
        None => Err(PipelineError::Config(format!(
            "scores hold several methods {methods:?}; pick one with --method"
        ))),
    }
}

pub fn group_scores(records: &[ScoreRecord], method: &str) -> Result<GroupScores, PipelineError> {
    let selected: Vec<&ScoreRecord> = records.iter().filter(|r| r.method == method).collect();
    let direction = selected.first().map(|r| r.direction).unwrap_or_default();
    let pick = |g: Group| {
        selected
            .iter()
            .filter(|r| r.group == g)
            .map(|r| (r.doc_id.clone(), r.score))
            .collect()
    };
    Ok(GroupScores::new(
        pick(Group::Suspect),
        pick(Group::Clean),
        direction,
    )?)
}

/// Bootstrap AUC, threshold and t-test for one method's scores.
pub fn cmd_evaluate(cfg: &RunConfig, args: &EvaluateArgs) -> Result<Status, PipelineError> {
    require("scores", &args.scores)?;
    let records: Vec<ScoreRecord> = read_jsonl(&args.scores)?;
    let method = select_method(&records, args.method.as_deref())?;
    let groups = group_scores(&records, &method)?;
    let evaluation = bootstrap_evaluate(&groups, &cfg.bootstrap)?;
    let mut status = Status::new("evaluate", cfg);
    status.completed = groups
        .suspect
        .iter()
        .chain(&groups.clean)
        .map(|(d, _)| d.clone())
        .collect();
    let out = args.out_dir.join(EVALUATION_FILE);
    write_json(
        &out,
        &EvaluationFile {
            method,
            config_hash: cfg.config_hash(),
            evaluation,
        },
    )?;
    status.outputs.push(out);
    status.write(&args.out_dir)?;
    Ok(status)
}

#[derive(Debug, Clone)]
pub struct ReportArgs {
    pub scores: PathBuf,
    pub evaluation: PathBuf,
    /// Calibration vector used for the scores; a `calibration_check.json`
    /// beside it adds the well-calibrated proportion.
    pub calibration: Option<PathBuf>,
    pub out_dir: PathBuf,
}

fn provider_label(cfg: &RunConfig) -> String {
    serde_json::to_value(cfg.provider.kind)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Writes `report.txt` and `report.jsonl`.
pub fn cmd_report(cfg: &RunConfig, args: &ReportArgs) -> Result<Status, PipelineError> {
    require("scores", &args.scores)?;
    require("evaluation", &args.evaluation)?;
    let records: Vec<ScoreRecord> = read_jsonl(&args.scores)?;
    let eval: EvaluationFile = read_json(&args.evaluation)?;
    let rows: Vec<ReportRow> = records
        .iter()
        .filter(|r| r.method == eval.method)
        .map(|r| ReportRow {
            doc_id: r.doc_id.clone(),
            group: r.group,
            score: r.score,
            n_trials: r.n_trials,
            n_correct: r.n_correct,
            refusal_count: r.refusal_count,
        })
        .collect();
    let calibration = match args.calibration.as_ref().or(cfg.calibration.as_ref()) {
        Some(path) => {
            require("calibration", path)?;
            let vector = CalibrationVector::load(path)?;
            let check_path = path.with_file_name(CALIBRATION_CHECK_FILE);
            let check: Option<CheckFile> = if check_path.exists() {
                Some(read_json(&check_path)?)
            } else {
                None
            };
            Some(CalibrationStatus {
                delta: vector.delta,
                source_doc_count: vector.source_doc_count,
                well_calibrated_proportion: check.as_ref().map(|c| c.proportion),
                checked_docs: check.as_ref().map(|c| c.docs.len()),
            })
        }
        None => None,
    };
    let meta = ReportMeta {
        provider: provider_label(cfg),
        model: cfg.provider.model.clone(),
        method: eval.method.clone(),
        config_hash: cfg.config_hash(),
    };
    let report = detection_report(eval.evaluation, rows, calibration, meta);
    let now = chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true);
    report
        .write(&args.out_dir, &now)
        .map_err(|e| PipelineError::file(&args.out_dir, e))?;
    let mut status = Status::new("report", cfg);
    status.completed = report.rows.iter().map(|r| r.doc_id.clone()).collect();
    status.outputs.extend([
        args.out_dir.join("report.txt"),
        args.out_dir.join("report.jsonl"),
    ]);
    status.write(&args.out_dir)?;
    Ok(status)
}
