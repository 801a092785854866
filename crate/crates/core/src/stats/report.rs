use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::EvaluationResult;
use crate::types::Group;

/// Who and what produced the scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub provider: String,
    pub model: String,
    /// `decop` or a baseline method name.
    pub method: String,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub doc_id: String,
    pub group: Group,
    pub score: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_correct: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refusal_count: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationStatus {
    pub delta: [f64; 4],
    pub source_doc_count: usize,
    /// Share of checked clean documents whose adjusted label means all lie in [0.15, 0.35].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub well_calibrated_proportion: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checked_docs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub meta: ReportMeta,
    pub evaluation: EvaluationResult,
    pub rows: Vec<ReportRow>,
    pub suspect_mean: f64,
    pub clean_mean: f64,
    pub refusal_total: usize,
    pub calibration: Option<CalibrationStatus>,
}

fn group_mean(rows: &[ReportRow], group: Group) -> f64 {
    let xs: Vec<f64> = rows
        .iter()
        .filter(|r| r.group == group)
        .map(|r| r.score)
        .collect();
    if xs.is_empty() {
        f64::NAN
    } else {
        super::mean(&xs)
    }
}

/// Assembles the report. Rows are sorted by group (suspect first) then doc id.
pub fn detection_report(
    evaluation: EvaluationResult,
    mut rows: Vec<ReportRow>,
    calibration: Option<CalibrationStatus>,
    meta: ReportMeta,
) -> DetectionReport {
    rows.sort_by(|a, b| (b.group, &a.doc_id).cmp(&(a.group, &b.doc_id)));
    DetectionReport {
        suspect_mean: group_mean(&rows, Group::Suspect),
        clean_mean: group_mean(&rows, Group::Clean),
        refusal_total: rows.iter().filter_map(|r| r.refusal_count).sum(),
        meta,
        evaluation,
        rows,
        calibration,
    }
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |v| v.to_string())
}

impl DetectionReport {
    /// Human-readable table. Carries no timestamp.
    pub fn render_text(&self) -> String {
        let e = &self.evaluation;
        let mut out = String::new();
        let _ = writeln!(out, "membership detection report");
        let _ = writeln!(
            out,
            "provider {}  model {}  method {}",
            self.meta.provider, self.meta.model, self.meta.method
        );
        let _ = writeln!(out, "config {}", self.meta.config_hash);
        let _ = writeln!(out);
        let width = self
            .rows
            .iter()
            .map(|r| r.doc_id.len())
            .max()
            .unwrap_or(6)
            .max(6);
        let _ = writeln!(
            out,
            "{:<width$}  {:<7}  {:>10}  {:>6}  {:>7}  {:>8}",
            "doc_id", "group", "score", "trials", "correct", "refusals"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<width$}  {:<7}  {:>10.4}  {:>6}  {:>7}  {:>8}",
                r.doc_id,
                r.group,
                r.score,
                opt(r.n_trials),
                opt(r.n_correct),
                opt(r.refusal_count)
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "suspect mean {:.4} (n={})  clean mean {:.4} (n={})",
            self.suspect_mean, e.n_suspect, self.clean_mean, e.n_clean
        );
        let _ = writeln!(
            out,
            "AUC {:.3} ± {:.3} over {} bootstrap iterations (seed {})",
            e.auc_mean, e.auc_std, e.iterations, e.seed
        );
        let _ = writeln!(
            out,
            "suspect score {:.4} ± {:.4}  clean score {:.4} ± {:.4}",
            e.suspect_acc_mean, e.suspect_acc_std, e.clean_acc_mean, e.clean_acc_std
        );
        let _ = writeln!(
            out,
            "threshold {:.4}  balanced accuracy {:.3}  ({})",
            e.threshold_mean,
            e.balanced_accuracy_mean,
            e.direction.as_str()
        );
        let p = match e.p_value {
            Some(p) if e.degenerate_variance => format!("{p:.3e} (degenerate variance)"),
            Some(p) => format!("{p:.3e}"),
            None => "n/a (fewer than 2 documents in a group)".to_string(),
        };
        let _ = writeln!(
            out,
            "p-value {p}  (Welch t-test, {})",
            e.ttest_mode.as_str()
        );
        let _ = writeln!(out, "refusals {}", self.refusal_total);
        match &self.calibration {
            Some(c) => {
                let d = c.delta;
                let _ = write!(
                    out,
                    "calibration delta [{:+.4}, {:+.4}, {:+.4}, {:+.4}] from {} clean docs",
                    d[0], d[1], d[2], d[3], c.source_doc_count
                );
                match (c.well_calibrated_proportion, c.checked_docs) {
                    (Some(p), Some(n)) => {
                        let _ = writeln!(out, "; well calibrated {:.1}% of {n} docs", 100.0 * p);
                    }
                    _ => {
                        let _ = writeln!(out);
                    }
                }
            }
            None => {
                let _ = writeln!(out, "calibration none");
            }
        }
        out
    }

    /// Line-delimited records: `meta` (the only one with a timestamp), one
    /// `document` per row, `summary`, and `calibration` when present.
    pub fn to_jsonl(&self, generated_at: &str) -> String {
        let mut lines = vec![json!({
            "record": "meta",
            "provider": self.meta.provider,
            "model": self.meta.model,
            "method": self.meta.method,
            "config_hash": self.meta.config_hash,
            "generated_at": generated_at,
        })];
        for r in &self.rows {
            let mut v = serde_json::to_value(r).expect("rows serialize");
            v.as_object_mut()
                .expect("object")
                .insert("record".into(), "document".into());
            lines.push(v);
        }
        let mut summary = serde_json::to_value(&self.evaluation).expect("evaluation serializes");
        let obj = summary.as_object_mut().expect("object");
        obj.insert("record".into(), "summary".into());
        obj.insert("suspect_mean".into(), json!(self.suspect_mean));
        obj.insert("clean_mean".into(), json!(self.clean_mean));
        obj.insert("refusal_total".into(), json!(self.refusal_total));
        lines.push(summary);
        if let Some(c) = &self.calibration {
            let mut v = serde_json::to_value(c).expect("calibration serializes");
            v.as_object_mut()
                .expect("object")
                .insert("record".into(), "calibration".into());
            lines.push(v);
        }
        lines.iter().map(|l| l.to_string() + "\n").collect()
    }

    /// Writes `report.txt` and `report.jsonl` into `dir`.
    pub fn write(&self, dir: &Path, generated_at: &str) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("report.txt"), self.render_text())?;
        std::fs::write(dir.join("report.jsonl"), self.to_jsonl(generated_at))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{bootstrap_evaluate, BootstrapConfig, Direction, GroupScores};

    fn report(calibration: Option<CalibrationStatus>) -> DetectionReport {
        let g = GroupScores::new(
            vec![("s1".into(), 0.9)],
            vec![("c1".into(), 0.25)],
            Direction::HigherIsMember,
        )
        .unwrap();
        let e = bootstrap_evaluate(&g, &BootstrapConfig::default()).unwrap();
        let rows = vec![
            ReportRow {
                doc_id: "c1".into(),
                group: Group::Clean,
                score: 0.25,
                n_trials: Some(24),
                n_correct: Some(6),
                refusal_count: Some(0),
            },
            ReportRow {
                doc_id: "s1".into(),
                group: Group::Suspect,
                score: 0.9,
                n_trials: Some(24),
                n_correct: Some(22),
                refusal_count: Some(1),
            },
        ];
        let meta = ReportMeta {
            provider: "simulated".into(),
            model: "sim".into(),
            method: "decop".into(),
            config_hash: "abc".into(),
        };
        detection_report(e, rows, calibration, meta)
    }

    #[test]
    fn minimal_report() {
        let r = report(None);
        let text = r.render_text();
        assert!(text.contains("s1") && text.contains("c1"));
        assert_eq!(text.lines().filter(|l| l.starts_with("AUC")).count(), 1);
        assert_eq!(r.rows[0].doc_id, "s1");
        assert_eq!(r.refusal_total, 1);
        let jsonl = r.to_jsonl("T");
        assert_eq!(jsonl.lines().count(), 4);
        assert_eq!(jsonl.matches("\"T\"").count(), 1);
    }

    #[test]
    fn calibration_is_reported() {
        let r = report(Some(CalibrationStatus {
            delta: [-0.15, -0.05, 0.05, 0.15],
            source_doc_count: 30,
            well_calibrated_proportion: Some(0.95),
            checked_docs: Some(20),
        }));
        let text = r.render_text();
        assert!(text.contains("-0.1500"));
        assert!(text.contains("well calibrated 95.0% of 20 docs"));
        assert!(r.to_jsonl("T").contains("\"record\":\"calibration\""));
    }
}
