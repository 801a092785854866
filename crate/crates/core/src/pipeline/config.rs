use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::PipelineError;
use crate::baselines::{BaselineMethod, DEFAULT_MIN_K_PERCENT};
use crate::paraphrase::{DEFAULT_RETRIES, PARAPHRASE_TEMPERATURE};
use crate::probe::{PromptStyle, PERMUTATIONS, PROBE_TEMPERATURE};
use crate::stats::BootstrapConfig;
use crate::types::LengthSetting;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProviderKind {
    #[default]
    Simulated,
    /// Any server speaking the OpenAI chat-completions protocol.
    Openai,
    Anthropic,
}

impl ProviderKind {
    /// Environment variable holding the API key.
    pub fn credential_var(self) -> Option<&'static str> {
        match self {
            ProviderKind::Simulated => None,
            ProviderKind::Openai => Some("OPENAI_API_KEY"),
            ProviderKind::Anthropic => Some("ANTHROPIC_API_KEY"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProviderConfig {
    pub kind: ProviderKind,
    pub model: String,
    pub base_url: Option<String>,
    /// OpenAI-compatible servers only: request top logprobs for answer labels.
    pub label_probs: bool,
    /// OpenAI-compatible servers only: score text via `echo` on `/completions`.
    pub token_logprobs: bool,
    pub timeout_secs: u64,
}

impl Default for ProviderConfig {
    fn default() -> Self {
        ProviderConfig {
            kind: ProviderKind::Simulated,
            model: "sim".into(),
            base_url: None,
            label_probs: true,
            token_logprobs: false,
            timeout_secs: 120,
        }
    }
}

/// Parameters of the simulated model and of synthetic runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationConfig {
    pub seed: u64,
    pub position_bias: [f64; 4],
    /// Memorization rate for suspect documents without an explicit entry.
    pub suspect_rate: f64,
    /// Memorization rate for clean documents without an explicit entry.
    pub clean_rate: f64,
    pub memorization: BTreeMap<String, f64>,
    pub suspect_docs: usize,
    pub clean_docs: usize,
    /// Extra clean documents used only to estimate a calibration vector.
    pub calibration_docs: usize,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            seed: 0,
            position_bias: [0.25; 4],
            suspect_rate: 0.85,
            clean_rate: 0.0,
            memorization: BTreeMap::new(),
            suspect_docs: 30,
            clean_docs: 30,
            calibration_docs: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Temperatures {
    pub paraphrase: f64,
    pub probe: f64,
}

impl Default for Temperatures {
    fn default() -> Self {
        Temperatures {
            paraphrase: PARAPHRASE_TEMPERATURE,
            probe: PROBE_TEMPERATURE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RateLimitConfig {
    pub requests_per_minute: f64,
    pub burst: u32,
}

impl Default for RateLimitConfig {
    fn default() -> Self {
        RateLimitConfig {
            requests_per_minute: 60.0,
            burst: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    pub methods: Vec<BaselineMethod>,
    pub k_percent: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        BaselineConfig {
            methods: BaselineMethod::ALL.to_vec(),
            k_percent: DEFAULT_MIN_K_PERCENT,
        }
    }
}

/// Everything a run needs besides its input files. Credentials never live here.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub provider: ProviderConfig,
    /// Model used to write paraphrases; the target provider when absent.
    pub paraphraser: Option<ProviderConfig>,
    pub simulation: SimulationConfig,
    pub length_setting: LengthSetting,
    pub passages_per_doc: usize,
    pub extract_seed: u64,
    /// Must be 24.
    pub permutations: usize,
    pub temperatures: Temperatures,
    pub prompt_style: PromptStyle,
    pub paraphrase_retries: u32,
    pub calibration: Option<PathBuf>,
    pub bootstrap: BootstrapConfig,
    pub parallelism: usize,
    pub rate_limit: RateLimitConfig,
    pub cache_dir: PathBuf,
    pub baselines: BaselineConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            provider: ProviderConfig::default(),
            paraphraser: None,
            simulation: SimulationConfig::default(),
            length_setting: LengthSetting::Short64,
            passages_per_doc: 30,
            extract_seed: 0,
            permutations: PERMUTATIONS,
            temperatures: Temperatures::default(),
            prompt_style: PromptStyle::Chat,
            paraphrase_retries: DEFAULT_RETRIES,
            calibration: None,
            bootstrap: BootstrapConfig::default(),
            parallelism: 4,
            rate_limit: RateLimitConfig::default(),
            cache_dir: PathBuf::from("cache"),
            baselines: BaselineConfig::default(),
        }
    }
}

impl RunConfig {
    /// Reads a TOML file. Relative paths inside it are taken relative to the file.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig = toml::from_str(&text)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        if cfg.cache_dir.is_relative() {
            cfg.cache_dir = base.join(&cfg.cache_dir);
        }
        if let Some(c) = cfg.calibration.as_mut().filter(|c| c.is_relative()) {
            *c = base.join(&*c);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if self.permutations != PERMUTATIONS {
            return bad(format!(
                "permutations must be {PERMUTATIONS}, got {}",
                self.permutations
            ));
        }
        if self.passages_per_doc == 0 {
            return bad("passages_per_doc must be positive".into());
        }
        if self.parallelism == 0 {
            return bad("parallelism must be positive".into());
        }
        if self.bootstrap.iterations == 0 {
            return bad("bootstrap.iterations must be positive".into());
        }
        let t = self.temperatures;
        if !(t.paraphrase >= 0.0 && t.probe >= 0.0) {
            return bad("temperatures must be non-negative".into());
        }
        if t.paraphrase != PARAPHRASE_TEMPERATURE || t.probe != PROBE_TEMPERATURE {
            log::warn!(
                "temperatures overridden to paraphrase={} probe={} (defaults {PARAPHRASE_TEMPERATURE} and {PROBE_TEMPERATURE})",
                t.paraphrase,
                t.probe
            );
        }
        let sim = &self.simulation;
        if sim
            .position_bias
            .iter()
            .any(|b| !(b.is_finite() && *b >= 0.0))
            || sim.position_bias.iter().sum::<f64>() <= 0.0
        {
            return bad("simulation.position_bias must be non-negative with positive sum".into());
        }
        for (what, m) in [
            ("suspect_rate", sim.suspect_rate),
            ("clean_rate", sim.clean_rate),
        ]
        .into_iter()
        .chain(sim.memorization.iter().map(|(k, v)| (k.as_str(), *v)))
        {
            if !(0.0..=1.0).contains(&m) {
                return bad(format!(
                    "simulation memorization {what} = {m} outside [0, 1]"
                ));
            }
        }
        let k = self.baselines.k_percent;
        if !(k > 0.0 && k <= 100.0) {
            return bad(format!("baselines.k_percent = {k} outside (0, 100]"));
        }
        if self.rate_limit.requests_per_minute <= 0.0 || self.rate_limit.burst == 0 {
            return bad("rate_limit needs positive requests_per_minute and burst".into());
        }
        Ok(())
    }

    pub fn paraphraser(&self) -> &ProviderConfig {
        self.paraphraser.as_ref().unwrap_or(&self.provider)
    }

    /// Short digest of the whole configuration, embedded in reports.
    pub fn config_hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(json.as_bytes()))[..16].to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        RunConfig::default().validate().unwrap();
        let cfg = RunConfig::from_toml("").unwrap();
        assert_eq!(cfg, RunConfig::default());
    }

    #[test]
    fn permutations_are_fixed() {
        let err = RunConfig::from_toml("permutations = 12").unwrap_err();
        assert!(err.to_string().contains("permutations must be 24"));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_toml("api_key = \"sk-123\"").is_err());
    }

    #[test]
    fn parses_sections() {
        let cfg = RunConfig::from_toml(
            r#"
            length_setting = "medium128"
            [provider]
            kind = "openai"
            model = "gpt-x"
            [simulation]
            position_bias = [0.4, 0.3, 0.2, 0.1]
            [bootstrap]
            iterations = 20
            seed = 3
            ttest = "pooled"
            [baselines]
            methods = ["min_k", "prefix32"]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.provider.kind, ProviderKind::Openai);
        assert_eq!(cfg.length_setting, LengthSetting::Medium128);
        assert_eq!(cfg.bootstrap.iterations, 20);
        assert_eq!(
            cfg.baselines.methods,
            vec![BaselineMethod::MinK, BaselineMethod::Prefix32]
        );
        assert_ne!(cfg.config_hash(), RunConfig::default().config_hash());
    }
}
