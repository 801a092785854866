//! A deterministic stand-in for a language model.
//!
//! The simulated model "memorizes" the passages it is taught, each document
//! with its own memorization rate `m`. Asked a multiple-choice question, it
//! answers correctly with probability `m` and otherwise picks a position from
//! its position bias, so its label probabilities are exactly
//! `m * onehot(correct) + (1 - m) * bias`. It also answers the paraphrase,
//! prefix-continuation and name-cloze prompts used elsewhere in the crate,
//! and scores text token by token with lower loss on memorized passages.
//!
//! Every random draw is keyed by a hash of the seed and the request content,
//! never by call order, so results do not depend on scheduling.

use std::collections::{BTreeMap, HashMap};
use std::sync::LazyLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{
    Capabilities, CompletionRequest, LabelCompletion, Provider, ProviderError, TokenLogprob,
};
use crate::baselines::{mask_passage, parse_cloze_prompt};
use crate::paraphrase::{format_paraphrase_response, parse_paraphrase_prompt, McqaItem};
use crate::probe::{split_mcqa_options, PermutationTrial};
use crate::synth::paraphrase_variants;
use crate::types::Label;

const UNRELATED: &str = "The weather had turned by then, and nobody in the village spoke of it again until the spring fair.";
const WRONG_NAME: &str = "unknown";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedModelConfig {
    /// Memorization rate per document id, each in `[0, 1]`.
    #[serde(default)]
    pub memorization: BTreeMap<String, f64>,
    /// Preference for answer positions A..D; normalized on validation.
    pub position_bias: [f64; 4],
    pub seed: u64,
    /// When set, every token scores exactly this logprob.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_token_logprob: Option<f64>,
}

impl SimulatedModelConfig {
    pub fn new(position_bias: [f64; 4], seed: u64) -> Result<Self, ProviderError> {
        let mut cfg = SimulatedModelConfig {
            memorization: BTreeMap::new(),
            position_bias,
            seed,
            fixed_token_logprob: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn uniform(seed: u64) -> Self {
        Self::new([0.25; 4], seed).expect("uniform bias is valid")
    }

    pub fn with_memorization(mut self, doc_id: impl Into<String>, rate: f64) -> Self {
        self.memorization.insert(doc_id.into(), rate);
        self
    }

    /// Checks rates and normalizes the position bias to sum to one.
    pub fn validate(&mut self) -> Result<(), ProviderError> {
        if self
            .position_bias
            .iter()
            .any(|b| !b.is_finite() || *b < 0.0)
        {
            return Err(ProviderError::Simulation(
                "position bias must be non-negative".into(),
            ));
        }
        let total: f64 = self.position_bias.iter().sum();
        if total <= 0.0 {
            return Err(ProviderError::Simulation(
                "position bias has no mass".into(),
            ));
        }
        self.position_bias = self.position_bias.map(|b| b / total);
        if let Some((doc, m)) = self
            .memorization
            .iter()
            .find(|(_, m)| !(0.0..=1.0).contains(*m))
        {
            return Err(ProviderError::Simulation(format!(
                "memorization rate {m} for {doc} is outside [0, 1]"
            )));
        }
        Ok(())
    }

    pub fn rate(&self, doc_id: &str) -> Result<f64, ProviderError> {
        self.memorization.get(doc_id).copied().ok_or_else(|| {
            ProviderError::Simulation(format!("no memorization rate for document {doc_id}"))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulatedAnswer {
    pub label: Label,
    pub label_probs: [f64; 4],
}

fn keyed_rng(seed: u64, domain: &str, parts: &[&str]) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(domain.as_bytes());
    for p in parts {
        h.update([0x1f]);
        h.update(p.as_bytes());
    }
    let digest = h.finalize();
    let mut bytes = [0u8; 32];
    bytes.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(bytes)
}

fn draw(
    config: &SimulatedModelConfig,
    options: &[&str],
    rate: f64,
    correct: Option<Label>,
) -> SimulatedAnswer {
    let bias = config.position_bias;
    let mut rng = keyed_rng(config.seed, "mcqa", options);
    let knows: f64 = rng.gen();
    let pick: f64 = rng.gen();
    let (label, probs) = match correct {
        Some(c) => {
            let mut probs = bias.map(|b| (1.0 - rate) * b);
            probs[c.index()] += rate;
            let label = if knows < rate {
                c
            } else {
                sample_position(&bias, pick)
            };
            (label, probs)
        }
        None => (sample_position(&bias, pick), bias),
    };
    SimulatedAnswer {
        label,
        label_probs: probs,
    }
}

fn sample_position(bias: &[f64; 4], u: f64) -> Label {
    let mut acc = 0.0;
    for (i, b) in bias.iter().enumerate() {
        acc += b;
        if u < acc {
            return Label::ALL[i];
        }
    }
    // u within rounding of 1.0: the last position with any mass.
    let last = bias.iter().rposition(|b| *b > 0.0).unwrap_or(3);
    Label::ALL[last]
}

/// Answer of the simulated model to one permutation trial of `doc_id`.
pub fn simulate_answer(
    config: &SimulatedModelConfig,
    trial: &PermutationTrial,
    doc_id: &str,
) -> Result<SimulatedAnswer, ProviderError> {
    let rate = config.rate(doc_id)?;
    let options: Vec<&str> = trial.options.iter().map(String::as_str).collect();
    Ok(draw(config, &options, rate, Some(trial.correct_label)))
}

static TOKEN: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\s*\S+").unwrap());

/// Splits `text` into whitespace-led tokens that concatenate back to `text`
/// and scores each. Memorized text gets its loss scaled by `1 - 0.8 m`.
pub fn simulated_token_logprobs(
    config: &SimulatedModelConfig,
    text: &str,
    rate: Option<f64>,
) -> Vec<TokenLogprob> {
    let mut tokens: Vec<String> = TOKEN
        .find_iter(text)
        .map(|m| m.as_str().to_string())
        .collect();
    let consumed: usize = tokens.iter().map(String::len).sum();
    if consumed < text.len() {
        match tokens.last_mut() {
            Some(last) => last.push_str(&text[consumed..]),
            None => return Vec::new(),
        }
    }
    let scale = 1.0 - 0.8 * rate.unwrap_or(0.0);
    tokens
        .into_iter()
        .map(|token| {
            let logprob = match config.fixed_token_logprob {
                Some(lp) => lp,
                None => {
                    let u: f64 = keyed_rng(config.seed, "token", &[token.trim()]).gen();
                    -(1.0 + 5.0 * u) * scale
                }
            };
            TokenLogprob { token, logprob }
        })
        .collect()
}

/// The simulated model: a configuration plus the passages it has seen.
#[derive(Debug, Clone)]
pub struct SimulatedModel {
    model: String,
    config: SimulatedModelConfig,
    library: HashMap<String, String>,
    originals: Vec<(String, String)>,
    cloze: HashMap<String, (String, String)>,
}

impl SimulatedModel {
    pub fn new(
        model: impl Into<String>,
        mut config: SimulatedModelConfig,
    ) -> Result<Self, ProviderError> {
        config.validate()?;
        Ok(SimulatedModel {
            model: model.into(),
            config,
            library: HashMap::new(),
            originals: Vec::new(),
            cloze: HashMap::new(),
        })
    }

    pub fn config(&self) -> &SimulatedModelConfig {
        &self.config
    }

    /// Registers a verbatim passage of `doc_id`.
    pub fn learn(&mut self, doc_id: &str, text: &str) {
        let text = text.trim();
        if self
            .library
            .insert(text.to_string(), doc_id.to_string())
            .is_some()
        {
            return;
        }
        self.originals.push((text.to_string(), doc_id.to_string()));
        if let Ok(masked) = mask_passage(text) {
            self.cloze
                .insert(masked.masked_text, (masked.answer, doc_id.to_string()));
        }
    }

    pub fn learn_items<'a>(&mut self, items: impl IntoIterator<Item = &'a McqaItem>) {
        for item in items {
            self.learn(&item.meta.doc_id, item.original());
        }
    }

    fn answer_mcqa(&self, options: &[&str; 4]) -> Result<SimulatedAnswer, ProviderError> {
        let known = options
            .iter()
            .enumerate()
            .find_map(|(i, o)| self.library.get(o.trim()).map(|doc| (Label::ALL[i], doc)));
        match known {
            Some((label, doc)) => Ok(draw(
                &self.config,
                options,
                self.config.rate(doc)?,
                Some(label),
            )),
            None => Ok(draw(&self.config, options, 0.0, None)),
        }
    }

    fn continue_prefix(&self, prefix: &str, max_tokens: u32) -> Result<String, ProviderError> {
        let prefix = prefix.trim_end();
        let hit = self
            .originals
            .iter()
            .find(|(text, _)| text.len() > prefix.len() && text.starts_with(prefix));
        let Some((text, doc)) = hit else {
            return Ok(UNRELATED.to_string());
        };
        let rate = self.config.rate(doc)?;
        let u: f64 = keyed_rng(self.config.seed, "prefix", &[prefix]).gen();
        if u < rate {
            let rest: Vec<&str> = text[prefix.len()..]
                .split_whitespace()
                .take(max_tokens as usize)
                .collect();
            Ok(rest.join(" "))
        } else {
            Ok(UNRELATED.to_string())
        }
    }

    fn fill_cloze(&self, masked: &str) -> Result<String, ProviderError> {
        let Some((answer, doc)) = self.cloze.get(masked.trim()) else {
            return Ok(WRONG_NAME.to_string());
        };
        let rate = self.config.rate(doc)?;
        let u: f64 = keyed_rng(self.config.seed, "cloze", &[masked]).gen();
        Ok(if u < rate {
            answer.clone()
        } else {
            WRONG_NAME.to_string()
        })
    }
}

impl Provider for SimulatedModel {
    fn provider_name(&self) -> &str {
        "simulated"
    }

    fn model_name(&self) -> &str {
        &self.model
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            chat: true,
            label_probs: true,
            token_logprobs: true,
        }
    }

    fn complete(&self, request: &CompletionRequest) -> Result<String, ProviderError> {
        let user = request.prompt.user_text();
        if let Some(options) = split_mcqa_options(user) {
            return Ok(self.answer_mcqa(&options)?.label.to_string());
        }
        if let Some(reference) = parse_paraphrase_prompt(user) {
            let variants = paraphrase_variants(reference, self.config.seed);
            return Ok(format_paraphrase_response(&variants));
        }
        if let Some(masked) = parse_cloze_prompt(user) {
            return self.fill_cloze(masked);
        }
        self.continue_prefix(user, request.max_tokens)
    }

    fn complete_with_label_probs(
        &self,
        request: &CompletionRequest,
    ) -> Result<LabelCompletion, ProviderError> {
        let options = split_mcqa_options(request.prompt.user_text()).ok_or_else(|| {
            ProviderError::Simulation("label probabilities need a multiple-choice prompt".into())
        })?;
        let answer = self.answer_mcqa(&options)?;
        Ok(LabelCompletion {
            text: answer.label.to_string(),
            label_probs: answer.label_probs.map(Some),
        })
    }

    fn token_logprobs(&self, text: &str) -> Result<Vec<TokenLogprob>, ProviderError> {
        let rate = match self.library.get(text.trim()) {
            Some(doc) => Some(self.config.rate(doc)?),
            None => None,
        };
        Ok(simulated_token_logprobs(&self.config, text, rate))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(correct: usize, salt: usize) -> PermutationTrial {
        let mut options: [String; 4] =
            std::array::from_fn(|i| format!("option {i} of trial {salt}"));
        options[correct] = format!("original {salt}");
        PermutationTrial {
            trial_id: format!("t{salt}"),
            passage_id: "p".into(),
            ordering: [0, 1, 2, 3],
            correct_label: Label::ALL[correct],
            options,
        }
    }

    #[test]
    fn full_memorization_is_always_correct() {
        let cfg = SimulatedModelConfig::uniform(1).with_memorization("d", 1.0);
        for i in 0..200 {
            let t = trial(i % 4, i);
            assert_eq!(
                simulate_answer(&cfg, &t, "d").unwrap().label,
                t.correct_label
            );
        }
    }

    #[test]
    fn zero_memorization_follows_one_hot_bias() {
        let cfg = SimulatedModelConfig::new([1.0, 0.0, 0.0, 0.0], 3)
            .unwrap()
            .with_memorization("d", 0.0);
        for i in 0..200 {
            let a = simulate_answer(&cfg, &trial(i % 4, i), "d").unwrap();
            assert_eq!(a.label, Label::A);
            assert_eq!(a.label_probs, [1.0, 0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn half_memorization_is_correct_five_eighths_of_the_time() {
        // P(correct) = m + (1 - m) / 4 = 0.625 for m = 0.5 under a uniform bias.
        let cfg = SimulatedModelConfig::uniform(42).with_memorization("d", 0.5);
        let n = 10_000;
        let correct = (0..n)
            .filter(|&i| {
                let t = trial(i % 4, i);
                simulate_answer(&cfg, &t, "d").unwrap().label == t.correct_label
            })
            .count();
        let rate = correct as f64 / n as f64;
        assert!((rate - 0.625).abs() <= 0.03, "rate {rate}");
    }

    #[test]
    fn label_probs_are_the_exact_mixture() {
        let cfg = SimulatedModelConfig::new([0.4, 0.3, 0.2, 0.1], 9)
            .unwrap()
            .with_memorization("d", 0.3);
        let a = simulate_answer(&cfg, &trial(2, 0), "d").unwrap();
        let expected = [0.28, 0.21, 0.3 + 0.14, 0.07];
        for (p, e) in a.label_probs.iter().zip(expected) {
            assert!((p - e).abs() < 1e-12);
        }
        assert!((a.label_probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn answers_are_pure_functions_of_seed_and_content() {
        let cfg = SimulatedModelConfig::uniform(5).with_memorization("d", 0.5);
        let t = trial(1, 7);
        let a = simulate_answer(&cfg, &t, "d").unwrap();
        for _ in 0..10 {
            assert_eq!(simulate_answer(&cfg, &t, "d").unwrap(), a);
        }
    }

    #[test]
    fn unknown_document_is_an_error() {
        let cfg = SimulatedModelConfig::uniform(5);
        assert!(simulate_answer(&cfg, &trial(0, 0), "missing").is_err());
    }

    #[test]
    fn bias_is_normalized_and_validated() {
        let cfg = SimulatedModelConfig::new([2.0, 1.0, 1.0, 0.0], 0).unwrap();
        assert_eq!(cfg.position_bias, [0.5, 0.25, 0.25, 0.0]);
        assert!(SimulatedModelConfig::new([0.0; 4], 0).is_err());
        assert!(SimulatedModelConfig::new([-1.0, 1.0, 1.0, 1.0], 0).is_err());
        let mut bad = SimulatedModelConfig::uniform(0).with_memorization("d", 1.5);
        assert!(bad.validate().is_err());
    }

    #[test]
    fn token_logprobs_concatenate_to_input() {
        let mut cfg = SimulatedModelConfig::uniform(0);
        cfg.fixed_token_logprob = Some(-std::f64::consts::LN_2);
        let toks = simulated_token_logprobs(&cfg, "a b", None);
        assert_eq!(toks.len(), 2);
        assert_eq!(toks[0].token, "a");
        assert_eq!(toks[1].token, " b");
        assert!(toks.iter().all(|t| t.logprob == -std::f64::consts::LN_2));

        let text = "  Leading and trailing  \n";
        let toks = simulated_token_logprobs(&SimulatedModelConfig::uniform(0), text, None);
        assert_eq!(
            toks.iter().map(|t| t.token.as_str()).collect::<String>(),
            text
        );
        assert!(simulated_token_logprobs(&cfg, "", None).is_empty());
        assert!(simulated_token_logprobs(&cfg, "   ", None).is_empty());
    }

    #[test]
    fn memorized_text_scores_higher() {
        let cfg = SimulatedModelConfig::uniform(0);
        let text = "It was a bright cold day in April.";
        let seen: f64 = simulated_token_logprobs(&cfg, text, Some(1.0))
            .iter()
            .map(|t| t.logprob)
            .sum();
        let unseen: f64 = simulated_token_logprobs(&cfg, text, None)
            .iter()
            .map(|t| t.logprob)
            .sum();
        assert!(seen > unseen);
    }
}
