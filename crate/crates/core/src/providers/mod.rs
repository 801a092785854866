//! Uniform access to language models.
//!
//! A [`Provider`] talks to one model. A [`Client`] wraps a provider with the
//! on-disk response cache, a token-bucket rate limiter and retry with
//! exponential backoff; every stage of the pipeline goes through a client.

mod cache;
mod http;
mod ratelimit;
mod scripted;
mod simulated;

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::types::Label;

pub use cache::{CacheRecord, ResponseCache};
pub use http::{AnthropicProvider, HttpResponse, HttpTransport, OpenAiProvider, UreqTransport};
pub use ratelimit::RateLimiter;
pub use scripted::{ScriptedProvider, ScriptedReply};
pub use simulated::{
    simulate_answer, simulated_token_logprobs, SimulatedAnswer, SimulatedModel,
    SimulatedModelConfig,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ProviderError {
    #[error("rate limited")]
    RateLimited { retry_after: Option<Duration> },
    #[error("authentication failed: {0}")]
    Auth(String),
    #[error("transport error: {0}")]
    Transport(String),
    #[error("provider does not support {0}")]
    Unsupported(&'static str),
    #[error("none or only some of the answer labels appear among the reported top logprobs")]
    MissingLogprobs,
    #[error("invalid response: {0}")]
    InvalidResponse(String),
    #[error("request rejected: {0}")]
    Rejected(String),
    #[error("simulation: {0}")]
    Simulation(String),
    #[error("cache: {0}")]
    Cache(String),
}

impl ProviderError {
    fn is_retryable(&self) -> bool {
        matches!(
            self,
            ProviderError::RateLimited { .. } | ProviderError::Transport(_)
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Capabilities {
    /// Prompt in, text out.
    pub chat: bool,
    /// Reports probabilities of candidate single-token answers.
    pub label_probs: bool,
    /// Scores a supplied text token by token.
    pub token_logprobs: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prompt {
    Single(String),
    SystemUser { system: String, user: String },
}

impl Prompt {
    /// Everything the model sees, system text first.
    pub fn full_text(&self) -> String {
        match self {
            Prompt::Single(p) => p.clone(),
            Prompt::SystemUser { system, user } => format!("{system}\n{user}"),
        }
    }

    pub fn user_text(&self) -> &str {
        match self {
            Prompt::Single(p) => p,
            Prompt::SystemUser { user, .. } => user,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompletionRequest {
    pub prompt: Prompt,
    pub temperature: f64,
    pub max_tokens: u32,
    /// Retry ordinal. Part of the cache key only, so a retried request is not
    /// answered from the cache entry of the attempt that failed.
    #[serde(default, skip_serializing_if = "is_zero")]
    pub attempt: u32,
}

fn is_zero(n: &u32) -> bool {
    *n == 0
}

impl CompletionRequest {
    pub fn new(prompt: Prompt, temperature: f64, max_tokens: u32) -> Self {
        CompletionRequest {
            prompt,
            temperature,
            max_tokens,
            attempt: 0,
        }
    }
}

/// A completion together with the probability the model assigned to each
/// answer label as its answer token. `None` marks a label absent from the
/// reported top tokens.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelCompletion {
    pub text: String,
    pub label_probs: [Option<f64>; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenLogprob {
    pub token: String,
    pub logprob: f64,
}

pub trait Provider: Send + Sync {
    /// Provider kind, e.g. `openai`; part of the cache key.
    fn provider_name(&self) -> &str;
    fn model_name(&self) -> &str;
    fn capabilities(&self) -> Capabilities;

    fn complete(&self, request: &CompletionRequest) -> Result<String, ProviderError>;

    fn complete_with_label_probs(
        &self,
        _request: &CompletionRequest,
    ) -> Result<LabelCompletion, ProviderError> {
        Err(ProviderError::Unsupported("label probabilities"))
    }

    fn token_logprobs(&self, _text: &str) -> Result<Vec<TokenLogprob>, ProviderError> {
        Err(ProviderError::Unsupported("token logprobs"))
    }
}

/// Renormalizes raw label probabilities over the four labels. Any missing
/// label, or no probability mass at all, is [`ProviderError::MissingLogprobs`].
pub fn normalize_label_probs(raw: &[Option<f64>; 4]) -> Result<[f64; 4], ProviderError> {
    let mut probs = [0.0; 4];
    for (slot, p) in probs.iter_mut().zip(raw) {
        match p {
            Some(p) if p.is_finite() && *p >= 0.0 => *slot = *p,
            _ => return Err(ProviderError::MissingLogprobs),
        }
    }
    let total: f64 = probs.iter().sum();
    if total <= 0.0 {
        return Err(ProviderError::MissingLogprobs);
    }
    Ok(probs.map(|p| p / total))
}

/// `exp(l) / sum(exp(l))` over the four label logprobs, computed with the
/// maximum subtracted first.
pub fn normalize_label_logprobs(logprobs: &[Option<f64>; 4]) -> Result<[f64; 4], ProviderError> {
    let mut lps = [0.0; 4];
    for (slot, lp) in lps.iter_mut().zip(logprobs) {
        match lp {
            Some(lp) if !lp.is_nan() && *lp != f64::INFINITY => *slot = *lp,
            _ => return Err(ProviderError::MissingLogprobs),
        }
    }
    let max = lps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(ProviderError::MissingLogprobs);
    }
    let exps = lps.map(|lp| (lp - max).exp());
    let total: f64 = exps.iter().sum();
    Ok(exps.map(|e| e / total))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetryPolicy {
    pub max_attempts: u32,
    pub base_delay: Duration,
    pub max_delay: Duration,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy {
            max_attempts: 6,
            base_delay: Duration::from_millis(500),
            max_delay: Duration::from_secs(30),
        }
    }
}

impl RetryPolicy {
    /// No sleeping between attempts; for tests and simulated models.
    pub fn immediate(max_attempts: u32) -> Self {
        RetryPolicy {
            max_attempts,
            base_delay: Duration::ZERO,
            max_delay: Duration::ZERO,
        }
    }

    fn delay(&self, attempt: u32, err: &ProviderError) -> Duration {
        let backoff = self
            .base_delay
            .saturating_mul(1u32 << (attempt - 1).min(16))
            .min(self.max_delay);
        match err {
            ProviderError::RateLimited {
                retry_after: Some(ra),
            } => backoff.max(*ra).min(self.max_delay.max(*ra)),
            _ => backoff,
        }
    }
}

/// Counters for one client. `provider_calls` counts attempts that reached
/// the provider, which for remote providers are network requests.
#[derive(Debug, Default)]
pub struct CallStats {
    provider_calls: AtomicU64,
    cache_hits: AtomicU64,
    retries: AtomicU64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CallCounts {
    pub provider_calls: u64,
    pub cache_hits: u64,
    pub retries: u64,
}

impl CallStats {
    pub fn snapshot(&self) -> CallCounts {
        CallCounts {
            provider_calls: self.provider_calls.load(Ordering::Relaxed),
            cache_hits: self.cache_hits.load(Ordering::Relaxed),
            retries: self.retries.load(Ordering::Relaxed),
        }
    }
}

#[derive(Clone, Copy)]
enum CallKind {
    Complete,
    LabelProbs,
    TokenLogprobs,
}

impl CallKind {
    fn as_str(self) -> &'static str {
        match self {
            CallKind::Complete => "complete",
            CallKind::LabelProbs => "label_probs",
            CallKind::TokenLogprobs => "token_logprobs",
        }
    }
}

/// A provider behind cache, rate limiter and retry policy. Cheap to share
/// across worker threads by reference.
pub struct Client {
    provider: Arc<dyn Provider>,
    cache: Option<ResponseCache>,
    limiter: Option<RateLimiter>,
    retry: RetryPolicy,
    stats: CallStats,
}

impl Client {
    pub fn new(provider: Arc<dyn Provider>) -> Self {
        Client {
            provider,
            cache: None,
            limiter: None,
            retry: RetryPolicy::default(),
            stats: CallStats::default(),
        }
    }

    pub fn with_cache(mut self, cache: ResponseCache) -> Self {
        self.cache = Some(cache);
        self
    }

    pub fn with_rate_limiter(mut self, limiter: RateLimiter) -> Self {
        self.limiter = Some(limiter);
        self
    }

    pub fn with_retry(mut self, retry: RetryPolicy) -> Self {
        self.retry = retry;
        self
    }

    pub fn provider(&self) -> &dyn Provider {
        self.provider.as_ref()
    }

    pub fn model_name(&self) -> &str {
        self.provider.model_name()
    }

    pub fn capabilities(&self) -> Capabilities {
        self.provider.capabilities()
    }

    pub fn counts(&self) -> CallCounts {
        self.stats.snapshot()
    }

    pub fn complete(&self, request: &CompletionRequest) -> Result<String, ProviderError> {
        if !self.capabilities().chat {
            return Err(ProviderError::Unsupported("chat completion"));
        }
        self.cached(CallKind::Complete, request, || {
            self.provider.complete(request)
        })
    }

    /// Completion plus raw label probabilities, cached before normalization so
    /// a replay reproduces [`ProviderError::MissingLogprobs`] exactly.
    pub fn label_completion(
        &self,
        request: &CompletionRequest,
    ) -> Result<LabelCompletion, ProviderError> {
        if !self.capabilities().label_probs {
            return Err(ProviderError::Unsupported("label probabilities"));
        }
        self.cached(CallKind::LabelProbs, request, || {
            self.provider.complete_with_label_probs(request)
        })
    }

    /// Probabilities of A, B, C and D as the next answer token, summing to 1.
    pub fn label_probs(&self, request: &CompletionRequest) -> Result<[f64; 4], ProviderError> {
        normalize_label_probs(&self.label_completion(request)?.label_probs)
    }

    pub fn token_logprobs(&self, text: &str) -> Result<Vec<TokenLogprob>, ProviderError> {
        if !self.capabilities().token_logprobs {
            return Err(ProviderError::Unsupported("token logprobs"));
        }
        if text.is_empty() {
            return Ok(Vec::new());
        }
        self.cached(CallKind::TokenLogprobs, &text, || {
            self.provider.token_logprobs(text)
        })
    }

    fn cache_key<R: Serialize>(&self, kind: CallKind, request: &R) -> (String, serde_json::Value) {
        let request = serde_json::to_value(request).expect("requests serialize");
        let payload = serde_json::json!({
            "provider": self.provider.provider_name(),
            "model": self.provider.model_name(),
            "kind": kind.as_str(),
            "request": request,
        });
        let digest = Sha256::digest(payload.to_string().as_bytes());
        (hex::encode(digest), payload)
    }

    fn cached<R, T, F>(&self, kind: CallKind, request: &R, call: F) -> Result<T, ProviderError>
    where
        R: Serialize,
        T: Serialize + serde::de::DeserializeOwned,
        F: Fn() -> Result<T, ProviderError>,
    {
        let Some(cache) = &self.cache else {
            return self.with_retries(&call);
        };
        let (hash, payload) = self.cache_key(kind, request);
        if let Some(hit) = cache.get(&hash)? {
            if let Ok(value) = serde_json::from_value(hit.response) {
                self.stats.cache_hits.fetch_add(1, Ordering::Relaxed);
                return Ok(value);
            }
            log::warn!("cache record {hash} does not decode; refetching");
        }
        let value = self.with_retries(&call)?;
        let record = CacheRecord {
            request_hash: hash.clone(),
            provider: self.provider.provider_name().to_string(),
            model: self.provider.model_name().to_string(),
            request: payload,
            response: serde_json::to_value(&value).expect("responses serialize"),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        };
        cache.put(&record)?;
        Ok(value)
    }

    fn with_retries<T, F>(&self, call: &F) -> Result<T, ProviderError>
    where
        F: Fn() -> Result<T, ProviderError>,
    {
        let mut attempt = 0;
        loop {
            attempt += 1;
            if let Some(limiter) = &self.limiter {
                limiter.acquire();
            }
            self.stats.provider_calls.fetch_add(1, Ordering::Relaxed);
            match call() {
                Ok(v) => return Ok(v),
                Err(e) if e.is_retryable() && attempt < self.retry.max_attempts => {
                    let delay = self.retry.delay(attempt, &e);
                    log::warn!(
                        "{} attempt {attempt} failed ({e}); retrying in {delay:?}",
                        self.provider.provider_name()
                    );
                    self.stats.retries.fetch_add(1, Ordering::Relaxed);
                    if !delay.is_zero() {
                        thread::sleep(delay);
                    }
                }
                Err(e) => return Err(e),
            }
        }
    }
}

/// Maps a returned answer token to a label: `A`, ` a`, `(B`, `C.` all count.
pub(crate) fn token_label(token: &str) -> Option<Label> {
    let core = token.trim().trim_matches(|c: char| !c.is_alphanumeric());
    let mut chars = core.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Label::from_char(c),
        _ => None,
    }
}
