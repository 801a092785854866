use std::sync::Arc;
use std::time::Duration;

use sha2::{Digest, Sha256};

use super::{PipelineError, ProviderConfig, ProviderKind, RunConfig};
use crate::paraphrase::McqaItem;
use crate::providers::{
    AnthropicProvider, Client, OpenAiProvider, Provider, RateLimiter, ResponseCache,
    SimulatedModel, SimulatedModelConfig, UreqTransport,
};
use crate::types::Group;

const OPENAI_URL: &str = "https://api.openai.com/v1";
const ANTHROPIC_URL: &str = "https://api.anthropic.com";

/// Reads the API key for `kind` from the environment.
pub fn credential(kind: ProviderKind) -> Result<Option<String>, PipelineError> {
    match kind.credential_var() {
        None => Ok(None),
        Some(var) => match std::env::var(var) {
            Ok(v) if !v.trim().is_empty() => Ok(Some(v)),
            _ => Err(PipelineError::Credentials(var)),
        },
    }
}

/// Simulated model config covering every document in `items`.
pub fn simulated_config(
    cfg: &RunConfig,
    items: &[McqaItem],
) -> Result<SimulatedModelConfig, PipelineError> {
    let sim = &cfg.simulation;
    let mut config = SimulatedModelConfig::new(sim.position_bias, sim.seed)?;
    for item in items {
        let doc = &item.meta.doc_id;
        let rate = sim
            .memorization
            .get(doc)
            .copied()
            .unwrap_or(match item.meta.group {
                Group::Suspect => sim.suspect_rate,
                Group::Clean => sim.clean_rate,
            });
        config.memorization.insert(doc.clone(), rate);
    }
    Ok(config)
}

/// Model name tagged with a digest of everything that shapes simulated
/// answers, so cache entries never cross configurations.
fn simulated_model_name(base: &str, config: &SimulatedModelConfig, items: &[McqaItem]) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_string(config).expect("config serializes"));
    let mut known: Vec<(&str, &str)> = items
        .iter()
        .map(|i| (i.meta.doc_id.as_str(), i.original()))
        .collect();
    known.sort_unstable();
    known.dedup();
    for (doc, text) in known {
        h.update([0x1e]);
        h.update(doc);
        h.update([0x1f]);
        h.update(text);
    }
    format!("{base}@{}", &hex::encode(h.finalize())[..12])
}

/// Builds a cached, rate-limited client. A simulated model learns the
/// verbatim passages of `items` first. Missing credentials are reported
/// here, before any request.
pub fn build_client(
    cfg: &RunConfig,
    which: &ProviderConfig,
    items: &[McqaItem],
) -> Result<Client, PipelineError> {
    let provider: Arc<dyn Provider> = match which.kind {
        ProviderKind::Simulated => {
            let config = simulated_config(cfg, items)?;
            let name = simulated_model_name(&which.model, &config, items);
            let mut model = SimulatedModel::new(name, config)?;
            model.learn_items(items);
            Arc::new(model)
        }
        ProviderKind::Openai => {
            let key = credential(which.kind)?;
            let transport = UreqTransport::new(Duration::from_secs(which.timeout_secs));
            Arc::new(
                OpenAiProvider::new(
                    which.base_url.as_deref().unwrap_or(OPENAI_URL),
                    &which.model,
                    key,
                    Box::new(transport),
                )
                .with_label_probs(which.label_probs)
                .with_token_logprobs(which.token_logprobs),
            )
        }
        ProviderKind::Anthropic => {
            let key = credential(which.kind)?.expect("anthropic has a credential variable");
            let transport = UreqTransport::new(Duration::from_secs(which.timeout_secs));
            Arc::new(AnthropicProvider::new(
                which.base_url.as_deref().unwrap_or(ANTHROPIC_URL),
                &which.model,
                key,
                Box::new(transport),
            ))
        }
    };
    let mut client = Client::new(provider).with_cache(ResponseCache::open(&cfg.cache_dir)?);
    if which.kind != ProviderKind::Simulated {
        client = client.with_rate_limiter(RateLimiter::new(
            cfg.rate_limit.requests_per_minute,
            cfg.rate_limit.burst,
        ));
    }
    Ok(client)
}
