//! A provider client with caching, rate limiting and retries. Talks to an
//! OpenAI-compatible server when `OPENAI_API_KEY` is set (and
//! `OPENAI_BASE_URL`, default the public API); otherwise uses the simulated
//! model so the cache behaviour can still be seen.
//!
//!     OPENAI_API_KEY=... cargo run --example providers -- gpt-4o-mini

use std::sync::Arc;
use std::time::Duration;

use decop::probe::{build_mcqa_prompt, enumerate_permutations, parse_answer, PromptStyle};
use decop::providers::{
    CompletionRequest, OpenAiProvider, Provider, RateLimiter, ResponseCache, SimulatedModel,
    SimulatedModelConfig, UreqTransport,
};
use decop::synth::{synthetic_items, SyntheticDoc};
use decop::{Client, Group, LengthSetting};

fn main() -> anyhow::Result<()> {
    let doc = SyntheticDoc::new("demo", Group::Clean);
    let items = synthetic_items(&doc, 1, LengthSetting::Short64, 0);

    let provider: Arc<dyn Provider> = match std::env::var("OPENAI_API_KEY") {
        Ok(key) => {
            let base = std::env::var("OPENAI_BASE_URL")
                .unwrap_or_else(|_| "https://api.openai.com/v1".into());
            let model = std::env::args()
                .nth(1)
                .unwrap_or_else(|| "gpt-4o-mini".into());
            let transport = Box::new(UreqTransport::new(Duration::from_secs(60)));
            Arc::new(OpenAiProvider::new(base, model, Some(key), transport).with_label_probs(true))
        }
        Err(_) => {
            println!("OPENAI_API_KEY not set; using the simulated model");
            let cfg = SimulatedModelConfig::uniform(0).with_memorization("demo", 0.0);
            let mut model = SimulatedModel::new("sim", cfg)?;
            model.learn_items(&items);
            Arc::new(model)
        }
    };

    let cache_dir = std::env::temp_dir().join("decop-example-cache");
    let client = Client::new(provider)
        .with_cache(ResponseCache::open(&cache_dir)?)
        .with_rate_limiter(RateLimiter::new(60.0, 5));

    for trial in enumerate_permutations(&items[0]).iter().take(4) {
        let prompt = build_mcqa_prompt(trial, &doc.title, &doc.author, PromptStyle::Chat);
        let reply = client.complete(&CompletionRequest::new(prompt, 0.0, 8))?;
        println!(
            "{} correct {} answered {:?} -> {:?}",
            trial.trial_id,
            trial.correct_label,
            reply,
            parse_answer(&reply)
        );
    }
    let c = client.counts();
    println!(
        "{} provider calls, {} cache hits, {} retries (cache in {})",
        c.provider_calls,
        c.cache_hits,
        c.retries,
        cache_dir.display()
    );
    Ok(())
}
