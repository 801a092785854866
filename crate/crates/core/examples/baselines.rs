//! Score passages with the reference-free baselines: perplexity, zlib,
//! lowercase, Min-K% Prob, prefix probing and name cloze.
//!
//!     cargo run --example baselines

use std::sync::Arc;

use decop::baselines::{
    aggregate_outcomes, mask_passage, run_document, BaselineMethod, BaselineParams,
};
use decop::providers::{SimulatedModel, SimulatedModelConfig};
use decop::synth::{synthetic_items, SyntheticDoc};
use decop::{Client, Group, LengthSetting};

fn main() -> anyhow::Result<()> {
    let seen = SyntheticDoc::new("seen", Group::Suspect);
    let unseen = SyntheticDoc::new("unseen", Group::Clean);
    let seen_items = synthetic_items(&seen, 8, LengthSetting::Medium128, 4);
    let unseen_items = synthetic_items(&unseen, 8, LengthSetting::Medium128, 4);

    let masked = mask_passage(seen_items[0].original())?;
    println!(
        "cloze: {:.90}... -> {}\n",
        masked.masked_text, masked.answer
    );

    let config = SimulatedModelConfig::uniform(4)
        .with_memorization("seen", 0.9)
        .with_memorization("unseen", 0.0);
    let mut model = SimulatedModel::new("sim", config)?;
    model.learn_items(seen_items.iter().chain(&unseen_items));
    let client = Client::new(Arc::new(model));

    let methods = [
        BaselineMethod::Perplexity,
        BaselineMethod::Zlib,
        BaselineMethod::Lowercase,
        BaselineMethod::MinK,
        BaselineMethod::Prefix32,
        BaselineMethod::NameCloze,
    ];
    for items in [&seen_items, &unseen_items] {
        let outcomes = run_document(&client, items, &methods, &BaselineParams::default())?;
        for s in aggregate_outcomes(&outcomes)? {
            println!(
                "{:>7} {:<11} {:>9.4}  ({})",
                s.doc_id,
                s.method.as_str(),
                s.value,
                s.direction.as_str()
            );
        }
    }
    Ok(())
}
