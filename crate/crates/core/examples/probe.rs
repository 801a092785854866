//! Score one document: every passage under all 24 option orderings.
//!
//!     cargo run --example probe

use std::sync::Arc;

use decop::probe::{
    build_mcqa_prompt, enumerate_permutations, score_document, ProbeOptions, PromptStyle,
};
use decop::providers::{SimulatedModel, SimulatedModelConfig};
use decop::synth::{synthetic_items, SyntheticDoc};
use decop::{Client, Group, LengthSetting};

fn main() -> anyhow::Result<()> {
    let seen = SyntheticDoc::new("seen", Group::Suspect);
    let unseen = SyntheticDoc::new("unseen", Group::Clean);
    let seen_items = synthetic_items(&seen, 10, LengthSetting::Short64, 1);
    let unseen_items = synthetic_items(&unseen, 10, LengthSetting::Short64, 1);

    let trial = &enumerate_permutations(&seen_items[0])[5];
    let prompt = build_mcqa_prompt(trial, &seen.title, &seen.author, PromptStyle::Chat);
    println!(
        "{} (correct {}):\n{}\n",
        trial.trial_id,
        trial.correct_label,
        prompt.full_text()
    );

    // Memorized at 0.7, answering "A" half the time when it does not know.
    let config = SimulatedModelConfig::new([0.5, 0.2, 0.2, 0.1], 3)?
        .with_memorization("seen", 0.7)
        .with_memorization("unseen", 0.0);
    let mut model = SimulatedModel::new("sim", config)?;
    model.learn_items(seen_items.iter().chain(&unseen_items));
    let client = Client::new(Arc::new(model));

    for items in [&seen_items, &unseen_items] {
        let (score, transcript) = score_document(&client, items, None, &ProbeOptions::default())?;
        println!(
            "{}: {}/{} correct = {:.3} ({} refusals, {} trials in transcript)",
            score.doc_id,
            score.n_correct,
            score.n_trials,
            score.accuracy,
            score.refusal_count,
            transcript.len()
        );
    }
    Ok(())
}
