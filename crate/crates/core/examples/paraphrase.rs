//! Build the paraphrase prompt for a passage, ask a model for three
//! rewrites, and keep them only if they pass the quality gate.
//!
//!     cargo run --example paraphrase

use std::sync::Arc;

use decop::corpus::extract_passages;
use decop::paraphrase::{build_paraphrase_prompt, generate_paraphrases, DEFAULT_RETRIES};
use decop::providers::{SimulatedModel, SimulatedModelConfig};
use decop::{Client, Document, Group, LengthSetting};

fn main() -> anyhow::Result<()> {
    let raw = include_str!("../tests/fixtures/public_domain.txt");
    let doc = Document::new(
        "austen",
        "Pride and Prejudice",
        "Jane Austen",
        1813,
        Group::Suspect,
        raw,
    )?;
    let passage = extract_passages(&doc, LengthSetting::Short64, 1, 3)?.remove(0);

    println!(
        "prompt:\n{}\n",
        build_paraphrase_prompt(passage.length_setting(), passage.text())
    );

    // The simulated model answers paraphrase prompts with word-order rewrites.
    let model = SimulatedModel::new("sim-paraphraser", SimulatedModelConfig::uniform(0))?;
    let client = Client::new(Arc::new(model));
    let item = generate_paraphrases(&client, &passage, &doc, DEFAULT_RETRIES)?;
    for (label, text) in ["A", "B", "C", "D"].iter().zip(item.sources()) {
        println!("{label}. {text}");
    }
    println!("\nrecord: {}", serde_json::to_string(&item.to_record())?);
    Ok(())
}
