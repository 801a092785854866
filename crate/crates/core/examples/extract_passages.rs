//! Clean a raw document and pull fixed-length passages out of it.
//!
//!     cargo run --example extract_passages

use decop::corpus::{clean_text, extract_passages};
use decop::{Document, Group, LengthSetting};

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
    let cleaned = clean_text(doc.raw_text())?;
    println!(
        "{} words after cleaning",
        cleaned.split_whitespace().count()
    );

    for setting in [LengthSetting::Short64, LengthSetting::Medium128] {
        let passages = extract_passages(&doc, setting, 4, 7)?;
        println!("\n{setting}:");
        for p in passages {
            println!(
                "  {} ({} words): {:.70}...",
                p.passage_id(),
                p.word_count(),
                p.text()
            );
        }
    }
    match extract_passages(&doc, LengthSetting::Long256, 10, 7) {
        Err(e) => println!("\nlong256 x10: {e}"),
        Ok(ps) => println!("\nlong256 x10: {} passages", ps.len()),
    }
    Ok(())
}
