use std::fs;
use std::path::{Path, PathBuf};

use decop::corpus::{clean_text, extract_passages, load_benchmark, save_benchmark};
use decop::{Document, Group, LengthSetting};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[test]
fn dirty_page_cleans_to_golden() {
    let raw = fs::read_to_string(fixture("dirty_page.txt")).unwrap();
    let want = fs::read_to_string(fixture("clean_page.txt")).unwrap();
    assert_eq!(clean_text(&raw).unwrap(), want);
}

#[test]
fn public_domain_short_passages_stay_in_band() {
    let text = fs::read_to_string(fixture("public_domain.txt")).unwrap();
    let doc = Document::new(
        "austen",
        "Pride and Prejudice",
        "Jane Austen",
        1813,
        Group::Suspect,
        text,
    )
    .unwrap();
    let passages = extract_passages(&doc, LengthSetting::Short64, 10, 1).unwrap();
    assert_eq!(passages.len(), 10);
    for p in &passages {
        assert!(
            (38..=58).contains(&p.word_count()),
            "{}: {}",
            p.passage_id(),
            p.word_count()
        );
    }
    let again = extract_passages(&doc, LengthSetting::Short64, 10, 1).unwrap();
    assert_eq!(passages, again);
}

#[test]
fn benchmark_round_trip_is_byte_identical() {
    let src = fixture("benchmark.jsonl");
    let items = load_benchmark(&src).unwrap();
    assert_eq!(items.len(), 3);
    assert_eq!(items[1].original(), "Mr. Bennet gave his wife no answer at all, and returned to the newspaper he had been reading.");
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("benchmark.jsonl");
    save_benchmark(&out, &items).unwrap();
    assert_eq!(fs::read(&src).unwrap(), fs::read(&out).unwrap());
}
