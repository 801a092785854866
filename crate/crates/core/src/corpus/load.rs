use std::collections::HashSet;
use std::fs;
use std::path::Path;

use serde::Serialize;

use super::schema::{read_records, write_lines, SchemaError};
use super::{CorpusError, Document, Passage};
use crate::paraphrase::{BenchmarkRecord, McqaItem};
use crate::types::{Group, Label, LengthSetting};

fn check_unique(seen: &mut HashSet<String>, id: &str, record: usize) -> Result<(), CorpusError> {
    if seen.insert(id.to_string()) {
        Ok(())
    } else {
        Err(CorpusError::DuplicateId {
            id: id.to_string(),
            record,
        })
    }
}

/// Loads a corpus manifest of `{doc_id, title, author, publication_year, group, file}`
/// records. `file` is resolved relative to the manifest's directory.
pub fn load_corpus(manifest: &Path) -> Result<Vec<Document>, CorpusError> {
    let base = manifest.parent().unwrap_or(Path::new("."));
    let mut seen = HashSet::new();
    let mut docs = Vec::new();
    for rec in read_records(manifest)? {
        let doc_id = rec.str("doc_id")?;
        let title = rec.str("title")?;
        let author = rec.str("author")?;
        let year = rec.int("publication_year")?;
        let year = i32::try_from(year).map_err(|_| SchemaError {
            record: rec.number,
            field: "publication_year".into(),
            reason: "out of range".into(),
        })?;
        let group: Group = rec.parsed("group")?;
        let file = base.join(rec.str("file")?);
        check_unique(&mut seen, doc_id, rec.number)?;
        let raw = fs::read_to_string(&file).map_err(|source| CorpusError::Io {
            path: file.clone(),
            source,
        })?;
        let doc = Document::new(doc_id, title, author, year, group, raw).map_err(|e| {
            CorpusError::InvalidRecord {
                record: rec.number,
                source: Box::new(e),
            }
        })?;
        docs.push(doc);
    }
    Ok(docs)
}

#[derive(Serialize)]
struct PassageRecord<'a> {
    passage_id: &'a str,
    doc_id: &'a str,
    index: usize,
    text: &'a str,
    length_setting: LengthSetting,
    word_count: usize,
}

pub fn save_passages(path: &Path, passages: &[Passage]) -> Result<(), CorpusError> {
    let records: Vec<PassageRecord> = passages
        .iter()
        .map(|p| PassageRecord {
            passage_id: p.passage_id(),
            doc_id: p.doc_id(),
            index: p.index(),
            text: p.text(),
            length_setting: p.length_setting(),
            word_count: p.word_count(),
        })
        .collect();
    write_lines(path, &records)
}

pub fn load_passages(path: &Path) -> Result<Vec<Passage>, CorpusError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for rec in read_records(path)? {
        let passage_id = rec.str("passage_id")?;
        let doc_id = rec.str("doc_id")?;
        let index = rec.int("index")?;
        let text = rec.str("text")?;
        let setting: LengthSetting = rec.parsed("length_setting")?;
        let stored_count = rec.int("word_count")?;
        check_unique(&mut seen, passage_id, rec.number)?;
        let passage = Passage::new(passage_id, doc_id, index.max(0) as usize, text, setting)
            .map_err(|e| CorpusError::InvalidRecord {
                record: rec.number,
                source: Box::new(e),
            })?;
        if passage.word_count() as i64 != stored_count {
            return Err(SchemaError {
                record: rec.number,
                field: "word_count".into(),
                reason: format!("stored {stored_count}, text has {}", passage.word_count()),
            }
            .into());
        }
        out.push(passage);
    }
    Ok(out)
}

/// Loads a benchmark of `{passage_id, doc_id, title, author, group,
/// length_setting, options: [4], label}` records; `options[label]` is the
/// verbatim passage.
pub fn load_benchmark(path: &Path) -> Result<Vec<McqaItem>, CorpusError> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for rec in read_records(path)? {
        let options = rec.str_array("options")?;
        let options: [String; 4] = options.try_into().map_err(|v: Vec<String>| SchemaError {
            record: rec.number,
            field: "options".into(),
            reason: format!("expected exactly 4 options, found {}", v.len()),
        })?;
        let record = BenchmarkRecord {
            passage_id: rec.str("passage_id")?.to_string(),
            doc_id: rec.str("doc_id")?.to_string(),
            title: rec.str("title")?.to_string(),
            author: rec.str("author")?.to_string(),
            group: rec.parsed("group")?,
            length_setting: rec.parsed("length_setting")?,
            options,
            label: rec.parsed::<Label>("label")?,
            paraphrase_model: rec.opt_str("paraphrase_model")?.map(str::to_string),
        };
        check_unique(&mut seen, &record.passage_id, rec.number)?;
        let item = McqaItem::from_record(record).map_err(|e| CorpusError::InvalidRecord {
            record: rec.number,
            source: Box::new(e),
        })?;
        out.push(item);
    }
    Ok(out)
}

pub fn save_benchmark(path: &Path, items: &[McqaItem]) -> Result<(), CorpusError> {
    let records: Vec<BenchmarkRecord> = items.iter().map(McqaItem::to_record).collect();
    write_lines(path, &records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_manifest_is_empty_corpus() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.jsonl");
        fs::write(&path, "").unwrap();
        assert!(load_corpus(&path).unwrap().is_empty());
        assert!(load_benchmark(&path).unwrap().is_empty());
    }

    #[test]
    fn manifest_resolves_files_and_rejects_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        fs::write(dir.path().join("a.txt"), "Some text.").unwrap();
        let rec = r#"{"doc_id":"a","title":"T","author":"X","publication_year":2001,"group":"suspect","file":"a.txt"}"#;
        let path = dir.path().join("m.jsonl");
        fs::write(&path, format!("{rec}\n")).unwrap();
        let docs = load_corpus(&path).unwrap();
        assert_eq!(docs[0].raw_text(), "Some text.");

        fs::write(&path, format!("{rec}\n\n{rec}\n")).unwrap();
        assert!(matches!(
            load_corpus(&path),
            Err(CorpusError::DuplicateId { record: 2, .. })
        ));
    }

    #[test]
    fn manifest_missing_field_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.jsonl");
        fs::write(&path, r#"{"doc_id":"a","title":"T","publication_year":2001,"group":"suspect","file":"a.txt"}"#).unwrap();
        match load_corpus(&path) {
            Err(CorpusError::Schema(e)) => {
                assert_eq!(e.field, "author");
                assert_eq!(e.record, 1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
