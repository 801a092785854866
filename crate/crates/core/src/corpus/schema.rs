//! Field-level validation of line-delimited JSON records.

use std::fs;
use std::path::Path;
use std::sync::LazyLock;

use regex::Regex;
use serde_json::{Map, Value};
use thiserror::Error;

use super::CorpusError;

pub(crate) static TAG: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"<[^<>]*>").unwrap());

/// A record that does not conform to its file schema. `record` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("record {record}: field `{field}`: {reason}")]
pub struct SchemaError {
    pub record: usize,
    pub field: String,
    pub reason: String,
}

pub(crate) struct Record {
    pub number: usize,
    obj: Map<String, Value>,
}

impl Record {
    fn error(&self, field: &str, reason: impl Into<String>) -> SchemaError {
        SchemaError {
            record: self.number,
            field: field.to_string(),
            reason: reason.into(),
        }
    }

    fn get(&self, field: &str) -> Result<&Value, SchemaError> {
        self.obj
            .get(field)
            .filter(|v| !v.is_null())
            .ok_or_else(|| self.error(field, "missing"))
    }

    pub fn str(&self, field: &str) -> Result<&str, SchemaError> {
        self.get(field)?
            .as_str()
            .ok_or_else(|| self.error(field, "expected a string"))
    }

    pub fn opt_str(&self, field: &str) -> Result<Option<&str>, SchemaError> {
        match self.obj.get(field) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_str()
                .map(Some)
                .ok_or_else(|| self.error(field, "expected a string")),
        }
    }

    pub fn int(&self, field: &str) -> Result<i64, SchemaError> {
        self.get(field)?
            .as_i64()
            .ok_or_else(|| self.error(field, "expected an integer"))
    }

    pub fn parsed<T>(&self, field: &str) -> Result<T, SchemaError>
    where
        T: std::str::FromStr<Err = String>,
    {
        self.str(field)?.parse().map_err(|e| self.error(field, e))
    }

    pub fn str_array(&self, field: &str) -> Result<Vec<String>, SchemaError> {
        let arr = self
            .get(field)?
            .as_array()
            .ok_or_else(|| self.error(field, "expected an array"))?;
        arr.iter()
            .map(|v| {
                v.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| self.error(field, "expected an array of strings"))
            })
            .collect()
    }
}

/// Reads a line-delimited JSON file into object records, skipping blank lines.
pub(crate) fn read_records(path: &Path) -> Result<Vec<Record>, CorpusError> {
    let content = fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut out = Vec::new();
    for (i, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let number = out.len() + 1;
        let value: Value = serde_json::from_str(line).map_err(|e| SchemaError {
            record: number,
            field: "<record>".into(),
            reason: format!("line {}: {e}", i + 1),
        })?;
        match value {
            Value::Object(obj) => out.push(Record { number, obj }),
            _ => {
                return Err(SchemaError {
                    record: number,
                    field: "<record>".into(),
                    reason: "expected a JSON object".into(),
                }
                .into())
            }
        }
    }
    Ok(out)
}

pub(crate) fn write_lines<T: serde::Serialize>(
    path: &Path,
    records: &[T],
) -> Result<(), CorpusError> {
    let mut buf = String::new();
    for r in records {
        buf.push_str(&serde_json::to_string(r).expect("records serialize"));
        buf.push('\n');
    }
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|source| CorpusError::Io {
            path: parent.to_path_buf(),
            source,
        })?;
    }
    fs::write(path, buf).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}
