use std::fs;
use std::io::ErrorKind;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use super::ProviderError;

/// One cached interaction, stored as a single JSON line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheRecord {
    pub request_hash: String,
    pub provider: String,
    pub model: String,
    pub request: serde_json::Value,
    pub response: serde_json::Value,
    pub timestamp: String,
}

/// Content-addressed response store: `<dir>/<hash[..2]>/<hash>.jsonl`.
///
/// Writes go to a temporary file that is renamed into place, so concurrent
/// writers of the same key leave one complete record behind.
#[derive(Debug)]
pub struct ResponseCache {
    dir: PathBuf,
    tmp_counter: AtomicU64,
}

impl ResponseCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, ProviderError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)
            .map_err(|e| ProviderError::Cache(format!("{}: {e}", dir.display())))?;
        Ok(ResponseCache {
            dir,
            tmp_counter: AtomicU64::new(0),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, hash: &str) -> PathBuf {
        self.dir.join(&hash[..2]).join(format!("{hash}.jsonl"))
    }

    pub fn get(&self, hash: &str) -> Result<Option<CacheRecord>, ProviderError> {
        let path = self.path(hash);
        match fs::read_to_string(&path) {
            Ok(s) => match serde_json::from_str::<CacheRecord>(s.trim_end()) {
                Ok(rec) if rec.request_hash == hash => Ok(Some(rec)),
                _ => {
                    log::warn!("ignoring corrupt cache record {}", path.display());
                    Ok(None)
                }
            },
            Err(e) if e.kind() == ErrorKind::NotFound => Ok(None),
            Err(e) => Err(ProviderError::Cache(format!("{}: {e}", path.display()))),
        }
    }

    pub fn put(&self, record: &CacheRecord) -> Result<(), ProviderError> {
        let path = self.path(&record.request_hash);
        let parent = path.parent().expect("cache paths have a parent");
        let io = |e: std::io::Error| ProviderError::Cache(format!("{}: {e}", path.display()));
        fs::create_dir_all(parent).map_err(io)?;
        let tmp = parent.join(format!(
            ".{}.{}.{}.tmp",
            record.request_hash,
            std::process::id(),
            self.tmp_counter.fetch_add(1, Ordering::Relaxed)
        ));
        let mut line = serde_json::to_string(record).expect("cache records serialize");
        line.push('\n');
        fs::write(&tmp, line).map_err(io)?;
        fs::rename(&tmp, &path).map_err(io)
    }

    /// Number of records on disk.
    pub fn len(&self) -> usize {
        let Ok(shards) = fs::read_dir(&self.dir) else {
            return 0;
        };
        shards
            .filter_map(Result::ok)
            .filter_map(|s| fs::read_dir(s.path()).ok())
            .flat_map(|entries| entries.filter_map(Result::ok))
            .filter(|e| e.path().extension().is_some_and(|x| x == "jsonl"))
            .count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn put_then_get() {
        let dir = tempfile::tempdir().unwrap();
        let cache = ResponseCache::open(dir.path()).unwrap();
        let hash = "ab".repeat(32);
        assert!(cache.get(&hash).unwrap().is_none());
        let rec = CacheRecord {
            request_hash: hash.clone(),
            provider: "p".into(),
            model: "m".into(),
            request: serde_json::json!({"x": 1}),
            response: serde_json::json!("B"),
            timestamp: "t".into(),
        };
        cache.put(&rec).unwrap();
        cache.put(&rec).unwrap();
        assert_eq!(cache.get(&hash).unwrap(), Some(rec));
        assert_eq!(cache.len(), 1);
        let raw = fs::read_to_string(dir.path().join("ab").join(format!("{hash}.jsonl"))).unwrap();
        assert_eq!(raw.lines().count(), 1);
    }
}
