use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

/// One JSON file per request digest, holding the request and the reply.
///
/// Writes go through a temporary file and a rename, so readers never see a
/// partial entry. Two writers racing on one key both write the same bytes
/// when the backend is deterministic; otherwise the last rename wins.
#[derive(Debug, Clone)]
pub struct FileCache {
    dir: PathBuf,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    request: serde_json::Value,
    reply: String,
}

static TMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl FileCache {
    pub fn open(dir: impl AsRef<Path>) -> io::Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(Self { dir: dir.as_ref().to_owned() })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Option<String> {
        let bytes = fs::read(self.path(key)).ok()?;
        serde_json::from_slice::<Entry>(&bytes).ok().map(|e| e.reply)
    }

    pub fn put(&self, key: &str, request: &serde_json::Value, reply: &str) -> io::Result<()> {
        let entry = Entry { request: request.clone(), reply: reply.to_owned() };
        let n = TMP_COUNTER.fetch_add(1, Ordering::Relaxed);
        let tmp = self.dir.join(format!(".{key}.{}.{n}.tmp", std::process::id()));
        fs::write(&tmp, serde_json::to_vec_pretty(&entry)?)?;
        fs::rename(&tmp, self.path(key))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn put_then_get() {
        let dir = tempfile::tempdir().unwrap();
        let cache = FileCache::open(dir.path().join("nested")).unwrap();
        assert_eq!(cache.get("k"), None);
        cache.put("k", &serde_json::json!({"q": 1}), "answer").unwrap();
        assert_eq!(cache.get("k").as_deref(), Some("answer"));
        let raw = fs::read_to_string(dir.path().join("nested/k.json")).unwrap();
        assert!(raw.contains("\"request\"") && raw.contains("\"answer\""));
    }
}
