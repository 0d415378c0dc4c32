//! Content-addressed response cache: one JSON file per request key.

use std::fs;
use std::path::PathBuf;
use std::sync::Mutex;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

use super::{GenerationParams, GenerationResult};

/// Digest of (backend name, prompt text, all generation params); changing
/// any field changes the key.
pub fn cache_key(backend_name: &str, prompt_text: &str, params: &GenerationParams) -> String {
    let payload = serde_json::json!({
        "backend": backend_name,
        "prompt": prompt_text,
        "params": params,
    });
    let mut hasher = Sha256::new();
    hasher.update(payload.to_string().as_bytes());
    hex::encode(hasher.finalize())
}

/// File-backed cache with concurrent reads and serialized writes.
pub struct Cache {
    dir: PathBuf,
    write_lock: Mutex<()>,
}

impl Cache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Cache {
            dir,
            write_lock: Mutex::new(()),
        })
    }

    fn entry_path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// A corrupt or missing entry is a miss, never an error.
    pub fn get(&self, key: &str) -> Option<GenerationResult> {
        let text = fs::read_to_string(self.entry_path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    pub fn put(&self, key: &str, result: &GenerationResult) -> Result<()> {
        let _guard = self.write_lock.lock().expect("cache write lock");
        let path = self.entry_path(key);
        let tmp = self.dir.join(format!("{key}.tmp"));
        let body = serde_json::to_string_pretty(result).expect("result serializes");
        fs::write(&tmp, body).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        Ok(())
    }
}
