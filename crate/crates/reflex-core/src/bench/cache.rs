//! Content-addressed cache for raw provider responses.
//!
//! Keys are SHA-256 digests over the length-prefixed concatenation of the
//! call's identity (backend id, model, temperature, prompt text), so equal
//! inputs map to equal keys on every platform and a one-byte prompt change
//! changes the key. Entries are flat files named by the key; writes go
//! through a temp file and an atomic rename, and concurrent writers of the
//! same key produce identical bytes by construction.

use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

/// Stable cache key for one provider call.
pub fn cache_key(backend_id: &str, model_name: &str, temperature: f64, prompt_text: &str) -> String {
    let mut hasher = Sha256::new();
    for part in [
        backend_id.as_bytes(),
        model_name.as_bytes(),
        format!("{temperature:?}").as_bytes(),
        prompt_text.as_bytes(),
    ] {
        hasher.update((part.len() as u64).to_be_bytes());
        hasher.update(part);
    }
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Flat-file response cache rooted at one directory.
#[derive(Debug, Clone)]
pub struct ResponseCache {
    dir: PathBuf,
}

impl ResponseCache {
    /// Open (creating if needed) a cache directory.
    pub fn open(dir: &Path) -> io::Result<ResponseCache> {
        std::fs::create_dir_all(dir)?;
        Ok(ResponseCache { dir: dir.to_path_buf() })
    }

    fn entry_path(&self, key: &str) -> PathBuf {
        self.dir.join(key)
    }

    pub fn get(&self, key: &str) -> Option<String> {
        std::fs::read_to_string(self.entry_path(key)).ok()
    }

    pub fn put(&self, key: &str, body: &str) -> io::Result<()> {
        static WRITE_SEQ: std::sync::atomic::AtomicU64 = std::sync::atomic::AtomicU64::new(0);
        let seq = WRITE_SEQ.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        let target = self.entry_path(key);
        let tmp = self.dir.join(format!(".{key}.tmp-{}-{seq}", std::process::id()));
        std::fs::write(&tmp, body)?;
        std::fs::rename(&tmp, &target)
    }
}
