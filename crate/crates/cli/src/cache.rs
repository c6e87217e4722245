//! Content-addressed artifact cache.
//!
//! The key is the SHA-256 of a version tag plus the canonical JSON of
//! the job spec, so any change to either the spec or the cache format
//! is a miss. Entries are whole JSON files written atomically (temp
//! file plus rename), which serializes concurrent writers per key:
//! since runs are deterministic, last-writer-wins overwrites identical
//! bytes. A corrupted or mismatched entry is discarded with a warning
//! and the job is recomputed.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::job::JobSpec;

/// Bumped whenever the artifact or report format changes.
pub const CACHE_VERSION: &str = "1";

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Entry {
    pub version: String,
    pub key: String,
    pub report: serde_json::Value,
    pub artifact: String,
}

pub fn cache_key(job: &JobSpec) -> String {
    cache_key_versioned(job, CACHE_VERSION)
}

pub fn cache_key_versioned(job: &JobSpec, version: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(version.as_bytes());
    hasher.update(b"\n");
    hasher.update(job.canonical_json().as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Resolves the cache directory: explicit flag first, then the
/// SCHARC_CACHE environment variable, else no caching.
pub fn resolve_dir(flag: Option<PathBuf>) -> Option<PathBuf> {
    flag.or_else(|| std::env::var_os("SCHARC_CACHE").map(PathBuf::from))
}

fn entry_path(dir: &Path, key: &str) -> PathBuf {
    dir.join(format!("{key}.json"))
}

pub fn load(dir: &Path, key: &str) -> Option<Entry> {
    let path = entry_path(dir, key);
    let bytes = fs::read(&path).ok()?;
    match serde_json::from_slice::<Entry>(&bytes) {
        Ok(entry) if entry.version == CACHE_VERSION && entry.key == key => Some(entry),
        Ok(_) => None,
        Err(e) => {
            eprintln!(
                "warning: discarding corrupted cache entry {}: {e}",
                path.display()
            );
            None
        }
    }
}

/// Stores an entry; failures degrade to a warning so the run still
/// succeeds without caching.
pub fn store(dir: &Path, key: &str, entry: &Entry) {
    if let Err(e) = try_store(dir, key, entry) {
        eprintln!("warning: could not write cache entry: {e}");
    }
}

fn try_store(dir: &Path, key: &str, entry: &Entry) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!("{key}.json.tmp-{}", std::process::id()));
    let body = serde_json::to_vec_pretty(entry).expect("cache entry serializes");
    fs::write(&tmp, body)?;
    fs::rename(&tmp, entry_path(dir, key))
}
