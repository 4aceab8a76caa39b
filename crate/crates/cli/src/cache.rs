//! On-disk report cache. Entries are keyed by the SHA-256 of the argument
//! vector (minus the cache location) and stored as `<key>.out`; every new
//! entry is appended to `manifest.jsonl` together with the tool version.

use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub const ENV_VAR: &str = "MULTIFRAC_CACHE";

pub struct Store {
    dir: PathBuf,
}

#[derive(Serialize)]
struct ManifestEntry<'a> {
    key: &'a str,
    args: Vec<&'a str>,
    version: &'static str,
}

fn without_cache_flag(args: &[String]) -> Vec<&str> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args {
        if skip {
            skip = false;
        } else if a == "--cache" {
            skip = true;
        } else if !a.starts_with("--cache=") {
            out.push(a.as_str());
        }
    }
    out
}

pub fn key(args: &[String]) -> String {
    let mut h = Sha256::new();
    for a in without_cache_flag(args) {
        h.update(a.as_bytes());
        h.update([0]);
    }
    hex::encode(h.finalize())
}

impl Store {
    pub fn open(dir: Option<PathBuf>) -> Option<Store> {
        let dir = dir?;
        fs::create_dir_all(&dir).ok()?;
        Some(Store { dir })
    }

    pub fn get(&self, key: &str) -> Option<String> {
        fs::read_to_string(self.dir.join(format!("{key}.out"))).ok()
    }

    /// Best effort; a cache that cannot be written is skipped silently.
    pub fn put(&self, key: &str, args: &[String], out: &str) {
        if fs::write(self.dir.join(format!("{key}.out")), out).is_err() {
            return;
        }
        let entry = ManifestEntry { key, args: without_cache_flag(args), version: env!("CARGO_PKG_VERSION") };
        if let (Ok(line), Ok(mut f)) = (
            serde_json::to_string(&entry),
            OpenOptions::new().create(true).append(true).open(self.dir.join("manifest.jsonl")),
        ) {
            let _ = writeln!(f, "{line}");
        }
    }
}
