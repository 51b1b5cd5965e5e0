use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Provenance record written next to every `--out` file.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub seed: u64,
    /// SHA-256 over the arguments (minus `--threads` and `--out`) and the
    /// contents of every input file.
    pub config_hash: String,
    pub version: String,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    pub outputs: Vec<String>,
}

pub fn now_ms() -> u128 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis()).unwrap_or(0)
}

/// Arguments with the flags that must not influence results removed.
fn semantic_args(args: &[String]) -> Vec<&str> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in args.iter().skip(1) {
        if skip {
            skip = false;
            continue;
        }
        if a == "--threads" || a == "--out" {
            skip = true;
            continue;
        }
        if a.starts_with("--threads=") || a.starts_with("--out=") {
            continue;
        }
        out.push(a.as_str());
    }
    out
}

pub fn config_hash(args: &[String], inputs: &[(String, Vec<u8>)]) -> String {
    let mut h = Sha256::new();
    for a in semantic_args(args) {
        h.update(a.as_bytes());
        h.update([0u8]);
    }
    for (name, bytes) in inputs {
        h.update(name.as_bytes());
        h.update([1u8]);
        h.update(bytes);
        h.update([0u8]);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

impl RunManifest {
    pub fn write(&self, out: &Path) -> std::io::Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        std::fs::write(manifest_path(out), text + "\n")
    }
}
