//! Append-only run manifest stored next to a lattice file as `<file>.manifest.jsonl`.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub command: String,
    pub sha256: String,
    pub verdict: String,
    #[serde(default)]
    pub failed_checks: Vec<String>,
}

pub fn manifest_path(lattice: &Path) -> PathBuf {
    let mut s = lattice.as_os_str().to_owned();
    s.push(".manifest.jsonl");
    PathBuf::from(s)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn append(lattice: &Path, entry: &ManifestEntry) -> std::io::Result<()> {
    let mut f = OpenOptions::new().create(true).append(true).open(manifest_path(lattice))?;
    let line = serde_json::to_string(entry).map_err(std::io::Error::other)?;
    writeln!(f, "{line}")
}

pub fn read(lattice: &Path) -> Vec<ManifestEntry> {
    std::fs::read_to_string(manifest_path(lattice))
        .map(|text| text.lines().filter_map(|l| serde_json::from_str(l).ok()).collect())
        .unwrap_or_default()
}

/// Whether a passing `verify` was recorded for exactly these file contents.
pub fn has_passing_verify(lattice: &Path, sha: &str) -> bool {
    read(lattice).iter().any(|e| e.command == "verify" && e.sha256 == sha && e.verdict == "pass")
}
