//! JSON sidecar recording how an artifact was produced.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artifact {
    pub path: String,
    pub sha256: String,
}

impl Artifact {
    pub fn of(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        Ok(Artifact {
            path: path.display().to_string(),
            sha256: file_sha256(path)?,
        })
    }
}

pub fn file_sha256(path: impl AsRef<Path>) -> Result<String> {
    let bytes = fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command_line: Vec<String>,
    pub fleet_hash: String,
    pub seeds: BTreeMap<String, u64>,
    /// Fully resolved settings of the command.
    pub config: serde_json::Value,
    pub hardware: String,
    pub inputs: Vec<Artifact>,
    pub outputs: Vec<Artifact>,
    /// Seconds since the Unix epoch.
    pub started_at: u64,
    pub finished_at: u64,
}

pub fn unix_now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

/// CPU model, logical core count and platform of this machine.
pub fn hardware_string() -> String {
    let cpu = fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|s| {
            s.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split(':').nth(1))
                .map(|m| m.trim().to_string())
        })
        .unwrap_or_else(|| "unknown cpu".into());
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    format!(
        "{cpu}; {cores} logical cores; {}-{}",
        std::env::consts::OS,
        std::env::consts::ARCH
    )
}

impl RunManifest {
    pub fn start(fleet_hash: String, config: serde_json::Value) -> Self {
        RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command_line: std::env::args().collect(),
            fleet_hash,
            seeds: BTreeMap::new(),
            config,
            hardware: hardware_string(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            started_at: unix_now(),
            finished_at: 0,
        }
    }

    /// Sidecar path for an output file: `<file>.manifest.json`.
    pub fn sidecar_path(output: impl AsRef<Path>) -> PathBuf {
        let mut s = output.as_ref().as_os_str().to_owned();
        s.push(".manifest.json");
        PathBuf::from(s)
    }

    /// Stamp the finish time and write the manifest next to `primary`.
    pub fn finish(mut self, primary: impl AsRef<Path>) -> Result<PathBuf> {
        self.finished_at = unix_now();
        let path = Self::sidecar_path(primary);
        fs::write(&path, serde_json::to_string_pretty(&self)? + "\n")?;
        Ok(path)
    }
}
