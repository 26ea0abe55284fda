use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileRecord {
    pub path: PathBuf,
    pub sha256: String,
}

/// Record of one CLI invocation, written next to its primary output as
/// `<output>.manifest.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool_version: String,
    pub command: String,
    pub argv: Vec<String>,
    pub config: serde_json::Value,
    pub seed: Option<u64>,
    pub inputs: Vec<FileRecord>,
    pub outputs: Vec<FileRecord>,
    pub started_unix_seconds: f64,
    pub wall_clock_seconds: f64,
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("hashing {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn records(paths: &[PathBuf]) -> Result<Vec<FileRecord>> {
    paths
        .iter()
        .map(|p| {
            // Directories of text files are recorded without a checksum.
            let sha256 = if p.is_dir() {
                String::new()
            } else {
                sha256_file(p)?
            };
            Ok(FileRecord {
                path: p.clone(),
                sha256,
            })
        })
        .collect()
}

pub fn manifest_path(primary_output: &Path) -> PathBuf {
    let mut name = primary_output.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Collects what a run read and wrote, then writes the manifest.
pub struct ManifestBuilder {
    command: String,
    argv: Vec<String>,
    started: SystemTime,
    clock: Instant,
}

impl ManifestBuilder {
    pub fn start(command: &str, argv: Vec<String>) -> Self {
        ManifestBuilder {
            command: command.into(),
            argv,
            started: SystemTime::now(),
            clock: Instant::now(),
        }
    }

    /// `outputs[0]` is the primary output the manifest is placed next to.
    pub fn finish(
        self,
        config: serde_json::Value,
        seed: Option<u64>,
        inputs: &[PathBuf],
        outputs: &[PathBuf],
    ) -> Result<PathBuf> {
        let manifest = RunManifest {
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: self.command,
            argv: self.argv,
            config,
            seed,
            inputs: records(inputs)?,
            outputs: records(outputs)?,
            started_unix_seconds: self
                .started
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs_f64())
                .unwrap_or(0.0),
            wall_clock_seconds: self.clock.elapsed().as_secs_f64(),
        };
        let path = manifest_path(&outputs[0]);
        let json = serde_json::to_string_pretty(&manifest)?;
        fs::write(&path, json + "\n").with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
