//! Append-only JSON-lines log of commands that produce artifacts.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::Result;

/// Environment variable naming the log file.
pub const RUN_LOG_ENV: &str = "CORRLAB_RUN_LOG";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArtifactHash {
    pub name: String,
    pub sha256: String,
}

impl ArtifactHash {
    pub fn of_bytes(name: impl Into<String>, bytes: &[u8]) -> Self {
        ArtifactHash { name: name.into(), sha256: sha256_hex(bytes) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub argv: Vec<String>,
    pub config: serde_json::Value,
    pub inputs: Vec<ArtifactHash>,
    pub outputs: Vec<ArtifactHash>,
    pub residuals: serde_json::Value,
    pub exit_code: i32,
    pub duration_ms: f64,
    /// Seconds since the Unix epoch.
    pub finished_at: u64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Appends one line; the file is opened in append mode for each record.
pub fn append(path: &Path, record: &RunRecord) -> Result<()> {
    let mut line = serde_json::to_string(record)?;
    line.push('\n');
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    f.write_all(line.as_bytes())?;
    f.flush()?;
    Ok(())
}

pub fn read_all(path: &Path) -> Result<Vec<RunRecord>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Into::into))
        .collect()
}
