use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputFile {
    pub path: String,
    pub sha256: String,
}

/// Provenance of one run. Only the timestamps differ between reruns of the
/// same command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_path: Option<String>,
    pub config_sha256: Option<String>,
    pub tool_version: String,
    pub seed: u64,
    pub started_at: String,
    pub finished_at: Option<String>,
    pub outputs: Vec<OutputFile>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn now() -> String {
    Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true)
}

impl RunManifest {
    /// Starts a manifest; the config hash is taken before anything runs.
    pub fn start(command: &str, config: Option<(&Path, &[u8])>, seed: u64) -> Self {
        RunManifest {
            command: command.to_string(),
            config_path: config.map(|(p, _)| p.display().to_string()),
            config_sha256: config.map(|(_, b)| sha256_hex(b)),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            started_at: now(),
            finished_at: None,
            outputs: Vec::new(),
        }
    }

    /// Writes `body` to `path` and records it.
    pub fn write_output(&mut self, path: &Path, body: &str) -> CliResult<()> {
        std::fs::write(path, body).map_err(|e| CliError::io(path, e))?;
        self.outputs.push(OutputFile {
            path: path.display().to_string(),
            sha256: sha256_hex(body.as_bytes()),
        });
        Ok(())
    }

    pub fn finish(mut self, path: &Path) -> CliResult<PathBuf> {
        self.finished_at = Some(now());
        let body = serde_json::to_string_pretty(&self).expect("manifest serializes");
        std::fs::write(path, body + "\n").map_err(|e| CliError::io(path, e))?;
        Ok(path.to_path_buf())
    }
}

/// `<out>.manifest.json` next to a single output file.
pub fn manifest_path_for(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}
