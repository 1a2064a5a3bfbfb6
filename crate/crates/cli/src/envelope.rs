use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::{Format, Kind, RunConfig};
use crate::experiments::{run_experiment_outcome, Artifact, Verdict};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileRef {
    pub path: String,
    pub format: Format,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResultEnvelope {
    pub kind: Kind,
    pub version: &'static str,
    /// The resolved config in `key = value` form.
    pub config: String,
    pub config_sha256: String,
    pub wall_clock_seconds: f64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub verdicts: Vec<Verdict>,
    pub warnings: Vec<String>,
    pub payload: serde_json::Value,
    pub files: Vec<FileRef>,
    #[serde(skip)]
    pub artifacts: Vec<Artifact>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl ResultEnvelope {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            _ => 1,
        }
    }

    /// Writes every payload file and `envelope.json` under `dir`.
    pub fn write(&self, dir: &Path) -> io::Result<PathBuf> {
        fs::create_dir_all(dir)?;
        for a in &self.artifacts {
            fs::write(dir.join(&a.name), &a.bytes)?;
        }
        let path = dir.join("envelope.json");
        let mut text = serde_json::to_vec_pretty(self).map_err(io::Error::other)?;
        text.push(b'\n');
        fs::write(&path, text)?;
        Ok(path)
    }
}

/// Runs the configured experiment. Module failures become `Status::Error`.
pub fn run_experiment(cfg: &RunConfig) -> ResultEnvelope {
    let config = cfg.echo();
    let config_sha256 = sha256_hex(config.as_bytes());
    let start = Instant::now();
    let result = run_experiment_outcome(cfg, &format!("config sha256 {config_sha256}"));
    let wall_clock_seconds = start.elapsed().as_secs_f64();
    let (status, error, outcome) = match result {
        Ok(mut o) => {
            o.artifacts.retain(|a| cfg.wants(a.format));
            let status = if o.verdicts.iter().all(|v| v.pass) {
                Status::Pass
            } else {
                Status::Fail
            };
            (status, None, o)
        }
        Err(e) => (Status::Error, Some(e), Default::default()),
    };
    let files = outcome
        .artifacts
        .iter()
        .map(|a| FileRef {
            path: a.name.clone(),
            format: a.format,
            sha256: sha256_hex(&a.bytes),
            bytes: a.bytes.len(),
        })
        .collect();
    ResultEnvelope {
        kind: cfg.kind,
        version: ARTIFACT_VERSION,
        config,
        config_sha256,
        wall_clock_seconds,
        status,
        error,
        verdicts: outcome.verdicts,
        warnings: outcome.warnings,
        payload: outcome.payload,
        files,
        artifacts: outcome.artifacts,
    }
}
