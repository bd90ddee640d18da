use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

/// Everything needed to tell two runs apart, written as `manifest.json`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunManifest {
    pub command: String,
    pub version: String,
    pub config_sha256: String,
    pub seed: u64,
    pub workers: usize,
    pub config: ExperimentConfig,
    pub timings: Vec<StageTiming>,
    pub warnings: Vec<String>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &str, config: &ExperimentConfig) -> Self {
        Self {
            command: command.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            config_sha256: config_hash(config),
            seed: config.run.seed,
            workers: config.run.workers,
            config: config.clone(),
            timings: Vec::new(),
            warnings: Vec::new(),
            outputs: Vec::new(),
        }
    }

    /// Runs `f`, recording its wall time under `stage`.
    pub fn time<T>(&mut self, stage: impl Into<String>, f: impl FnOnce() -> T) -> T {
        let stage = stage.into();
        eprintln!("[helmrecon] {stage}");
        let start = Instant::now();
        let out = f();
        self.timings.push(StageTiming { stage, seconds: start.elapsed().as_secs_f64() });
        out
    }

    pub fn warn(&mut self, message: String) {
        eprintln!("[helmrecon] warning: {message}");
        if !self.warnings.contains(&message) {
            self.warnings.push(message);
        }
    }
}

/// SHA-256 of the canonical JSON form, so formatting and key order in the file do not matter.
pub fn config_hash(config: &ExperimentConfig) -> String {
    Sha256::digest(config.canonical().as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}
