//! Experiment driver: TOML configs in, CSV tables, heatmaps and a run manifest out.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod output;

pub use commands::{execute, Command};
pub use config::{ExperimentConfig, Mode, Overrides};
pub use error::CliError;
pub use manifest::RunManifest;
