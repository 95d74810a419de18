//! Experiment runner: reads a flat TOML config, runs one study, and writes
//! CSV tables plus a `manifest.json` into the output directory.

pub mod config;
pub mod error;
pub mod experiments;
pub mod output;

use std::path::PathBuf;

use fbchan::Reduction;

pub use config::{ExperimentConfig, Overrides};
pub use error::CliError;

/// Command-line settings that are not part of the config file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub output_dir: Option<PathBuf>,
    pub deterministic: bool,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub output_dir: PathBuf,
    pub manifest: serde_json::Value,
    pub outcome: experiments::Outcome,
}

impl RunReport {
    pub fn all_passed(&self) -> bool {
        self.outcome.checks.iter().all(|c| c.passed)
    }
}

/// Runs `cfg` and writes its outputs. Invariant failures are reported in
/// the manifest and the returned report, not as errors.
pub fn run(cfg: &ExperimentConfig, opts: &RunOptions) -> Result<RunReport, CliError> {
    let deterministic = opts.deterministic || cfg.deterministic;
    let reduction = if deterministic {
        Reduction::Ordered
    } else {
        Reduction::Unordered
    };
    let output_dir = opts
        .output_dir
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from(format!("out/{}", cfg.experiment.name())));
    let outcome = experiments::run(cfg, reduction)?;
    let manifest = output::write_run(&output_dir, cfg, deterministic, &outcome)?;
    Ok(RunReport {
        output_dir,
        manifest,
        outcome,
    })
}
