//! CSV tables and the JSON run manifest.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::experiments::{Outcome, Table};

pub const MANIFEST_FILE: &str = "manifest.json";

pub fn write_table(dir: &Path, table: &Table) -> Result<PathBuf, CliError> {
    let path = dir.join(&table.file);
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|c| c.render()))?;
    }
    w.flush()?;
    Ok(path)
}

pub fn sha256_file(path: &Path) -> Result<String, CliError> {
    let bytes = fs::read(path)?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Writes every table and the manifest; returns the manifest.
pub fn write_run(
    dir: &Path,
    cfg: &ExperimentConfig,
    deterministic: bool,
    outcome: &Outcome,
) -> Result<Value, CliError> {
    fs::create_dir_all(dir)?;
    let mut files = Vec::new();
    for t in &outcome.tables {
        let path = write_table(dir, t)?;
        files.push(json!({ "file": t.file, "sha256": sha256_file(&path)?, "rows": t.rows.len() }));
    }
    let checks: Vec<Value> = outcome
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "passed": c.passed, "detail": c.detail }))
        .collect();
    let manifest = json!({
        "artifact": env!("CARGO_PKG_NAME"),
        "version": env!("CARGO_PKG_VERSION"),
        "timestamp": chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        "experiment": cfg.experiment.name(),
        "seed": cfg.seed,
        "deterministic": deterministic,
        "config": serde_json::to_value(&cfg.raw).map_err(|e| CliError::Runtime(e.to_string()))?,
        "summary": outcome.summary,
        "invariants": checks,
        "all_invariants_passed": outcome.checks.iter().all(|c| c.passed),
        "files": files,
    });
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Runtime(e.to_string()))?;
    fs::write(dir.join(MANIFEST_FILE), text + "\n")?;
    Ok(manifest)
}
