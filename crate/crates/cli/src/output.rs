use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::CliError;

/// `dir/name.csv` -> `dir/name.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}.{suffix}"))
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::Output {
            path: path.to_path_buf(),
            source,
        },
        other => CliError::Usage(format!("{}: {other:?}", path.display())),
    })?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|source| CliError::Output {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    experiment: String,
    seed: u64,
    artifacts: Vec<String>,
    config: &'a ExperimentConfig,
}

/// Writes `<out stem>.manifest.json` and returns its path.
pub fn write_manifest(cfg: &ExperimentConfig, artifacts: &[PathBuf]) -> Result<PathBuf, CliError> {
    let path = sibling(&cfg.out, "manifest.json");
    let m = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        experiment: cfg.experiment.to_string(),
        seed: cfg.seed,
        artifacts: artifacts.iter().map(|p| p.display().to_string()).collect(),
        config: cfg,
    };
    let text = serde_json::to_string_pretty(&m).expect("manifest serializes");
    std::fs::write(&path, text + "\n").map_err(|source| CliError::Output {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}
