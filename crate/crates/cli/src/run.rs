use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::JobConfig;
use crate::error::{CliError, CliResult};
use crate::jobs::{execute, PointError};

pub const MANIFEST_SCHEMA: &str = "spinlab-manifest/1";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Largest tolerated fraction of failed grid points.
pub const FAILURE_BUDGET: f64 = 0.1;

#[derive(Debug, Clone, Serialize)]
pub struct OutputFile {
    pub path: String,
    pub kind: &'static str,
    /// Data rows (CSV only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub schema: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub job_kind: &'static str,
    /// SHA-256 of `config`.
    pub config_sha256: String,
    pub seed: u64,
    pub workers: usize,
    pub wall_time_s: f64,
    pub points: usize,
    pub failed: usize,
    pub status: &'static str,
    pub outputs: Vec<OutputFile>,
    pub errors: Vec<PointError>,
    /// Canonical configuration after command-line overrides; running it
    /// reproduces every CSV file byte for byte.
    pub config: String,
    /// The configuration file as given.
    pub config_source: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn write(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Runs a job, writes its datasets, plots and manifest into the output
/// directory and returns the manifest. Fails with
/// [`CliError::PartialFailure`] after writing if more than 10% of the grid
/// points failed.
pub fn run_job(cfg: &JobConfig, source: &str) -> CliResult<Manifest> {
    let started = Instant::now();
    let workers = cfg.workers.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let dir: PathBuf = cfg.output.dir.clone();
    fs::create_dir_all(&dir).map_err(|source| CliError::Io { path: dir.display().to_string(), source })?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Runtime(format!("worker pool: {e}")))?;
    let result = pool.install(|| execute(cfg))?;
    let mut outputs = Vec::new();
    for (stem, table) in &result.tables {
        let name = format!("{stem}.csv");
        let bytes = table.to_csv()?;
        write(&dir.join(&name), &bytes)?;
        outputs.push(OutputFile { path: name, kind: "csv", rows: Some(table.rows.len()), sha256: sha256_hex(&bytes) });
    }
    if cfg.output.svg {
        for (stem, svg) in &result.plots {
            let name = format!("{stem}.svg");
            write(&dir.join(&name), svg.as_bytes())?;
            outputs.push(OutputFile { path: name, kind: "svg", rows: None, sha256: sha256_hex(svg.as_bytes()) });
        }
    }
    let failed = result.errors.len();
    let over_budget = failed as f64 > FAILURE_BUDGET * result.total_points as f64;
    let config = cfg.to_toml();
    let manifest = Manifest {
        schema: MANIFEST_SCHEMA,
        tool: "spinlab",
        version: env!("CARGO_PKG_VERSION"),
        job_kind: cfg.kind.name(),
        config_sha256: sha256_hex(config.as_bytes()),
        seed: cfg.seed,
        workers,
        wall_time_s: started.elapsed().as_secs_f64(),
        points: result.total_points,
        failed,
        status: if over_budget { "failed" } else if failed > 0 { "partial" } else { "ok" },
        outputs,
        errors: result.errors,
        config,
        config_source: source.to_string(),
    };
    let json = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::Runtime(format!("manifest encoding: {e}")))?;
    write(&dir.join(MANIFEST_FILE), &json)?;
    if over_budget {
        return Err(CliError::PartialFailure { failed, total: manifest.points });
    }
    Ok(manifest)
}
