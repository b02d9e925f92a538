use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use spinlab_cli::{parse_config, run_job, CliError, JobKind};

/// Runs a spinlab job described by a TOML configuration file.
#[derive(Debug, Parser)]
#[command(name = "spinlab", version)]
struct Args {
    /// phase-diagram, dimer-exact, kerr, hpa-scan, meanfield, cmf, twa,
    /// quench-map or spectrum; must match `kind` in the configuration.
    job_kind: String,
    #[arg(long)]
    config: PathBuf,
    /// Overrides the configured master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the configured worker count.
    #[arg(long)]
    workers: Option<usize>,
    /// Overrides the configured output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run(args: Args) -> Result<(), CliError> {
    let kind = JobKind::parse(&args.job_kind).ok_or_else(|| CliError::Config(format!("unknown job kind `{}`", args.job_kind)))?;
    let source = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut cfg = parse_config(&source)?;
    if cfg.kind != kind {
        return Err(CliError::Config(format!(
            "command asks for {} but the configuration describes {}",
            kind.name(),
            cfg.kind.name()
        )));
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(w) = args.workers {
        if w == 0 {
            return Err(CliError::Config("--workers must be positive".into()));
        }
        cfg.workers = Some(w);
    }
    if let Some(dir) = args.out {
        cfg.output.dir = dir;
    }
    let manifest = run_job(&cfg, &source)?;
    eprintln!(
        "spinlab: {} finished in {:.2} s, {} files in {}",
        manifest.job_kind,
        manifest.wall_time_s,
        manifest.outputs.len() + 1,
        cfg.output.dir.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("spinlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
