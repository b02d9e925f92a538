//! Configuration-driven front end: parses job files, runs the solver
//! pipelines over parameter grids and persists CSV datasets, SVG quick-looks
//! and a JSON manifest.

pub mod config;
pub mod error;
pub mod grid;
pub mod jobs;
pub mod run;
pub mod svg;
pub mod table;

pub use config::{parse_config, JobConfig, JobKind, Model};
pub use error::{CliError, CliResult};
pub use grid::{Grid, Scale};
pub use jobs::{execute, JobOutput, PointError};
pub use run::{run_job, sha256_hex, Manifest, MANIFEST_FILE};
pub use table::{Field, Table};
