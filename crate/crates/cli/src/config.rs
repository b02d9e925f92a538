//! Job configuration files.
//!
//! A job file is TOML with a top-level `kind`, optional `seed` and `workers`,
//! an `[output]` table, a kind-specific `[model]` table and one
//! `[grid.<axis>]` table per swept parameter. All rates are in units of the
//! intra-cell coupling `g`, times in units of `1/g`. Unknown keys anywhere are
//! rejected.

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use crate::error::{CliError, CliResult};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum JobKind {
    PhaseDiagram,
    DimerExact,
    Kerr,
    HpaScan,
    Meanfield,
    Cmf,
    Twa,
    QuenchMap,
    Spectrum,
}

impl JobKind {
    pub const ALL: [JobKind; 9] = [
        JobKind::PhaseDiagram,
        JobKind::DimerExact,
        JobKind::Kerr,
        JobKind::HpaScan,
        JobKind::Meanfield,
        JobKind::Cmf,
        JobKind::Twa,
        JobKind::QuenchMap,
        JobKind::Spectrum,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            JobKind::PhaseDiagram => "phase-diagram",
            JobKind::DimerExact => "dimer-exact",
            JobKind::Kerr => "kerr",
            JobKind::HpaScan => "hpa-scan",
            JobKind::Meanfield => "meanfield",
            JobKind::Cmf => "cmf",
            JobKind::Twa => "twa",
            JobKind::QuenchMap => "quench-map",
            JobKind::Spectrum => "spectrum",
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }

    /// `(required, optional)` grid axes.
    pub fn axes(&self) -> (&'static [&'static str], &'static [&'static str]) {
        match self {
            JobKind::PhaseDiagram | JobKind::HpaScan => (&["gamma_g", "gamma_l"], &[]),
            JobKind::DimerExact | JobKind::Meanfield | JobKind::Cmf => (&["gamma_bar"], &[]),
            JobKind::Kerr => (&["f"], &[]),
            JobKind::Twa | JobKind::QuenchMap | JobKind::Spectrum => (&[], &[]),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    /// Write SVG quick-look plots next to the CSV files.
    #[serde(default = "yes")]
    pub svg: bool,
}

fn default_dir() -> PathBuf {
    PathBuf::from("spinlab-out")
}

fn yes() -> bool {
    true
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: default_dir(), svg: true }
    }
}

/// Fluctuation-theory raster over `(gamma_g, gamma_l)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseDiagramModel {
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HpaScanModel {
    pub h: f64,
    /// Purity and negativity of a lattice unit cell (Brillouin-zone average)
    /// rather than of an isolated dimer.
    #[serde(default = "yes")]
    pub lattice: bool,
}

/// Exact dimer along `gamma_g = gamma_bar + delta_gamma/2`,
/// `gamma_l = gamma_bar - delta_gamma/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimerModel {
    pub s: Vec<f64>,
    #[serde(default)]
    pub delta_gamma: f64,
    /// Compute the Liouvillian gap (otherwise only steady-state observables).
    #[serde(default = "yes")]
    pub spectrum: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KerrModel {
    pub delta: f64,
    pub u: f64,
    pub d: f64,
    #[serde(default = "one")]
    pub gamma: f64,
    /// Fock cutoff; `4 d` when absent.
    #[serde(default)]
    pub cutoff: Option<usize>,
    /// Write the photon distribution of every drive point.
    #[serde(default = "yes")]
    pub distributions: bool,
    /// Eigenvalues with `|lambda| < near_zero_tol * gamma` count as near zero.
    #[serde(default = "kerr_tol")]
    pub near_zero_tol: f64,
}

fn kerr_tol() -> f64 {
    1e-3
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumModel {
    #[serde(default = "one_cell")]
    pub n_cells: usize,
    pub s: f64,
    #[serde(default)]
    pub h: f64,
    pub gamma_g: f64,
    pub gamma_l: f64,
    #[serde(default)]
    pub periodic: bool,
    /// Number of eigenvalues written.
    #[serde(default = "twenty")]
    pub k: usize,
    #[serde(default)]
    pub strategy: StrategyName,
}

fn one_cell() -> usize {
    1
}

fn twenty() -> usize {
    20
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyName {
    #[default]
    Auto,
    Dense,
    ShiftInvert,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanfieldModel {
    pub s: f64,
    pub h: f64,
    #[serde(default)]
    pub delta_gamma: f64,
    #[serde(default = "mf_time")]
    pub t_max: f64,
    /// Initial polar angles of the two sublattices.
    #[serde(default = "theta_a")]
    pub theta_a: f64,
    #[serde(default = "theta_b")]
    pub theta_b: f64,
}

fn mf_time() -> f64 {
    2000.0
}

fn theta_a() -> f64 {
    0.3
}

fn theta_b() -> f64 {
    std::f64::consts::PI - 0.3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmfModel {
    pub s: f64,
    pub h: f64,
    /// Cluster sizes.
    pub n_c: Vec<usize>,
    /// Rotated single-site chain (requires `h = 1`, equal rates).
    #[serde(default)]
    pub transformed: bool,
    #[serde(default = "cmf_window")]
    pub window: f64,
    #[serde(default = "cmf_tol")]
    pub tol: f64,
    #[serde(default = "cmf_windows")]
    pub max_windows: usize,
    /// Initial tilt of every spin away from `+z`.
    #[serde(default = "cmf_tilt")]
    pub tilt: f64,
}

fn cmf_window() -> f64 {
    50.0
}

fn cmf_tol() -> f64 {
    1e-4
}

fn cmf_windows() -> usize {
    400
}

fn cmf_tilt() -> f64 {
    std::f64::consts::FRAC_PI_2
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwaMode {
    /// Time series, steady-state averages and correlation length.
    #[default]
    Steady,
    /// Decay of the transverse polarization from an x-polarized start.
    Restoration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwaModel {
    #[serde(default = "fifty")]
    pub n_cells: usize,
    pub s: f64,
    pub h: f64,
    pub gamma_g: f64,
    pub gamma_l: f64,
    #[serde(default = "traj")]
    pub n_traj: usize,
    /// `0.02 / max(g + h, gamma_g, gamma_l)` when absent.
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default = "twa_time")]
    pub t_max: f64,
    /// Start of the steady window; `t_max / 2` when absent.
    #[serde(default)]
    pub steady_from: Option<f64>,
    #[serde(default = "record_dt")]
    pub record_dt: f64,
    #[serde(default = "heun")]
    pub scheme: spinlab_twa::Scheme,
    #[serde(default = "yes")]
    pub periodic: bool,
    #[serde(default = "full")]
    pub noise: spinlab_twa::NoiseMode,
    #[serde(default = "spin_coherent")]
    pub sampling: spinlab_twa::Sampling,
    #[serde(default)]
    pub mode: TwaMode,
    /// Initial orientations `(theta, phi)` per sublattice; ignored in
    /// restoration mode (x-polarized start).
    #[serde(default)]
    pub theta_a: f64,
    #[serde(default)]
    pub phi_a: f64,
    #[serde(default = "pi")]
    pub theta_b: f64,
    #[serde(default)]
    pub phi_b: f64,
}

fn fifty() -> usize {
    50
}

fn traj() -> usize {
    500
}

fn twa_time() -> f64 {
    100.0
}

fn record_dt() -> f64 {
    0.5
}

fn heun() -> spinlab_twa::Scheme {
    spinlab_twa::Scheme::StochasticHeun
}

fn full() -> spinlab_twa::NoiseMode {
    spinlab_twa::NoiseMode::Full
}

fn spin_coherent() -> spinlab_twa::Sampling {
    spinlab_twa::Sampling::SpinCoherent
}

fn pi() -> f64 {
    std::f64::consts::PI
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuenchModel {
    #[serde(default = "four")]
    pub n_cells: usize,
    pub h: f64,
    pub gamma_g: f64,
    pub gamma_l: f64,
    #[serde(default = "yes")]
    pub periodic: bool,
}

fn four() -> usize {
    4
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Model {
    PhaseDiagram(PhaseDiagramModel),
    DimerExact(DimerModel),
    Kerr(KerrModel),
    HpaScan(HpaScanModel),
    Meanfield(MeanfieldModel),
    Cmf(CmfModel),
    Twa(TwaModel),
    QuenchMap(QuenchModel),
    Spectrum(SpectrumModel),
}

#[derive(Debug, Clone, PartialEq)]
pub struct JobConfig {
    pub kind: JobKind,
    pub seed: u64,
    /// Worker threads; all available cores when absent.
    pub workers: Option<usize>,
    pub output: OutputSpec,
    pub model: Model,
    pub grids: BTreeMap<String, Grid>,
}

fn section<T: DeserializeOwned>(name: &str, value: Value) -> CliResult<T> {
    value
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(format!("[{name}]: {}", e.message())))
}

fn nonneg(field: &str, v: f64) -> CliResult<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("model.{field} must be finite and non-negative, got {v}")))
    }
}

fn positive(field: &str, v: f64) -> CliResult<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(CliError::Config(format!("model.{field} must be positive, got {v}")))
    }
}

impl Model {
    fn parse(kind: JobKind, value: Value) -> CliResult<Self> {
        Ok(match kind {
            JobKind::PhaseDiagram => Model::PhaseDiagram(section("model", value)?),
            JobKind::DimerExact => Model::DimerExact(section("model", value)?),
            JobKind::Kerr => Model::Kerr(section("model", value)?),
            JobKind::HpaScan => Model::HpaScan(section("model", value)?),
            JobKind::Meanfield => Model::Meanfield(section("model", value)?),
            JobKind::Cmf => Model::Cmf(section("model", value)?),
            JobKind::Twa => Model::Twa(section("model", value)?),
            JobKind::QuenchMap => Model::QuenchMap(section("model", value)?),
            JobKind::Spectrum => Model::Spectrum(section("model", value)?),
        })
    }

    fn validate(&self) -> CliResult<()> {
        match self {
            Model::PhaseDiagram(m) => nonneg("h", m.h),
            Model::HpaScan(m) => nonneg("h", m.h),
            Model::DimerExact(m) => {
                if m.s.is_empty() {
                    return Err(CliError::Config("model.s must list at least one spin".into()));
                }
                m.s.iter().try_for_each(|&s| positive("s", s))?;
                if !m.delta_gamma.is_finite() {
                    return Err(CliError::Config("model.delta_gamma must be finite".into()));
                }
                Ok(())
            }
            Model::Kerr(m) => {
                positive("gamma", m.gamma)?;
                positive("d", m.d)?;
                positive("near_zero_tol", m.near_zero_tol)?;
                if !(m.delta.is_finite() && m.u.is_finite()) {
                    return Err(CliError::Config("model.delta and model.u must be finite".into()));
                }
                Ok(())
            }
            Model::Spectrum(m) => {
                positive("s", m.s)?;
                nonneg("h", m.h)?;
                nonneg("gamma_g", m.gamma_g)?;
                nonneg("gamma_l", m.gamma_l)?;
                if m.k == 0 {
                    return Err(CliError::Config("model.k must be positive".into()));
                }
                Ok(())
            }
            Model::Meanfield(m) => {
                positive("s", m.s)?;
                nonneg("h", m.h)?;
                positive("t_max", m.t_max)
            }
            Model::Cmf(m) => {
                positive("s", m.s)?;
                nonneg("h", m.h)?;
                if m.n_c.is_empty() || m.n_c.contains(&0) {
                    return Err(CliError::Config("model.n_c must list positive cluster sizes".into()));
                }
                if m.transformed && m.h != 1.0 {
                    return Err(CliError::Config("model.h must equal 1 (= g) when model.transformed is set".into()));
                }
                if m.max_windows < 2 {
                    return Err(CliError::Config("model.max_windows must be at least 2".into()));
                }
                positive("window", m.window)?;
                positive("tol", m.tol)
            }
            Model::Twa(m) => {
                positive("s", m.s)?;
                nonneg("h", m.h)?;
                nonneg("gamma_g", m.gamma_g)?;
                nonneg("gamma_l", m.gamma_l)?;
                positive("t_max", m.t_max)?;
                positive("record_dt", m.record_dt)?;
                if m.n_traj == 0 || m.n_cells == 0 {
                    return Err(CliError::Config("model.n_traj and model.n_cells must be positive".into()));
                }
                Ok(())
            }
            Model::QuenchMap(m) => {
                if m.n_cells == 0 || 2 * m.n_cells > spinlab_quench::MAX_SITES {
                    return Err(CliError::Config(format!(
                        "model.n_cells must lie in 1..={}",
                        spinlab_quench::MAX_SITES / 2
                    )));
                }
                nonneg("h", m.h)?;
                nonneg("gamma_g", m.gamma_g)?;
                nonneg("gamma_l", m.gamma_l)
            }
        }
    }
}

const TOP_LEVEL: [&str; 6] = ["kind", "seed", "workers", "output", "model", "grid"];

/// Parses and validates a job file.
pub fn parse_config(text: &str) -> CliResult<JobConfig> {
    let table: Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(syntax_message(text, &e)))?;
    let kind_value = table.get("kind").ok_or_else(|| CliError::Config("missing job kind".into()))?;
    let kind_name = kind_value
        .as_str()
        .ok_or_else(|| CliError::Config("kind must be a string".into()))?;
    let kind = JobKind::parse(kind_name).ok_or_else(|| {
        let names: Vec<&str> = JobKind::ALL.iter().map(|k| k.name()).collect();
        CliError::Config(format!("unknown job kind `{kind_name}`, expected one of {}", names.join(", ")))
    })?;
    if let Some(key) = table.keys().find(|k| !TOP_LEVEL.contains(&k.as_str())) {
        return Err(CliError::Config(format!("unknown key `{key}`")));
    }
    let seed = match table.get("seed") {
        None => 0,
        Some(v) => v
            .as_integer()
            .filter(|&s| s >= 0)
            .ok_or_else(|| CliError::Config("seed must be a non-negative integer".into()))? as u64,
    };
    let workers = match table.get("workers") {
        None => None,
        Some(v) => Some(
            v.as_integer()
                .filter(|&w| w >= 1)
                .ok_or_else(|| CliError::Config("workers must be a positive integer".into()))? as usize,
        ),
    };
    let output = match table.get("output") {
        None => OutputSpec::default(),
        Some(v) => section("output", v.clone())?,
    };
    let model_value = table
        .get("model")
        .cloned()
        .ok_or_else(|| CliError::Config(format!("missing [model] section for {}", kind.name())))?;
    let model = Model::parse(kind, model_value)?;
    model.validate()?;
    let mut grids = BTreeMap::new();
    if let Some(v) = table.get("grid") {
        let t = v
            .as_table()
            .ok_or_else(|| CliError::Config("grid must be a table of [grid.<axis>] sections".into()))?;
        for (axis, g) in t {
            let grid: Grid = section(&format!("grid.{axis}"), g.clone())?;
            grid.validate().map_err(|m| CliError::Config(format!("grid.{axis}: {m}")))?;
            grids.insert(axis.clone(), grid);
        }
    }
    let (required, optional) = kind.axes();
    for axis in grids.keys() {
        if !required.contains(&axis.as_str()) && !optional.contains(&axis.as_str()) {
            return Err(CliError::Config(format!("grid.{axis}: not a sweep axis of {}", kind.name())));
        }
    }
    for axis in required {
        if !grids.contains_key(*axis) {
            return Err(CliError::Config(format!("missing [grid.{axis}] for {}", kind.name())));
        }
    }
    Ok(JobConfig { kind, seed, workers, output, model, grids })
}

fn syntax_message(text: &str, e: &toml::de::Error) -> String {
    match e.span() {
        Some(span) => {
            let line = text[..span.start.min(text.len())].matches('\n').count() + 1;
            format!("syntax error at line {line}: {}", e.message())
        }
        None => format!("syntax error: {}", e.message()),
    }
}

impl JobConfig {
    /// Canonical TOML text; parsing it yields an equal configuration.
    pub fn to_toml(&self) -> String {
        let mut t = Table::new();
        t.insert("kind".into(), Value::String(self.kind.name().into()));
        t.insert("seed".into(), Value::Integer(self.seed as i64));
        if let Some(w) = self.workers {
            t.insert("workers".into(), Value::Integer(w as i64));
        }
        t.insert("output".into(), Value::try_from(&self.output).expect("output serializes"));
        t.insert("model".into(), Value::try_from(&self.model).expect("model serializes"));
        if !self.grids.is_empty() {
            let grids: Table = self
                .grids
                .iter()
                .map(|(k, g)| (k.clone(), Value::try_from(g).expect("grid serializes")))
                .collect();
            t.insert("grid".into(), Value::Table(grids));
        }
        toml::to_string(&t).expect("table serializes")
    }

    pub fn grid(&self, axis: &str) -> &Grid {
        &self.grids[axis]
    }
}
