use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spinlab_core::c64;

use crate::error::{TwaError, TwaResult};
use crate::sample::{complex_normal, sample_initial, Sampling};
use crate::sde::{derive_sde, DriftKind, SchwingerField, SdeModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    EulerMaruyama,
    StochasticHeun,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseMode {
    /// Vacuum sampling of the initial state and Langevin noise.
    Full,
    /// Sharp initial fields, no noise, classical drift: the mean-field flow.
    Off,
}

/// Orientations `(theta, phi)` of the initial product state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialSpec {
    Uniform { theta: f64, phi: f64 },
    Sublattice { a: (f64, f64), b: (f64, f64) },
    Sites(Vec<(f64, f64)>),
}

impl InitialSpec {
    /// Spins along `+x`.
    pub fn x_polarized() -> Self {
        InitialSpec::Uniform { theta: std::f64::consts::FRAC_PI_2, phi: 0.0 }
    }

    pub fn orientations(&self, n_sites: usize) -> TwaResult<Vec<(f64, f64)>> {
        let out = match self {
            InitialSpec::Uniform { theta, phi } => vec![(*theta, *phi); n_sites],
            InitialSpec::Sublattice { a, b } => (0..n_sites).map(|i| if i % 2 == 0 { *a } else { *b }).collect(),
            InitialSpec::Sites(v) => {
                if v.len() != n_sites {
                    return Err(TwaError::InvalidConfig(format!("{} orientations for {n_sites} sites", v.len())));
                }
                v.clone()
            }
        };
        if out.iter().any(|(t, p)| !t.is_finite() || !p.is_finite()) {
            return Err(TwaError::InvalidConfig("orientations must be finite".into()));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwaConfig {
    pub n_cells: usize,
    pub s: f64,
    pub g: f64,
    pub h: f64,
    pub gamma_g: f64,
    pub gamma_l: f64,
    pub n_traj: usize,
    pub dt: f64,
    pub t_max: f64,
    pub seed: u64,
    pub periodic: bool,
    pub scheme: Scheme,
    pub noise: NoiseMode,
    /// Initial-state sampling when the noise is on.
    pub sampling: Sampling,
    /// Steps between recorded times.
    pub record_every: usize,
    /// Start of the window over which correlators are time-averaged.
    pub steady_from: f64,
}

impl TwaConfig {
    /// Periodic chain, stochastic Heun, `dt = 0.02 / max rate`, records every
    /// `0.5/g` (approximately), correlators averaged over the second half.
    pub fn new(n_cells: usize, s: f64, g: f64, h: f64, gamma_g: f64, gamma_l: f64) -> Self {
        let rate = (g + h).max(gamma_g).max(gamma_l).max(1e-300);
        let dt = 0.02 / rate;
        let t_max = 100.0;
        Self {
            n_cells,
            s,
            g,
            h,
            gamma_g,
            gamma_l,
            n_traj: 500,
            dt,
            t_max,
            seed: 0,
            periodic: true,
            scheme: Scheme::StochasticHeun,
            noise: NoiseMode::Full,
            sampling: Sampling::SpinCoherent,
            record_every: ((0.5 / dt).round() as usize).max(1),
            steady_from: 0.5 * t_max,
        }
    }

    pub fn max_rate(&self) -> f64 {
        (self.g + self.h).max(self.gamma_g).max(self.gamma_l)
    }

    pub fn n_steps(&self) -> usize {
        (self.t_max / self.dt).round() as usize
    }

    pub fn validate(&self) -> TwaResult<()> {
        let bad = |m: &str| Err(TwaError::InvalidConfig(m.to_string()));
        if self.n_cells == 0 {
            return bad("n_cells must be positive");
        }
        if !(self.s > 0.0 && self.s.is_finite()) {
            return bad("s must be positive");
        }
        for (name, v) in [("g", self.g), ("h", self.h), ("gamma_g", self.gamma_g), ("gamma_l", self.gamma_l)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(TwaError::InvalidConfig(format!("{name} must be finite and non-negative")));
            }
        }
        if !(self.dt > 0.0 && self.t_max > 0.0 && self.t_max.is_finite()) {
            return bad("dt and t_max must be positive");
        }
        if self.dt * self.max_rate() >= 0.05 {
            return Err(TwaError::InvalidConfig(format!(
                "dt * max(g+h, gamma_g, gamma_l) = {:.3} must be below 0.05",
                self.dt * self.max_rate()
            )));
        }
        if self.n_traj == 0 {
            return bad("n_traj must be positive");
        }
        if self.record_every == 0 {
            return bad("record_every must be positive");
        }
        Ok(())
    }

    pub fn model(&self) -> SdeModel {
        derive_sde(self.n_cells, self.s, self.g, self.h, self.gamma_g, self.gamma_l, self.periodic)
    }

    pub fn record_times(&self) -> Vec<f64> {
        let n = self.n_steps();
        (0..=n).step_by(self.record_every).map(|k| k as f64 * self.dt).collect()
    }
}

/// Ensemble mean with its standard error over trajectories.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    pub stderr: f64,
}

fn serialize_complex<S: serde::Serializer>(z: &c64, ser: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(ser)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelatorPoint {
    pub separation: usize,
    #[serde(serialize_with = "serialize_complex")]
    pub mean: c64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObservableSeries {
    pub n_cells: usize,
    pub s: f64,
    pub times: Vec<f64>,
    pub sz_a: Vec<Stat>,
    pub sz_b: Vec<Stat>,
    /// Single-site `(Delta S^z)^2` with the Weyl correction `-1/8`.
    pub var_sz_a: Vec<Stat>,
    pub var_sz_b: Vec<Stat>,
    /// `|<S^+>|` of the chain-averaged sublattice polarization.
    pub s_perp_a: Vec<Stat>,
    pub s_perp_b: Vec<Stat>,
    #[serde(skip)]
    pub s_plus_a: Vec<c64>,
    #[serde(skip)]
    pub s_plus_b: Vec<c64>,
    /// `(1/N) sum_n <S^+_{a,n} S^-_{a,n+d}>` for `d = 0..=N/2`, per time.
    pub correlator: Vec<Vec<CorrelatorPoint>>,
    /// The same, time-averaged over `t >= steady_from` per trajectory.
    pub steady_correlator: Vec<CorrelatorPoint>,
    pub steady_window: (f64, f64),
    /// `<S^z>` per sublattice, time-averaged per trajectory over the window.
    pub steady_sz: [Stat; 2],
    pub steady_var_sz: [Stat; 2],
    pub n_traj: usize,
    pub excluded: usize,
}

/// Per-record quantities of one trajectory.
#[derive(Debug, Clone)]
pub(crate) struct Trace {
    pub sz: Vec<[f64; 2]>,
    pub szsq: Vec<[f64; 2]>,
    pub s_plus: Vec<[c64; 2]>,
    pub corr: Vec<Vec<c64>>,
    pub steady_corr: Vec<c64>,
    pub steady_sz: [f64; 2],
    pub steady_szsq: [f64; 2],
}

struct Stepper<'a> {
    model: &'a SdeModel,
    scheme: Scheme,
    noise: NoiseMode,
    dt: f64,
    da: Vec<c64>,
    db: Vec<c64>,
    da2: Vec<c64>,
    db2: Vec<c64>,
    pred: SchwingerField,
    z: Vec<c64>,
}

impl<'a> Stepper<'a> {
    fn new(model: &'a SdeModel, cfg: &TwaConfig) -> Self {
        let n = model.n_sites;
        let zero = vec![c64::new(0.0, 0.0); n];
        Self {
            model,
            scheme: cfg.scheme,
            noise: cfg.noise,
            dt: cfg.dt,
            da: zero.clone(),
            db: zero.clone(),
            da2: zero.clone(),
            db2: zero.clone(),
            pred: SchwingerField { alpha: zero.clone(), beta: zero },
            z: vec![c64::new(0.0, 0.0); model.noise_dim()],
        }
    }

    fn increment(model: &SdeModel, f: &SchwingerField, kind: DriftKind, dt: f64, z: Option<&[c64]>, da: &mut [c64], db: &mut [c64]) {
        model.drift(f, kind, da, db);
        da.iter_mut().chain(db.iter_mut()).for_each(|v| *v *= dt);
        if let Some(z) = z {
            model.add_noise(f, z, da, db);
        }
    }

    fn step(&mut self, f: &mut SchwingerField, rng: &mut ChaCha8Rng) {
        let noisy = self.noise == NoiseMode::Full;
        if noisy {
            for z in self.z.iter_mut() {
                *z = complex_normal(rng, self.dt);
            }
        }
        let z = if noisy { Some(self.z.as_slice()) } else { None };
        match (self.scheme, noisy) {
            (Scheme::EulerMaruyama, true) => {
                Self::increment(self.model, f, DriftKind::Ito, self.dt, z, &mut self.da, &mut self.db);
                for i in 0..f.alpha.len() {
                    f.alpha[i] += self.da[i];
                    f.beta[i] += self.db[i];
                }
            }
            _ => {
                Self::increment(self.model, f, DriftKind::Classical, self.dt, z, &mut self.da, &mut self.db);
                for i in 0..f.alpha.len() {
                    self.pred.alpha[i] = f.alpha[i] + self.da[i];
                    self.pred.beta[i] = f.beta[i] + self.db[i];
                }
                Self::increment(self.model, &self.pred, DriftKind::Classical, self.dt, z, &mut self.da2, &mut self.db2);
                for i in 0..f.alpha.len() {
                    f.alpha[i] += (self.da[i] + self.da2[i]) * 0.5;
                    f.beta[i] += (self.db[i] + self.db2[i]) * 0.5;
                }
            }
        }
    }
}

fn trajectory_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn diverged(f: &SchwingerField, limit: f64) -> bool {
    !f.is_finite() || (0..f.n_sites()).any(|i| f.weight(i) > limit)
}

/// `(1/N) sum_n S^+_{a,n} S^-_{a,n+d}`; `d = 0` carries the Weyl correction of
/// `n_a (n_b + 1)`.
fn chain_correlator(f: &SchwingerField, n_cells: usize, out: &mut [c64]) {
    for (d, slot) in out.iter_mut().enumerate() {
        let mut acc = c64::new(0.0, 0.0);
        for n in 0..n_cells {
            let i = 2 * n;
            if d == 0 {
                acc += (f.alpha[i].norm_sqr() - 0.5) * (f.beta[i].norm_sqr() + 0.5);
            } else {
                let j = 2 * ((n + d) % n_cells);
                acc += f.s_plus(i) * f.s_plus(j).conj();
            }
        }
        *slot = acc / n_cells as f64;
    }
}

/// Final field of trajectory `index`; `None` if it diverged.
pub fn trajectory_endpoint(cfg: &TwaConfig, initial: &InitialSpec, index: usize) -> TwaResult<Option<SchwingerField>> {
    cfg.validate()?;
    let model = cfg.model();
    let orientations = initial.orientations(model.n_sites)?;
    let mut rng = trajectory_rng(cfg.seed, index);
    let mut f = sample_initial(&orientations, cfg.s, &mut rng, sampling_of(cfg));
    let mut stepper = Stepper::new(&model, cfg);
    for _ in 0..cfg.n_steps() {
        stepper.step(&mut f, &mut rng);
    }
    Ok(if diverged(&f, 100.0 * (2.0 * cfg.s + 1.0)) { None } else { Some(f) })
}

fn sampling_of(cfg: &TwaConfig) -> Sampling {
    match cfg.noise {
        NoiseMode::Full => cfg.sampling,
        NoiseMode::Off => Sampling::Sharp,
    }
}

/// Integrates one trajectory; `None` if it crossed the divergence threshold.
pub(crate) fn run_trajectory(cfg: &TwaConfig, model: &SdeModel, orientations: &[(f64, f64)], index: usize, with_corr: bool) -> Option<Trace> {
    let mut rng = trajectory_rng(cfg.seed, index);
    let mut f = sample_initial(orientations, cfg.s, &mut rng, sampling_of(cfg));
    let mut stepper = Stepper::new(model, cfg);
    let limit = 100.0 * (2.0 * cfg.s + 1.0);
    let n_cells = cfg.n_cells;
    let n_sep = n_cells / 2 + 1;
    let mut trace = Trace {
        sz: Vec::new(),
        szsq: Vec::new(),
        s_plus: Vec::new(),
        corr: Vec::new(),
        steady_corr: vec![c64::new(0.0, 0.0); if with_corr { n_sep } else { 0 }],
        steady_sz: [0.0; 2],
        steady_szsq: [0.0; 2],
    };
    let mut buf = vec![c64::new(0.0, 0.0); n_sep];
    let mut steady_count = 0usize;
    let n_steps = cfg.n_steps();
    for step in 0..=n_steps {
        if step % cfg.record_every == 0 {
            if diverged(&f, limit) {
                return None;
            }
            let mut sz = [0.0; 2];
            let mut szsq = [0.0; 2];
            let mut sp = [c64::new(0.0, 0.0); 2];
            for i in 0..f.n_sites() {
                let z = f.s_z(i);
                sz[i % 2] += z;
                szsq[i % 2] += z * z - 0.125;
                sp[i % 2] += f.s_plus(i);
            }
            let inv = 1.0 / n_cells as f64;
            trace.sz.push([sz[0] * inv, sz[1] * inv]);
            trace.szsq.push([szsq[0] * inv, szsq[1] * inv]);
            trace.s_plus.push([sp[0] * inv, sp[1] * inv]);
            let in_window = step as f64 * cfg.dt >= cfg.steady_from - 1e-9 * cfg.dt;
            if in_window {
                steady_count += 1;
                for s in 0..2 {
                    trace.steady_sz[s] += sz[s] * inv;
                    trace.steady_szsq[s] += szsq[s] * inv;
                }
            }
            if with_corr {
                chain_correlator(&f, n_cells, &mut buf);
                if in_window {
                    trace.steady_corr.iter_mut().zip(&buf).for_each(|(a, b)| *a += b);
                }
                trace.corr.push(buf.clone());
            }
        }
        if step < n_steps {
            stepper.step(&mut f, &mut rng);
        }
    }
    if steady_count > 0 {
        let w = 1.0 / steady_count as f64;
        trace.steady_corr.iter_mut().for_each(|v| *v *= w);
        trace.steady_sz.iter_mut().chain(trace.steady_szsq.iter_mut()).for_each(|v| *v *= w);
    }
    Some(trace)
}

#[derive(Clone)]
struct Moments {
    n: usize,
    sum: f64,
    sumsq: f64,
}

impl Moments {
    fn new() -> Self {
        Self { n: 0, sum: 0.0, sumsq: 0.0 }
    }
    fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sumsq += x * x;
    }
    fn stat(&self) -> Stat {
        let n = self.n as f64;
        let mean = self.sum / n;
        let stderr = if self.n > 1 {
            ((self.sumsq / n - mean * mean).max(0.0) * n / (n - 1.0) / n).sqrt()
        } else {
            0.0
        };
        Stat { mean, stderr }
    }
}

/// `E[q] - E[z]^2` from per-trajectory `(z, q)` with `q` an estimate of
/// `z^2`; the standard error follows from the delta method.
#[derive(Clone)]
struct VarianceMoments {
    z: Moments,
    q: Moments,
    zq: f64,
}

impl VarianceMoments {
    fn new() -> Self {
        Self { z: Moments::new(), q: Moments::new(), zq: 0.0 }
    }
    fn push(&mut self, z: f64, q: f64) {
        self.z.push(z);
        self.q.push(q);
        self.zq += z * q;
    }
    fn stat(&self) -> Stat {
        let n = self.z.n as f64;
        let (zs, qs) = (self.z.stat(), self.q.stat());
        let mean = qs.mean - zs.mean * zs.mean;
        let stderr = if self.z.n > 1 {
            let cov = (self.zq / n - zs.mean * qs.mean) * n / (n - 1.0) / n;
            let v = qs.stderr.powi(2) - 4.0 * zs.mean * cov + 4.0 * zs.mean.powi(2) * zs.stderr.powi(2);
            v.max(0.0).sqrt()
        } else {
            0.0
        };
        Stat { mean, stderr }
    }
}

/// Mean of complex samples, with the standard error of that mean.
#[derive(Clone)]
struct ComplexMoments {
    re: Moments,
    im: Moments,
}

impl ComplexMoments {
    fn new() -> Self {
        Self { re: Moments::new(), im: Moments::new() }
    }
    fn push(&mut self, z: c64) {
        self.re.push(z.re);
        self.im.push(z.im);
    }
    fn mean(&self) -> c64 {
        c64::new(self.re.stat().mean, self.im.stat().mean)
    }
    fn stderr(&self) -> f64 {
        self.re.stat().stderr.hypot(self.im.stat().stderr)
    }
}

pub(crate) fn check_budget(excluded: usize, total: usize) -> TwaResult<()> {
    if excluded as f64 > 0.01 * total as f64 {
        return Err(TwaError::Unstable { excluded, total });
    }
    Ok(())
}

/// Runs trajectories `0..n_traj` in parallel and hands them to `sink` in
/// index order.
pub(crate) fn for_each_trajectory(
    cfg: &TwaConfig,
    initial: &InitialSpec,
    with_corr: bool,
    mut sink: impl FnMut(Trace),
) -> TwaResult<usize> {
    cfg.validate()?;
    let model = cfg.model();
    let orientations = initial.orientations(model.n_sites)?;
    let chunk = 64usize;
    let mut excluded = 0;
    let mut start = 0;
    while start < cfg.n_traj {
        let end = (start + chunk).min(cfg.n_traj);
        let traces: Vec<Option<Trace>> = (start..end)
            .into_par_iter()
            .map(|k| run_trajectory(cfg, &model, &orientations, k, with_corr))
            .collect();
        for t in traces {
            match t {
                Some(t) => sink(t),
                None => excluded += 1,
            }
        }
        start = end;
    }
    check_budget(excluded, cfg.n_traj)?;
    Ok(excluded)
}

pub fn run_ensemble(cfg: &TwaConfig, initial: &InitialSpec) -> TwaResult<ObservableSeries> {
    let times = cfg.record_times();
    let n_rec = times.len();
    let n_sep = cfg.n_cells / 2 + 1;
    let mut sz = vec![[Moments::new(), Moments::new()]; n_rec];
    let mut var = vec![[VarianceMoments::new(), VarianceMoments::new()]; n_rec];
    let mut sp = vec![[ComplexMoments::new(), ComplexMoments::new()]; n_rec];
    let mut corr = vec![vec![ComplexMoments::new(); n_sep]; n_rec];
    let mut steady = vec![ComplexMoments::new(); n_sep];
    let mut steady_sz = [Moments::new(), Moments::new()];
    let mut steady_var = [VarianceMoments::new(), VarianceMoments::new()];
    let excluded = for_each_trajectory(cfg, initial, true, |t| {
        for r in 0..n_rec {
            for s in 0..2 {
                sz[r][s].push(t.sz[r][s]);
                var[r][s].push(t.sz[r][s], t.szsq[r][s]);
                sp[r][s].push(t.s_plus[r][s]);
            }
            for d in 0..n_sep {
                corr[r][d].push(t.corr[r][d]);
            }
        }
        for d in 0..n_sep {
            steady[d].push(t.steady_corr[d]);
        }
        for s in 0..2 {
            steady_sz[s].push(t.steady_sz[s]);
            steady_var[s].push(t.steady_sz[s], t.steady_szsq[s]);
        }
    })?;
    let perp = |c: &ComplexMoments| Stat { mean: c.mean().norm(), stderr: c.stderr() };
    let points = |row: &[ComplexMoments]| -> Vec<CorrelatorPoint> {
        row.iter()
            .enumerate()
            .map(|(d, c)| CorrelatorPoint { separation: d, mean: c.mean(), stderr: c.stderr() })
            .collect()
    };
    Ok(ObservableSeries {
        n_cells: cfg.n_cells,
        s: cfg.s,
        sz_a: sz.iter().map(|m| m[0].stat()).collect(),
        sz_b: sz.iter().map(|m| m[1].stat()).collect(),
        var_sz_a: var.iter().map(|m| m[0].stat()).collect(),
        var_sz_b: var.iter().map(|m| m[1].stat()).collect(),
        s_perp_a: sp.iter().map(|m| perp(&m[0])).collect(),
        s_perp_b: sp.iter().map(|m| perp(&m[1])).collect(),
        s_plus_a: sp.iter().map(|m| m[0].mean()).collect(),
        s_plus_b: sp.iter().map(|m| m[1].mean()).collect(),
        correlator: corr.iter().map(|row| points(row)).collect(),
        steady_correlator: points(&steady),
        steady_window: (cfg.steady_from, *times.last().unwrap_or(&0.0)),
        steady_sz: [steady_sz[0].stat(), steady_sz[1].stat()],
        steady_var_sz: [steady_var[0].stat(), steady_var[1].stat()],
        times,
        n_traj: cfg.n_traj - excluded,
        excluded,
    })
}

impl ObservableSeries {
    /// Time average of a series over the steady window.
    pub fn steady_mean(&self, series: &[Stat]) -> f64 {
        let (t0, _) = self.steady_window;
        let vals: Vec<f64> = self
            .times
            .iter()
            .zip(series)
            .filter(|(t, _)| **t >= t0 - 1e-12)
            .map(|(_, s)| s.mean)
            .collect();
        vals.iter().sum::<f64>() / vals.len().max(1) as f64
    }
}
