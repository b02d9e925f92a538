use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use spinlab_core::c64;

use crate::ensemble::{for_each_trajectory, InitialSpec, ObservableSeries, TwaConfig};
use crate::error::{TwaError, TwaResult};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationFit {
    /// Decay length in unit cells; 0 when fewer than two separations are
    /// resolved above noise.
    pub xi: f64,
    pub r2: f64,
    /// Separations that entered the fit.
    pub separations: Vec<usize>,
    pub amplitude: f64,
}

/// Weighted least-squares fit of `ln |C(d)|` against `d` over `d = 1..=N/4`.
///
/// Only the leading run of separations with `|C(d)| > 3 stderr` is used: the
/// logarithm of a noise-dominated value carries no decay information.
pub fn correlation_fit(series: &ObservableSeries) -> TwaResult<CorrelationFit> {
    let d_max = (series.n_cells / 4).max(1);
    let mut pts: Vec<(f64, f64, f64)> = Vec::new();
    for p in series.steady_correlator.iter().filter(|p| p.separation >= 1 && p.separation <= d_max) {
        let mag = p.mean.norm();
        if !(mag > 3.0 * p.stderr) || mag == 0.0 {
            break;
        }
        let sigma = if p.stderr > 0.0 { p.stderr / mag } else { 1e-12 };
        pts.push((p.separation as f64, mag.ln(), 1.0 / (sigma * sigma)));
    }
    let separations: Vec<usize> = pts.iter().map(|p| p.0 as usize).collect();
    if pts.len() < 2 {
        return Ok(CorrelationFit { xi: 0.0, r2: f64::NAN, separations, amplitude: 0.0 });
    }
    let w: f64 = pts.iter().map(|p| p.2).sum();
    let xm = pts.iter().map(|p| p.2 * p.0).sum::<f64>() / w;
    let ym = pts.iter().map(|p| p.2 * p.1).sum::<f64>() / w;
    let sxx: f64 = pts.iter().map(|p| p.2 * (p.0 - xm).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| p.2 * (p.0 - xm) * (p.1 - ym)).sum();
    let syy: f64 = pts.iter().map(|p| p.2 * (p.1 - ym).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    if r2 < 0.9 || slope >= 0.0 {
        return Err(TwaError::FitQuality { r2, points: pts.len() });
    }
    Ok(CorrelationFit { xi: -1.0 / slope, r2, separations, amplitude: (ym - slope * xm).exp() })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RestorationTime {
    /// First time at which `S_perp` drops below 10% of its initial value;
    /// `t_max` if it never does.
    pub tau: f64,
    /// Bootstrap standard deviation over trajectory resamples.
    pub stderr: f64,
    pub censored: bool,
    pub times: Vec<f64>,
    /// `|<S^+_a>|` of the chain-averaged A-sublattice polarization.
    pub s_perp: Vec<f64>,
}

fn s_perp_series(traces: &[Vec<c64>], pick: impl Iterator<Item = usize> + Clone, n_rec: usize) -> Vec<f64> {
    let n = pick.clone().count() as f64;
    (0..n_rec)
        .map(|r| pick.clone().map(|k| traces[k][r]).sum::<c64>().norm() / n)
        .collect()
}

fn crossing(times: &[f64], y: &[f64], level: f64) -> Option<f64> {
    for r in 1..y.len() {
        if y[r] < level {
            let (t0, t1, y0, y1) = (times[r - 1], times[r], y[r - 1], y[r]);
            return Some(t0 + (t1 - t0) * (y0 - level) / (y0 - y1));
        }
    }
    None
}

/// Time for the ensemble transverse polarization to decay below 10% of its
/// initial value, with a 200-resample bootstrap error.
pub fn symmetry_restoration_time(cfg: &TwaConfig, initial: &InitialSpec) -> TwaResult<RestorationTime> {
    let mut traces: Vec<Vec<c64>> = Vec::with_capacity(cfg.n_traj);
    for_each_trajectory(cfg, initial, false, |t| traces.push(t.s_plus.iter().map(|p| p[0]).collect()))?;
    let times = cfg.record_times();
    let n = traces.len();
    if n == 0 {
        return Err(TwaError::InsufficientData("no trajectories".into()));
    }
    let s_perp = s_perp_series(&traces, 0..n, times.len());
    let level = 0.1 * s_perp[0];
    let tau = crossing(&times, &s_perp, level);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(u64::MAX);
    let mut boots = Vec::new();
    if n > 1 {
        for _ in 0..200 {
            let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
            let y = s_perp_series(&traces, idx.iter().copied(), times.len());
            if let Some(t) = crossing(&times, &y, 0.1 * y[0]) {
                boots.push(t);
            }
        }
    }
    let stderr = if boots.len() > 1 {
        let m = boots.iter().sum::<f64>() / boots.len() as f64;
        (boots.iter().map(|t| (t - m).powi(2)).sum::<f64>() / (boots.len() - 1) as f64).sqrt()
    } else {
        0.0
    };
    Ok(RestorationTime {
        tau: tau.unwrap_or(cfg.t_max),
        stderr,
        censored: tau.is_none(),
        times,
        s_perp,
    })
}
