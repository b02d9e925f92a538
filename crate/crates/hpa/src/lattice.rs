use faer::Mat;
use serde::Serialize;
use spinlab_core::c64;

use crate::closed::{correlation_length, magnetizations, negativity_closed, purity_closed, Magnetizations};
use crate::error::{HpaError, HpaResult};
use crate::gaussian::{site_drift, CovarianceMatrix, LinearModes, Orientation, Pump};
use crate::phase::{classify_phase, Phase, PhaseLabel, Rates};

/// Uniform grid size for Brillouin-zone averages.
pub const K_GRID: usize = 4096;

/// Orientations `(a, b)` of the polarized reference of a phase.
pub fn reference(phase: Phase) -> HpaResult<(Orientation, Orientation)> {
    match phase {
        Phase::FmUp => Ok((Orientation::Up, Orientation::Up)),
        Phase::FmDown => Ok((Orientation::Down, Orientation::Down)),
        Phase::Am => Ok((Orientation::Up, Orientation::Down)),
        Phase::Pt | Phase::Ppt => Err(HpaError::Domain(format!("{} has no polarized reference state", phase.name()))),
    }
}

/// Two-mode (dimer) fluctuation dynamics around the given orientations.
pub fn dimer_modes(rates: &Rates, orientations: (Orientation, Orientation)) -> LinearModes {
    let (oa, ob) = orientations;
    let diag = [
        site_drift(Pump::Gain, oa, rates.gamma_g),
        site_drift(Pump::Loss, ob, rates.gamma_l),
    ];
    let noise = [rates.gamma_g, rates.gamma_l];
    let bond = [(0, 1, rates.g)];
    if oa == ob {
        LinearModes::from_couplings(&diag, &noise, &bond, &[])
    } else {
        LinearModes::from_couplings(&diag, &noise, &[], &bond)
    }
}

/// Drift and diffusion of the lattice at momentum `k`, in the basis
/// `(c_{a,k}, c_{b,k}, c_{a,-k}^dag, c_{b,-k}^dag)`. With
/// `c_n = N^{-1/2} sum_k e^{ink} c_k` the inter-cell bond `b_n - a_{n+1}`
/// picks up the phase `e^{+-ik}`.
pub fn bloch_modes(rates: &Rates, orientations: (Orientation, Orientation), k: f64) -> LinearModes {
    let (oa, ob) = orientations;
    let da = site_drift(Pump::Gain, oa, rates.gamma_g);
    let db = site_drift(Pump::Loss, ob, rates.gamma_l);
    // a_n couples to b_n (g) and b_{n-1} (h); b_n couples to a_n (g) and a_{n+1} (h).
    let ab = c64::new(0.0, -1.0) * (c64::new(rates.g, 0.0) + c64::from_polar(rates.h, -k));
    let ba = c64::new(0.0, -1.0) * (c64::new(rates.g, 0.0) + c64::from_polar(rates.h, k));
    let mut drift = Mat::<c64>::zeros(4, 4);
    drift[(0, 0)] = c64::new(da, 0.0);
    drift[(1, 1)] = c64::new(db, 0.0);
    drift[(2, 2)] = c64::new(da, 0.0);
    drift[(3, 3)] = c64::new(db, 0.0);
    // Lower-half rows are conj(coefficient at -k).
    let ab_m = c64::new(0.0, -1.0) * (c64::new(rates.g, 0.0) + c64::from_polar(rates.h, k));
    let ba_m = c64::new(0.0, -1.0) * (c64::new(rates.g, 0.0) + c64::from_polar(rates.h, -k));
    if oa == ob {
        drift[(0, 1)] = ab;
        drift[(1, 0)] = ba;
        drift[(2, 3)] = ab_m.conj();
        drift[(3, 2)] = ba_m.conj();
    } else {
        drift[(0, 3)] = ab;
        drift[(1, 2)] = ba;
        drift[(2, 1)] = ab_m.conj();
        drift[(3, 0)] = ba_m.conj();
    }
    let noise = [rates.gamma_g, rates.gamma_l, rates.gamma_g, rates.gamma_l];
    let diffusion = Mat::<c64>::from_fn(4, 4, |i, j| if i == j { c64::new(noise[i], 0.0) } else { c64::new(0.0, 0.0) });
    LinearModes { drift, diffusion }
}

/// Stationary `Sigma(k)` of the lattice in the given phase.
pub fn bloch_moments(rates: &Rates, phase: Phase, k: f64) -> HpaResult<Mat<c64>> {
    bloch_modes(rates, reference(phase)?, k).stationary_moments()
}

/// Brillouin-zone average of `Sigma(k)`, i.e. the moments of a single unit
/// cell `(a_n, b_n)` in the infinite chain.
pub fn cell_moments(rates: &Rates, phase: Phase) -> HpaResult<Mat<c64>> {
    let mut acc = Mat::<c64>::zeros(4, 4);
    for j in 0..K_GRID {
        let k = 2.0 * std::f64::consts::PI * j as f64 / K_GRID as f64;
        acc += bloch_moments(rates, phase, k)?;
    }
    Ok(Mat::from_fn(4, 4, |i, j| acc[(i, j)] / K_GRID as f64))
}

/// Quadrature covariance of one unit cell. For `h = 0` and `k = None` this
/// is the dimer; with `k` it is the 4x4 block of that momentum.
pub fn covariance(rates: &Rates, phase: Phase, k: Option<f64>) -> HpaResult<CovarianceMatrix> {
    let orientations = reference(phase)?;
    match k {
        Some(k) => bloch_modes(rates, orientations, k).covariance(),
        None if rates.h == 0.0 => dimer_modes(rates, orientations).covariance(),
        None => cell_covariance(rates, phase),
    }
}

/// Reduced covariance of one unit cell of the infinite chain.
pub fn cell_covariance(rates: &Rates, phase: Phase) -> HpaResult<CovarianceMatrix> {
    Ok(CovarianceMatrix::from_moments(&cell_moments(rates, phase)?))
}

/// One row of an HPA parameter scan.
#[derive(Debug, Clone, Serialize)]
pub struct HpaPoint {
    pub gamma_g: f64,
    pub gamma_l: f64,
    pub g: f64,
    pub h: f64,
    pub phase: String,
    /// Site-local fluctuation numbers `(n_a, n_b)`.
    pub occupations: Option<(f64, f64)>,
    pub magnetizations: Option<Magnetizations>,
    pub xi: Option<f64>,
    pub purity: Option<f64>,
    pub negativity: Option<f64>,
}

/// Evaluates every quantity that is defined at the given point. Purity and
/// negativity use the closed forms for the dimer and the unit-cell
/// covariance otherwise; the latter is skipped when `lattice_gaussian` is
/// false since it costs a Brillouin-zone sum.
pub fn evaluate_point(rates: &Rates, lattice_gaussian: bool) -> HpaPoint {
    let label = classify_phase(rates.gamma_g, rates.gamma_l, rates.g, rates.h);
    let mut point = HpaPoint {
        gamma_g: rates.gamma_g,
        gamma_l: rates.gamma_l,
        g: rates.g,
        h: rates.h,
        phase: label.name(),
        occupations: None,
        magnetizations: None,
        xi: None,
        purity: None,
        negativity: None,
    };
    let PhaseLabel::Region(phase) = label else {
        return point;
    };
    if let Ok(m) = magnetizations(rates.gamma_g, rates.gamma_l, rates.g, rates.h, phase) {
        point.occupations = Some((m.n_a, m.n_b));
        point.magnetizations = Some(m);
    }
    if rates.h > 0.0 {
        point.xi = correlation_length(rates.gamma_g, rates.gamma_l, rates.g, rates.h).ok();
    }
    if rates.h == 0.0 {
        point.purity = purity_closed(rates.gamma_g, rates.gamma_l, rates.g, phase).ok();
        point.negativity = negativity_closed(rates.gamma_g, rates.gamma_l, rates.g, phase)
            .ok()
            .flatten()
            .or_else(|| covariance(rates, phase, None).ok().and_then(|c| c.negativity().ok()));
    } else if lattice_gaussian {
        if let Ok(cov) = cell_covariance(rates, phase) {
            point.purity = Some(cov.purity());
            point.negativity = cov.negativity().ok();
        }
    }
    point
}
