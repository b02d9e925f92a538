use serde::Serialize;

use crate::error::{MeanFieldError, MeanFieldResult};
use crate::ode::{dopri5, OdeOptions, Solution};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MfParams {
    pub s: f64,
    pub g: f64,
    pub h: f64,
    pub gamma_g: f64,
    pub gamma_l: f64,
}

impl MfParams {
    pub fn validate(&self) -> MeanFieldResult<()> {
        if !(self.s > 0.0 && self.s.is_finite()) {
            return Err(MeanFieldError::InvalidArgument(format!("spin must be positive, got {}", self.s)));
        }
        for (name, v) in [("g", self.g), ("h", self.h), ("gamma_g", self.gamma_g), ("gamma_l", self.gamma_l)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(MeanFieldError::InvalidArgument(format!("{name} must be finite and non-negative")));
            }
        }
        Ok(())
    }
}

/// `(<S_a^x>, <S_a^y>, <S_a^z>, <S_b^x>, <S_b^y>, <S_b^z>)` of one unit cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MfState(pub [f64; 6]);

impl MfState {
    /// Both spins as coherent states at the given polar angles (azimuth 0).
    pub fn tilted(s: f64, theta_a: f64, theta_b: f64) -> Self {
        Self([
            s * theta_a.sin(),
            0.0,
            s * theta_a.cos(),
            s * theta_b.sin(),
            0.0,
            s * theta_b.cos(),
        ])
    }

    pub fn a(&self) -> [f64; 3] {
        [self.0[0], self.0[1], self.0[2]]
    }

    pub fn b(&self) -> [f64; 3] {
        [self.0[3], self.0[4], self.0[5]]
    }

    /// `|<S^->|` of each sublattice.
    pub fn transverse(&self) -> (f64, f64) {
        (self.0[0].hypot(self.0[1]), self.0[3].hypot(self.0[4]))
    }
}

/// Right-hand side of the factorized equations of motion. The loss term of
/// `<S_b^z>` drives it toward `-S`:
/// `-(G_l/S)[S(S+1) - S_b^z(S_b^z - 1)]`.
pub fn mf_rhs(state: &MfState, p: &MfParams) -> MfState {
    let [ax, ay, az, bx, by, bz] = state.0;
    let s = p.s;
    let j = (p.g + p.h) / s;
    let kg = p.gamma_g / (2.0 * s);
    let kl = p.gamma_l / (2.0 * s);
    MfState([
        -kg * ax * (1.0 + 2.0 * az) + j * az * by,
        -kg * ay * (1.0 + 2.0 * az) - j * az * bx,
        p.gamma_g / s * (s * (s + 1.0) - az * (az + 1.0)) + j * (ay * bx - ax * by),
        -kl * bx * (1.0 - 2.0 * bz) + j * ay * bz,
        -kl * by * (1.0 - 2.0 * bz) - j * ax * bz,
        -p.gamma_l / s * (s * (s + 1.0) - bz * (bz - 1.0)) + j * (ax * by - ay * bx),
    ])
}

/// Analytic Jacobian `d rhs_i / d x_j`.
pub fn jacobian(state: &MfState, p: &MfParams) -> [[f64; 6]; 6] {
    let [ax, ay, az, bx, by, bz] = state.0;
    let s = p.s;
    let j = (p.g + p.h) / s;
    let kg = p.gamma_g / (2.0 * s);
    let kl = p.gamma_l / (2.0 * s);
    [
        [-kg * (1.0 + 2.0 * az), 0.0, -2.0 * kg * ax + j * by, 0.0, j * az, 0.0],
        [0.0, -kg * (1.0 + 2.0 * az), -2.0 * kg * ay - j * bx, -j * az, 0.0, 0.0],
        [-j * by, j * bx, -p.gamma_g / s * (2.0 * az + 1.0), j * ay, -j * ax, 0.0],
        [0.0, j * bz, 0.0, -kl * (1.0 - 2.0 * bz), 0.0, 2.0 * kl * bx + j * ay],
        [-j * bz, 0.0, 0.0, 0.0, -kl * (1.0 - 2.0 * bz), 2.0 * kl * by - j * ax],
        [j * by, -j * bx, 0.0, -j * ay, j * ax, p.gamma_l / s * (2.0 * bz - 1.0)],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SteadyKind {
    FixedPoint,
    LimitCycle,
    Undecided,
}

#[derive(Debug, Clone, Copy)]
pub struct MfOptions {
    pub ode: OdeOptions,
    /// Fraction of the run inspected by the classifier.
    pub tail_fraction: f64,
    /// Relative tolerance (in units of `S`) of the fixed-point and
    /// recurrence tests.
    pub recurrence_tol: f64,
}

impl Default for MfOptions {
    fn default() -> Self {
        Self { ode: OdeOptions::default(), tail_fraction: 0.2, recurrence_tol: 1e-6 }
    }
}

#[derive(Debug, Clone)]
pub struct MfTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<MfState>,
    pub kind_a: SteadyKind,
    pub kind_b: SteadyKind,
    /// Time averages over the inspected tail.
    pub tail_mean: MfState,
    /// Period of the sublattice-b orbit when it is a limit cycle.
    pub period_b: Option<f64>,
}

impl MfTrajectory {
    pub fn last(&self) -> &MfState {
        self.states.last().expect("non-empty trajectory")
    }
}

pub fn integrate_mf(initial: MfState, p: &MfParams, t_max: f64, opts: MfOptions) -> MeanFieldResult<MfTrajectory> {
    p.validate()?;
    if !(t_max > 0.0) {
        return Err(MeanFieldError::InvalidArgument("t_max must be positive".into()));
    }
    if initial.0.iter().any(|v| !v.is_finite()) {
        return Err(MeanFieldError::InvalidArgument("initial state is not finite".into()));
    }
    let sol = dopri5(
        |_, y, dy| {
            let st = MfState([y[0], y[1], y[2], y[3], y[4], y[5]]);
            dy.copy_from_slice(&mf_rhs(&st, p).0);
        },
        0.0,
        &initial.0,
        t_max,
        opts.ode,
    )?;
    let tol = opts.recurrence_tol * p.s;
    let t_tail = t_max * (1.0 - opts.tail_fraction);
    let (kind_a, _) = classify(&sol, 0, t_tail, tol);
    let (kind_b, period_b) = classify(&sol, 3, t_tail, tol);
    let tail_mean = time_average(&sol, t_tail);
    let states = sol.y.iter().map(|y| MfState([y[0], y[1], y[2], y[3], y[4], y[5]])).collect();
    Ok(MfTrajectory { times: sol.t, states, kind_a, kind_b, tail_mean, period_b })
}

fn time_average(sol: &Solution, from: f64) -> MfState {
    let mut acc = [0.0; 6];
    let mut span = 0.0;
    for i in 0..sol.t.len() - 1 {
        if sol.t[i] < from {
            continue;
        }
        let dt = sol.t[i + 1] - sol.t[i];
        span += dt;
        for (k, a) in acc.iter_mut().enumerate() {
            *a += 0.5 * dt * (sol.y[i][k] + sol.y[i + 1][k]);
        }
    }
    MfState(acc.map(|a| if span > 0.0 { a / span } else { 0.0 }))
}

/// Classifies the motion of the spin stored at `offset..offset + 3` over
/// `t >= from`: a fixed point if it stays within `tol` of its final value,
/// a limit cycle if the upward crossings of `S^y = 0` recur within `tol`.
fn classify(sol: &Solution, offset: usize, from: f64, tol: f64) -> (SteadyKind, Option<f64>) {
    let start = sol.t.iter().position(|&t| t >= from).unwrap_or(0);
    let last = sol.y.last().unwrap();
    let drift = sol.y[start..]
        .iter()
        .flat_map(|y| (0..3).map(move |k| (y[offset + k] - last[offset + k]).abs()))
        .fold(0.0, f64::max);
    if drift < tol {
        return (SteadyKind::FixedPoint, None);
    }
    let mut crossings: Vec<(f64, Vec<f64>)> = Vec::new();
    for i in start..sol.t.len() - 1 {
        let (y0, y1) = (sol.y[i][offset + 1], sol.y[i + 1][offset + 1]);
        if y0 < 0.0 && y1 >= 0.0 {
            // Bisection on the Hermite interpolant.
            let (mut lo, mut hi) = (sol.t[i], sol.t[i + 1]);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if sol.interpolate(i, mid)[offset + 1] < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            crossings.push((hi, sol.interpolate(i, hi)));
        }
    }
    if crossings.len() < 3 {
        return (SteadyKind::Undecided, None);
    }
    let recur = crossings.windows(2).all(|w| {
        (0..3).all(|k| (w[0].1[offset + k] - w[1].1[offset + k]).abs() < tol)
    });
    if recur {
        let n = crossings.len() - 1;
        let period = (crossings[n].0 - crossings[0].0) / n as f64;
        (SteadyKind::LimitCycle, Some(period))
    } else {
        (SteadyKind::Undecided, None)
    }
}
