use faer::prelude::*;
use faer::Mat;
use serde::{Deserialize, Serialize};
use spinlab_core::c64;

use crate::error::{HpaError, HpaResult};

/// Polarization of a spin around which it is linearized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    Up,
    Down,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Up => 1.0,
            Orientation::Down => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Orientation::Up => Orientation::Down,
            Orientation::Down => Orientation::Up,
        }
    }
}

/// Which pump acts on a site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pump {
    Gain,
    Loss,
}

/// Diagonal drift entry of the fluctuation boson of a site: damping `-rate`
/// when the spin points along its pump, amplification `+rate` otherwise.
pub fn site_drift(pump: Pump, orientation: Orientation, rate: f64) -> f64 {
    match (pump, orientation) {
        (Pump::Gain, Orientation::Up) | (Pump::Loss, Orientation::Down) => -rate,
        _ => rate,
    }
}

/// Quadratic bosonic open system in the doubled basis
/// `y = (c_1..c_m, c_1^dag..c_m^dag)`: `d<y>/dt = A <y>` and the symmetrized
/// second moments `Sigma_ij = <{y_i, y_j^dag}>/2` obey
/// `dSigma/dt = A Sigma + Sigma A^dag + D`.
#[derive(Debug, Clone)]
pub struct LinearModes {
    pub drift: Mat<c64>,
    pub diffusion: Mat<c64>,
}

impl LinearModes {
    pub fn n_modes(&self) -> usize {
        self.drift.nrows() / 2
    }

    /// Assembles the drift from per-mode diagonal terms, number-conserving
    /// couplings `J (c_i c_j^dag + h.c.)` and pair couplings
    /// `J (c_i c_j + h.c.)`. Each mode carries white noise of strength
    /// `noise[i]`.
    pub fn from_couplings(
        diagonal: &[f64],
        noise: &[f64],
        number_bonds: &[(usize, usize, f64)],
        pair_bonds: &[(usize, usize, f64)],
    ) -> Self {
        let m = diagonal.len();
        let mut drift = Mat::<c64>::zeros(2 * m, 2 * m);
        let mut diffusion = Mat::<c64>::zeros(2 * m, 2 * m);
        for i in 0..m {
            drift[(i, i)] = c64::new(diagonal[i], 0.0);
            drift[(m + i, m + i)] = c64::new(diagonal[i], 0.0);
            diffusion[(i, i)] = c64::new(noise[i], 0.0);
            diffusion[(m + i, m + i)] = c64::new(noise[i], 0.0);
        }
        let mi = |j: f64| c64::new(0.0, -j);
        for &(i, j, coupling) in number_bonds {
            drift[(i, j)] += mi(coupling);
            drift[(j, i)] += mi(coupling);
            drift[(m + i, m + j)] += mi(coupling).conj();
            drift[(m + j, m + i)] += mi(coupling).conj();
        }
        for &(i, j, coupling) in pair_bonds {
            drift[(i, m + j)] += mi(coupling);
            drift[(j, m + i)] += mi(coupling);
            drift[(m + i, j)] += mi(coupling).conj();
            drift[(m + j, i)] += mi(coupling).conj();
        }
        Self { drift, diffusion }
    }

    pub fn eigenvalues(&self) -> HpaResult<Vec<c64>> {
        self.drift
            .eigenvalues()
            .map_err(|e| HpaError::Linalg(format!("{e:?}")))
    }

    /// Largest real part of the drift spectrum.
    pub fn max_growth(&self) -> HpaResult<f64> {
        Ok(self.eigenvalues()?.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max))
    }

    /// Stationary `Sigma`, requiring a strictly stable drift.
    pub fn stationary_moments(&self) -> HpaResult<Mat<c64>> {
        let scale = self.drift.norm_max().max(1e-300);
        let max_re = self.max_growth()?;
        if max_re >= -1e-12 * scale {
            return Err(HpaError::NotHurwitz { max_re });
        }
        lyapunov(&self.drift, &self.diffusion)
    }

    pub fn covariance(&self) -> HpaResult<CovarianceMatrix> {
        Ok(CovarianceMatrix::from_moments(&self.stationary_moments()?))
    }
}

/// Solves `A X + X A^dag + D = 0` through the Kronecker form
/// `(I (x) A + conj(A) (x) I) vec X = -vec D`.
pub fn lyapunov(a: &Mat<c64>, d: &Mat<c64>) -> HpaResult<Mat<c64>> {
    let n = a.nrows();
    let big = Mat::<c64>::from_fn(n * n, n * n, |r, c| {
        let (i, j) = (r % n, r / n);
        let (k, l) = (c % n, c / n);
        let mut v = c64::new(0.0, 0.0);
        if j == l {
            v += a[(i, k)];
        }
        if i == k {
            v += a[(j, l)].conj();
        }
        v
    });
    let mut rhs = Mat::<c64>::from_fn(n * n, 1, |r, _| -d[(r % n, r / n)]);
    let lu = big.partial_piv_lu();
    lu.solve_in_place(rhs.as_mut());
    let x = Mat::<c64>::from_fn(n, n, |i, j| rhs[(i + n * j, 0)]);
    if x.norm_max().is_finite() {
        Ok(x)
    } else {
        Err(HpaError::Linalg("singular Lyapunov system".into()))
    }
}

/// Symmetrized quadrature covariance, ordered `(X_1, P_1, X_2, P_2, ..)`
/// with `X = c + c^dag` and `P = i (c - c^dag)`. The vacuum is the identity.
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    pub v: Mat<f64>,
}

impl CovarianceMatrix {
    pub fn from_moments(sigma: &Mat<c64>) -> Self {
        let m = sigma.nrows() / 2;
        let t = Mat::<c64>::from_fn(2 * m, 2 * m, |r, c| {
            let mode = r / 2;
            let quad = r % 2;
            match (quad, c) {
                (0, c) if c == mode || c == m + mode => c64::new(1.0, 0.0),
                (1, c) if c == mode => c64::new(0.0, 1.0),
                (1, c) if c == m + mode => c64::new(0.0, -1.0),
                _ => c64::new(0.0, 0.0),
            }
        });
        let full = &t * sigma * t.adjoint();
        let v = Mat::<f64>::from_fn(2 * m, 2 * m, |i, j| 0.5 * (full[(i, j)].re + full[(j, i)].re));
        Self { v }
    }

    pub fn n_modes(&self) -> usize {
        self.v.nrows() / 2
    }

    pub fn determinant(&self) -> f64 {
        self.v.determinant()
    }

    /// `Tr rho^2 = 1 / sqrt(det V)`.
    pub fn purity(&self) -> f64 {
        1.0 / self.determinant().sqrt()
    }

    fn block_det(&self, r: usize, c: usize) -> f64 {
        let v = &self.v;
        v[(2 * r, 2 * c)] * v[(2 * r + 1, 2 * c + 1)] - v[(2 * r, 2 * c + 1)] * v[(2 * r + 1, 2 * c)]
    }

    /// Smallest symplectic eigenvalue of the partial transpose (two modes).
    pub fn partial_transpose_eta(&self) -> HpaResult<f64> {
        if self.n_modes() != 2 {
            return Err(HpaError::Linalg("negativity needs exactly two modes".into()));
        }
        let sig = self.block_det(0, 0) + self.block_det(1, 1) - 2.0 * self.block_det(0, 1);
        let det = self.determinant();
        let disc = (sig * sig - 4.0 * det).max(0.0);
        // smaller root of x^2 - sig x + det, without cancellation
        let large = (sig + disc.sqrt()) / 2.0;
        if large <= 0.0 {
            return Ok(0.0);
        }
        Ok((det / large).max(0.0).sqrt())
    }

    /// Logarithm-free negativity `max(0, (1/eta - 1)/2)` between two modes.
    pub fn negativity(&self) -> HpaResult<f64> {
        let eta = self.partial_transpose_eta()?;
        Ok((0.5 * (1.0 / eta - 1.0)).max(0.0))
    }

    /// `<c_i^dag c_i>` recovered from the quadrature variances.
    pub fn occupation(&self, mode: usize) -> f64 {
        0.25 * (self.v[(2 * mode, 2 * mode)] + self.v[(2 * mode + 1, 2 * mode + 1)]) - 0.5
    }

    /// Covariance of the listed modes.
    pub fn reduced(&self, modes: &[usize]) -> Self {
        let n = 2 * modes.len();
        let v = Mat::<f64>::from_fn(n, n, |i, j| self.v[(2 * modes[i / 2] + i % 2, 2 * modes[j / 2] + j % 2)]);
        Self { v }
    }

    /// Largest violation of `V + i Omega >= 0`, zero for a physical state.
    pub fn physicality_defect(&self) -> HpaResult<f64> {
        let n = self.v.nrows();
        let m = Mat::<c64>::from_fn(n, n, |i, j| {
            let omega = if i / 2 == j / 2 {
                match (i % 2, j % 2) {
                    (0, 1) => 1.0,
                    (1, 0) => -1.0,
                    _ => 0.0,
                }
            } else {
                0.0
            };
            c64::new(self.v[(i, j)], omega)
        });
        let ev = m
            .self_adjoint_eigenvalues(faer::Side::Lower)
            .map_err(|e| HpaError::Linalg(format!("{e:?}")))?;
        Ok(ev.iter().fold(0.0f64, |acc, &x| acc.max(-x)))
    }
}
