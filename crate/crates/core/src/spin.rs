//! Spin-S matrices in the `S_z` eigenbasis ordered `m = S, S-1, ..., -S`,
//! and SU(2) coherent states.

use faer::Mat;

use crate::error::{CoreError, CoreResult};
use crate::{c64, ZERO};

#[derive(Debug, Clone)]
pub struct SpinMatrices {
    two_s: u32,
    pub s_plus: Mat<c64>,
    pub s_minus: Mat<c64>,
    pub s_z: Mat<c64>,
}

/// Returns `2s` if `s` is a non-negative half-integer.
pub fn twice_spin(s: f64) -> CoreResult<u32> {
    let two_s = 2.0 * s;
    if !s.is_finite() || s < 0.0 || (two_s - two_s.round()).abs() > 1e-12 || two_s > 1e6 {
        return Err(CoreError::InvalidArgument(format!(
            "spin quantum number must be a non-negative half-integer, got {s}"
        )));
    }
    Ok(two_s.round() as u32)
}

/// Ladder matrix element `<m+1| S^+ |m>`.
pub fn ladder_coefficient(s: f64, m: f64) -> f64 {
    (s * (s + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
}

impl SpinMatrices {
    pub fn new(s: f64) -> CoreResult<Self> {
        let two_s = twice_spin(s)?;
        let s = two_s as f64 / 2.0;
        let dim = two_s as usize + 1;
        let m_of = |i: usize| s - i as f64;
        let s_z = Mat::<c64>::from_fn(dim, dim, |i, j| {
            if i == j {
                c64::new(m_of(i), 0.0)
            } else {
                ZERO
            }
        });
        // row i (m) <- column i+1 (m-1)
        let s_plus = Mat::<c64>::from_fn(dim, dim, |i, j| {
            if j == i + 1 {
                c64::new(ladder_coefficient(s, m_of(j)), 0.0)
            } else {
                ZERO
            }
        });
        let s_minus = s_plus.adjoint().to_owned();
        Ok(Self {
            two_s,
            s_plus,
            s_minus,
            s_z,
        })
    }

    pub fn s(&self) -> f64 {
        self.two_s as f64 / 2.0
    }

    pub fn dim(&self) -> usize {
        self.two_s as usize + 1
    }

    /// Magnetic quantum number of basis index `i`.
    pub fn m(&self, i: usize) -> f64 {
        self.s() - i as f64
    }

    pub fn s_x(&self) -> Mat<c64> {
        let sum = &self.s_plus + &self.s_minus;
        Mat::from_fn(sum.nrows(), sum.ncols(), |i, j| sum[(i, j)] * 0.5)
    }

    pub fn s_y(&self) -> Mat<c64> {
        let diff = &self.s_plus - &self.s_minus;
        Mat::from_fn(diff.nrows(), diff.ncols(), |i, j| diff[(i, j)] * c64::new(0.0, -0.5))
    }
}

/// Convenience wrapper around [`SpinMatrices::new`].
pub fn build_spin_operators(s: f64) -> CoreResult<SpinMatrices> {
    SpinMatrices::new(s)
}

fn ln_binomial(n: u32, k: u32) -> f64 {
    let lf = |x: u32| (1..=x).map(|v| (v as f64).ln()).sum::<f64>();
    lf(n) - lf(k) - lf(n - k)
}

fn ln_pow(base: f64, exp: u32) -> f64 {
    if exp == 0 {
        0.0
    } else {
        exp as f64 * base.abs().ln()
    }
}

/// Spin coherent state with polar angle `theta` and azimuth `phi`, so that
/// `<S^+> = S sin(theta) e^{i phi}` and `<S_z> = S cos(theta)`.
///
/// Amplitudes are assembled in log space to stay finite for large `S`.
pub fn spin_coherent_state(s: f64, theta: f64, phi: f64) -> CoreResult<Vec<c64>> {
    let two_s = twice_spin(s)?;
    if !theta.is_finite() || !phi.is_finite() {
        return Err(CoreError::InvalidArgument("angles must be finite".into()));
    }
    let (c, sn) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let sign_c: f64 = if c < 0.0 { -1.0 } else { 1.0 };
    let sign_s: f64 = if sn < 0.0 { -1.0 } else { 1.0 };
    let mut out = Vec::with_capacity(two_s as usize + 1);
    for i in 0..=two_s {
        // i counts lowering steps from m = S
        let up = two_s - i;
        let mag = if (c == 0.0 && up > 0) || (sn == 0.0 && i > 0) {
            0.0
        } else {
            (0.5 * ln_binomial(two_s, i) + ln_pow(c, up) + ln_pow(sn, i)).exp()
        };
        let sign = sign_c.powi(up as i32) * sign_s.powi(i as i32);
        let phase = c64::from_polar(1.0, i as f64 * phi);
        out.push(phase * (sign * mag));
    }
    let norm = out.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    out.iter_mut().for_each(|v| *v /= norm);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expect(op: &Mat<c64>, psi: &[c64]) -> c64 {
        let n = psi.len();
        let mut acc = ZERO;
        for i in 0..n {
            for j in 0..n {
                acc += psi[i].conj() * op[(i, j)] * psi[j];
            }
        }
        acc
    }

    #[test]
    fn spin_half_sz() {
        let sp = SpinMatrices::new(0.5).unwrap();
        assert_eq!(sp.s_z[(0, 0)].re, 0.5);
        assert_eq!(sp.s_z[(1, 1)].re, -0.5);
    }

    #[test]
    fn spin_one_ladder_entries() {
        let sp = SpinMatrices::new(1.0).unwrap();
        let mut count = 0;
        for i in 0..3 {
            for j in 0..3 {
                let v = sp.s_plus[(i, j)];
                if v != ZERO {
                    assert!((v.re - 2f64.sqrt()).abs() < 1e-15);
                    count += 1;
                }
            }
        }
        assert_eq!(count, 2);
    }

    #[test]
    fn spin_twelve_commutator() {
        let sp = SpinMatrices::new(12.0).unwrap();
        assert_eq!(sp.dim(), 25);
        let comm = &sp.s_plus * &sp.s_minus - &sp.s_minus * &sp.s_plus;
        let diff = Mat::from_fn(25, 25, |i, j| comm[(i, j)] - sp.s_z[(i, j)] * 2.0);
        assert!(diff.norm_max() < 1e-12);
    }

    #[test]
    fn rejects_non_half_integer() {
        assert!(SpinMatrices::new(0.3).is_err());
        assert!(SpinMatrices::new(-1.0).is_err());
    }

    #[test]
    fn coherent_poles_and_equator() {
        let up = spin_coherent_state(3.0, 0.0, 0.0).unwrap();
        assert!((up[0].norm() - 1.0).abs() < 1e-14);
        let sp = SpinMatrices::new(3.0).unwrap();
        let down = spin_coherent_state(3.0, std::f64::consts::PI, 0.0).unwrap();
        assert!((expect(&sp.s_z, &down).re + 3.0).abs() < 1e-10);

        let sp10 = SpinMatrices::new(10.0).unwrap();
        let x = spin_coherent_state(10.0, std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        assert!((expect(&sp10.s_x(), &x).re - 10.0).abs() < 1e-8);
    }

    #[test]
    fn coherent_orientation_convention() {
        let s = 2.5;
        let sp = SpinMatrices::new(s).unwrap();
        let (th, ph) = (0.7f64, -1.3f64);
        let psi = spin_coherent_state(s, th, ph).unwrap();
        let sp_exp = expect(&sp.s_plus, &psi);
        let want = c64::from_polar(s * th.sin(), ph);
        assert!((sp_exp - want).norm() < 1e-12);
        assert!((expect(&sp.s_z, &psi).re - s * th.cos()).abs() < 1e-12);
    }

    #[test]
    fn coherent_large_spin_normalized() {
        let psi = spin_coherent_state(1000.0, 1.1, 0.4).unwrap();
        let n: f64 = psi.iter().map(|v| v.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-12);
        assert!(psi.iter().all(|v| v.re.is_finite() && v.im.is_finite()));
    }
}
