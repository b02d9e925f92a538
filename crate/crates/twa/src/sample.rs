use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use spinlab_core::c64;

use crate::sde::SchwingerField;

/// Coherent-state mean `sqrt(2S) (cos(theta/2), sin(theta/2) e^{i phi})`,
/// which gives `<S^+> = S sin(theta) e^{i phi}` and `<S^z> = S cos(theta)`.
pub fn coherent_amplitudes(s: f64, theta: f64, phi: f64) -> (c64, c64) {
    let r = (2.0 * s).sqrt();
    (c64::new(r * (0.5 * theta).cos(), 0.0), c64::from_polar(r * (0.5 * theta).sin(), phi))
}

/// Complex Gaussian with `E|z|^2 = variance`.
pub(crate) fn complex_normal<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> c64 {
    let w = (0.5 * variance).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64::new(w * re, w * im)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sampling {
    /// Spin coherent state: the `SU(2)` rotation of `|2S>_a |0>_b`. The
    /// rotated `a` mode has `|alpha'|^2 = 2S + 1/2` with variance 1/4 and a
    /// uniform phase, the rotated `b` mode is vacuum. Fixes the spin length:
    /// the Weyl-corrected variance of `a^dag a + b^dag b` vanishes.
    SpinCoherent,
    /// Two-mode boson coherent state: each mode is its mean plus vacuum noise
    /// of variance 1/2. Same first moments, but the spin length fluctuates by
    /// `sqrt(2S)`, which adds `S/2` to `(Delta S^z)^2`.
    BosonCoherent,
    /// Sharp fields, no noise.
    Sharp,
}

/// Wigner sample of a product state with per-site orientations
/// `(theta, phi)`.
pub fn sample_initial<R: Rng + ?Sized>(orientations: &[(f64, f64)], s: f64, rng: &mut R, sampling: Sampling) -> SchwingerField {
    let mut alpha = Vec::with_capacity(orientations.len());
    let mut beta = Vec::with_capacity(orientations.len());
    for &(theta, phi) in orientations {
        let (a, b) = match sampling {
            Sampling::Sharp => coherent_amplitudes(s, theta, phi),
            Sampling::BosonCoherent => {
                let (a, b) = coherent_amplitudes(s, theta, phi);
                (a + complex_normal(rng, 0.5), b + complex_normal(rng, 0.5))
            }
            Sampling::SpinCoherent => {
                let xi: f64 = rng.sample(StandardNormal);
                let chi = rng.random_range(0.0..std::f64::consts::TAU);
                let a0 = c64::from_polar((2.0 * s + 0.5 + 0.5 * xi).max(0.0).sqrt(), chi);
                let b0 = complex_normal(rng, 0.5);
                let (c, sn) = ((0.5 * theta).cos(), (0.5 * theta).sin());
                let e = c64::from_polar(1.0, phi);
                (a0 * c - b0 * e.conj() * sn, a0 * e * sn + b0 * c)
            }
        };
        alpha.push(a);
        beta.push(b);
    }
    SchwingerField { alpha, beta }
}
