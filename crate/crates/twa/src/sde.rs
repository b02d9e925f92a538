use serde::Serialize;
use spinlab_core::c64;

/// Schwinger amplitudes of every spin site, ordered `(a,1), (b,1), ...`.
/// `alpha` belongs to the boson raised by `S^+`, `beta` to the one lowered.
#[derive(Debug, Clone, PartialEq)]
pub struct SchwingerField {
    pub alpha: Vec<c64>,
    pub beta: Vec<c64>,
}

impl SchwingerField {
    pub fn n_sites(&self) -> usize {
        self.alpha.len()
    }

    /// `|alpha|^2 + |beta|^2` of a site.
    pub fn weight(&self, site: usize) -> f64 {
        self.alpha[site].norm_sqr() + self.beta[site].norm_sqr()
    }

    /// Weyl symbol of `S^z`.
    pub fn s_z(&self, site: usize) -> f64 {
        0.5 * (self.alpha[site].norm_sqr() - self.beta[site].norm_sqr())
    }

    /// Weyl symbol of `S^+`.
    pub fn s_plus(&self, site: usize) -> c64 {
        self.alpha[site].conj() * self.beta[site]
    }

    pub fn is_finite(&self) -> bool {
        self.alpha.iter().chain(&self.beta).all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PumpKind {
    /// Jump `S^+ = a^dag b`.
    Gain,
    /// Jump `S^- = b^dag a`.
    Loss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftKind {
    /// Symmetrization corrections dropped: the flow of the classical fields.
    /// With the positive diffusion below this is also the Stratonovich drift.
    Classical,
    /// Drift of the Wigner Fokker-Planck equation, to be paired with Ito
    /// calculus.
    Ito,
}

/// Langevin system for the chain.
///
/// For a jump `a^dag b` at rate `kappa` (dissipator `kappa D[a^dag b]`):
///
/// ```text
/// d alpha = kappa alpha (|beta|^2 - 1/2) dt + sqrt(kappa) beta dZ
/// d beta  = -kappa beta (|alpha|^2 + 1/2) dt - sqrt(kappa) alpha dZ* + sqrt(kappa/2) dZ'
/// ```
///
/// (Ito form; `E|dZ|^2 = dt`). The noise reproduces the exact diffusion of
/// every second moment except `kappa/2` in `<a^dag a>`, which is negative
/// and dropped. A jump `b^dag a` is the same with the two modes exchanged.
/// A bond `(J/2S)(S_i^+ S_j^- + h.c.)` adds the noiseless flow
/// `d alpha_i = -i (J/2S) beta_i s_j^-`, `d beta_i = -i (J/2S) alpha_i s_j^+`
/// with `s^+ = alpha^* beta`.
#[derive(Debug, Clone)]
pub struct SdeModel {
    pub n_sites: usize,
    pub s: f64,
    /// `(i, j, coupling)`, already divided by `2S`.
    pub bonds: Vec<(usize, usize, f64)>,
    /// `(site, kind, kappa)`.
    pub pumps: Vec<(usize, PumpKind, f64)>,
}

/// Chain of `n_cells` cells; `g` couples `a_n b_n`, `h` couples `b_n a_{n+1}`.
pub fn derive_sde(n_cells: usize, s: f64, g: f64, h: f64, gamma_g: f64, gamma_l: f64, periodic: bool) -> SdeModel {
    let n_sites = 2 * n_cells;
    let mut bonds = Vec::new();
    for cell in 0..n_cells {
        if g != 0.0 {
            bonds.push((2 * cell, 2 * cell + 1, g / (2.0 * s)));
        }
        if h != 0.0 && (cell + 1 < n_cells || (periodic && n_cells > 1)) {
            bonds.push((2 * cell + 1, (2 * cell + 2) % n_sites, h / (2.0 * s)));
        }
    }
    let mut pumps = Vec::new();
    for cell in 0..n_cells {
        if gamma_g != 0.0 {
            pumps.push((2 * cell, PumpKind::Gain, gamma_g / (2.0 * s)));
        }
        if gamma_l != 0.0 {
            pumps.push((2 * cell + 1, PumpKind::Loss, gamma_l / (2.0 * s)));
        }
    }
    SdeModel { n_sites, s, bonds, pumps }
}

const I: c64 = c64 { re: 0.0, im: 1.0 };

impl SdeModel {
    /// Number of complex normal deviates consumed per step.
    pub fn noise_dim(&self) -> usize {
        2 * self.pumps.len()
    }

    pub fn drift(&self, f: &SchwingerField, kind: DriftKind, da: &mut [c64], db: &mut [c64]) {
        da.iter_mut().chain(db.iter_mut()).for_each(|z| *z = c64::new(0.0, 0.0));
        for &(i, j, c) in &self.bonds {
            let (sp_i, sp_j) = (f.s_plus(i), f.s_plus(j));
            da[i] += -I * c * f.beta[i] * sp_j.conj();
            db[i] += -I * c * f.alpha[i] * sp_j;
            da[j] += -I * c * f.beta[j] * sp_i.conj();
            db[j] += -I * c * f.alpha[j] * sp_i;
        }
        let shift = match kind {
            DriftKind::Classical => 0.0,
            DriftKind::Ito => 0.5,
        };
        for &(site, pump, k) in &self.pumps {
            let (a, b) = (f.alpha[site], f.beta[site]);
            match pump {
                PumpKind::Gain => {
                    da[site] += a * (k * (b.norm_sqr() - shift));
                    db[site] -= b * (k * (a.norm_sqr() + shift));
                }
                PumpKind::Loss => {
                    db[site] += b * (k * (a.norm_sqr() - shift));
                    da[site] -= a * (k * (b.norm_sqr() + shift));
                }
            }
        }
    }

    /// Adds the noise increment for complex deviates `z` (two per pump,
    /// each with `E|z|^2 = dt`) evaluated at the field `f`.
    pub fn add_noise(&self, f: &SchwingerField, z: &[c64], da: &mut [c64], db: &mut [c64]) {
        for (p, &(site, pump, k)) in self.pumps.iter().enumerate() {
            let (z1, z2) = (z[2 * p], z[2 * p + 1]);
            let (sk, sh) = (k.sqrt(), (0.5 * k).sqrt());
            let (a, b) = (f.alpha[site], f.beta[site]);
            match pump {
                PumpKind::Gain => {
                    da[site] += b * z1 * sk;
                    db[site] += -(a * z1.conj() * sk) + z2 * sh;
                }
                PumpKind::Loss => {
                    db[site] += a * z1 * sk;
                    da[site] += -(b * z1.conj() * sk) + z2 * sh;
                }
            }
        }
    }
}
