//! Linearized stability of polarized configurations.
//!
//! Every spin of the chain is frozen at `m = +-S` and its fluctuations are
//! described by one Holstein-Primakoff boson. The first moments then obey a
//! linear equation whose least stable eigenvalue tells whether the
//! configuration survives, oscillates or decays away.

use std::fmt;

use rayon::prelude::*;
use spinlab_core::c64;
use spinlab_hpa::gaussian::{site_drift, LinearModes, Orientation, Pump};
use thiserror::Error;

/// Largest chain (in sites) for which all configurations are enumerated.
pub const MAX_SITES: usize = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuenchError {
    #[error("invalid parameters: {0}")]
    InvalidArgument(String),
    #[error("eigenvalue computation failed: {0}")]
    Eigen(String),
}

pub type QuenchResult<T> = Result<T, QuenchError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchParams {
    pub gamma_g: f64,
    pub gamma_l: f64,
    pub g: f64,
    pub h: f64,
    pub periodic: bool,
}

impl QuenchParams {
    pub fn new(gamma_g: f64, gamma_l: f64, g: f64, h: f64) -> Self {
        Self { gamma_g, gamma_l, g, h, periodic: true }
    }

    fn validate(&self) -> QuenchResult<()> {
        for (name, v) in [("gamma_g", self.gamma_g), ("gamma_l", self.gamma_l), ("g", self.g), ("h", self.h)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(QuenchError::InvalidArgument(format!("{name} must be finite and non-negative")));
            }
        }
        Ok(())
    }

    /// Neutrality tolerance `1e-9 max(Gamma, g)`.
    pub fn tolerance(&self) -> f64 {
        1e-9 * self.gamma_g.max(self.gamma_l).max(self.g)
    }
}

/// Orientation of every site, ordered `(a,1), (b,1), (a,2), ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpinConfiguration {
    sites: Vec<Orientation>,
}

impl SpinConfiguration {
    pub fn new(sites: Vec<Orientation>) -> QuenchResult<Self> {
        if sites.is_empty() || sites.len() % 2 != 0 {
            return Err(QuenchError::InvalidArgument(format!("expected 2N sites, got {}", sites.len())));
        }
        Ok(Self { sites })
    }

    /// Configuration whose bitstring (site 0 first, `1` = up) is the binary
    /// representation of `value`.
    pub fn from_index(value: u64, n_sites: usize) -> QuenchResult<Self> {
        if n_sites > 63 || (n_sites < 63 && value >> n_sites != 0) {
            return Err(QuenchError::InvalidArgument(format!("{value} does not fit in {n_sites} sites")));
        }
        let sites = (0..n_sites)
            .map(|i| if value >> (n_sites - 1 - i) & 1 == 1 { Orientation::Up } else { Orientation::Down })
            .collect();
        Self::new(sites)
    }

    pub fn parse(bits: &str) -> QuenchResult<Self> {
        let sites = bits
            .chars()
            .map(|c| match c {
                '1' => Ok(Orientation::Up),
                '0' => Ok(Orientation::Down),
                other => Err(QuenchError::InvalidArgument(format!("unexpected character {other:?}"))),
            })
            .collect::<QuenchResult<Vec<_>>>()?;
        Self::new(sites)
    }

    pub fn index(&self) -> u64 {
        self.sites.iter().fold(0, |acc, o| (acc << 1) | u64::from(*o == Orientation::Up))
    }

    pub fn sites(&self) -> &[Orientation] {
        &self.sites
    }

    pub fn n_cells(&self) -> usize {
        self.sites.len() / 2
    }

    pub fn flipped(&self) -> Self {
        Self { sites: self.sites.iter().map(|o| o.flipped()).collect() }
    }

    /// Exchanges the sublattices by the reflection `a_n <-> b_{-n}`, which
    /// maps the bond pattern of the chain onto itself.
    pub fn sublattice_swapped(&self) -> Self {
        let n = self.n_cells();
        let mut sites = self.sites.clone();
        for m in 0..n {
            let src = (n - m) % n;
            sites[2 * m] = self.sites[2 * src + 1];
            sites[2 * m + 1] = self.sites[2 * src];
        }
        Self { sites }
    }

    /// Staggered pattern with every spin aligned with its pump.
    pub fn pump_aligned(n_cells: usize) -> Self {
        let sites = (0..2 * n_cells)
            .map(|i| if i % 2 == 0 { Orientation::Up } else { Orientation::Down })
            .collect();
        Self { sites }
    }
}

impl fmt::Display for SpinConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.sites {
            f.write_str(if *o == Orientation::Up { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// First-moment generator on `(c_1..c_{2N}, c_1^dag..c_{2N}^dag)`.
pub fn build_fluctuation_matrix(config: &SpinConfiguration, params: &QuenchParams) -> QuenchResult<LinearModes> {
    params.validate()?;
    let n = config.n_cells();
    let sites = config.sites();
    let diag: Vec<f64> = sites
        .iter()
        .enumerate()
        .map(|(i, &o)| {
            if i % 2 == 0 {
                site_drift(Pump::Gain, o, params.gamma_g)
            } else {
                site_drift(Pump::Loss, o, params.gamma_l)
            }
        })
        .collect();
    let noise: Vec<f64> = (0..2 * n).map(|i| if i % 2 == 0 { params.gamma_g } else { params.gamma_l }).collect();
    let mut bonds = Vec::new();
    for cell in 0..n {
        bonds.push((2 * cell, 2 * cell + 1, params.g));
        if cell + 1 < n || params.periodic {
            bonds.push((2 * cell + 1, (2 * cell + 2) % (2 * n), params.h));
        }
    }
    let (mut number, mut pair) = (Vec::new(), Vec::new());
    for (i, j, coupling) in bonds {
        if coupling == 0.0 {
            continue;
        }
        if sites[i] == sites[j] {
            number.push((i, j, coupling));
        } else {
            pair.push((i, j, coupling));
        }
    }
    Ok(LinearModes::from_couplings(&diag, &noise, &number, &pair))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StabilityClass {
    Stable,
    Neutral,
    Unstable,
}

impl StabilityClass {
    pub fn name(&self) -> &'static str {
        match self {
            StabilityClass::Stable => "stable",
            StabilityClass::Neutral => "neutral",
            StabilityClass::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone)]
pub struct StabilityRecord {
    pub configuration: SpinConfiguration,
    /// Eigenvalue with the largest real part.
    pub mu_max: c64,
    pub class: StabilityClass,
    pub spectrum: Option<Vec<c64>>,
}

/// Spectrum of the fluctuation matrix, ascending in real part.
pub fn fluctuation_spectrum(config: &SpinConfiguration, params: &QuenchParams) -> QuenchResult<Vec<c64>> {
    let modes = build_fluctuation_matrix(config, params)?;
    let mut ev = modes.eigenvalues().map_err(|e| QuenchError::Eigen(e.to_string()))?;
    ev.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
    Ok(ev)
}

pub fn classify(mu: c64, tol: f64) -> StabilityClass {
    if mu.re < -tol {
        StabilityClass::Stable
    } else if mu.re <= tol {
        StabilityClass::Neutral
    } else {
        StabilityClass::Unstable
    }
}

pub fn stability_record(config: &SpinConfiguration, params: &QuenchParams, keep_spectrum: bool) -> QuenchResult<StabilityRecord> {
    let spectrum = fluctuation_spectrum(config, params)?;
    // Among modes of equal growth prefer the positive frequency so the
    // choice does not depend on eigensolver ordering.
    let tol = params.tolerance();
    let top = spectrum.last().expect("non-empty spectrum").re;
    let mu_max = spectrum
        .iter()
        .filter(|z| z.re >= top - tol)
        .copied()
        .max_by(|a, b| a.im.partial_cmp(&b.im).unwrap())
        .unwrap();
    Ok(StabilityRecord {
        configuration: config.clone(),
        mu_max,
        class: classify(mu_max, tol),
        spectrum: keep_spectrum.then_some(spectrum),
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StabilityCounts {
    pub stable: usize,
    pub neutral: usize,
    pub unstable: usize,
}

#[derive(Debug, Clone)]
pub struct StabilityMap {
    /// One record per configuration, ordered by bitstring value.
    pub records: Vec<StabilityRecord>,
    pub counts: StabilityCounts,
}

/// Enumerates all `2^{2N}` configurations.
pub fn stability_map(params: &QuenchParams, n_cells: usize, keep_spectra: bool) -> QuenchResult<StabilityMap> {
    let n_sites = 2 * n_cells;
    if n_cells == 0 || n_sites > MAX_SITES {
        return Err(QuenchError::InvalidArgument(format!("2N = {n_sites} must lie in 2..={MAX_SITES}")));
    }
    let records = (0..1u64 << n_sites)
        .into_par_iter()
        .map(|idx| {
            let config = SpinConfiguration::from_index(idx, n_sites)?;
            stability_record(&config, params, keep_spectra)
        })
        .collect::<QuenchResult<Vec<_>>>()?;
    let mut counts = StabilityCounts::default();
    for r in &records {
        match r.class {
            StabilityClass::Stable => counts.stable += 1,
            StabilityClass::Neutral => counts.neutral += 1,
            StabilityClass::Unstable => counts.unstable += 1,
        }
    }
    Ok(StabilityMap { records, counts })
}
