use spinlab_core::c64;

use crate::arnoldi::{shift_invert, ArnoldiOptions};
use crate::error::{LiouvilleError, LiouvilleResult};
use crate::superop::Superoperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Full diagonalization of every symmetry sector.
    Dense,
    /// Arnoldi on `(L - sigma)^{-1}` in every sector.
    ShiftInvert,
    /// Dense up to `dense_limit`, shift-invert above.
    Auto,
}

#[derive(Debug, Clone, Copy)]
pub struct SpectrumOptions {
    /// Number of eigenvalues kept in the result.
    pub k: usize,
    pub strategy: Strategy,
    /// Largest sector dimension handled densely under [`Strategy::Auto`].
    pub dense_limit: usize,
    /// Eigenvalues requested per sector on the shift-invert path.
    pub per_sector: usize,
}

impl SpectrumOptions {
    pub fn new(k: usize, strategy: Strategy) -> Self {
        Self {
            k,
            strategy,
            dense_limit: 4096,
            per_sector: k.max(2),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Kept eigenvalues, ascending in `|Re|`; the stationary one first.
    pub eigenvalues: Vec<c64>,
    /// Charge-difference sector of each kept eigenvalue.
    pub sectors: Vec<i64>,
    /// Smallest decay rate `-Re(lambda)` over all non-stationary modes found.
    pub gap: f64,
    /// Sector of the mode setting the gap.
    pub gap_sector: i64,
    /// Whether every eigenvalue of the generator was computed.
    pub complete: bool,
}

impl SpectrumResult {
    /// Number of kept eigenvalues with `|lambda| < tol`.
    pub fn count_near_zero(&self, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|z| z.norm() < tol).count()
    }

    /// Number of kept eigenvalues with `|Re lambda| < tol`.
    pub fn count_slow(&self, tol: f64) -> usize {
        self.eigenvalues.iter().filter(|z| z.re.abs() < tol).count()
    }
}

fn dense_eigenvalues(block: &spinlab_core::SparseMatrix) -> LiouvilleResult<Vec<c64>> {
    block
        .to_dense()
        .eigenvalues()
        .map_err(|e| LiouvilleError::Eigen(format!("{e:?}")))
}

pub fn spectrum(l: &Superoperator, opts: SpectrumOptions) -> LiouvilleResult<SpectrumResult> {
    if opts.k < 2 {
        return Err(LiouvilleError::InvalidArgument("at least two eigenvalues are required".into()));
    }
    let sigma = c64::new(1e-6 * l.norm(), 0.0);
    let symmetric = l.charges().is_some();
    let mut found: Vec<(c64, i64)> = Vec::new();
    let mut complete = true;
    for (q, idx) in l.sectors() {
        if symmetric && q < 0 {
            continue;
        }
        let block = l.sector_block(&idx);
        let dense = match opts.strategy {
            Strategy::Dense => true,
            Strategy::ShiftInvert => false,
            Strategy::Auto => idx.len() <= opts.dense_limit,
        };
        let ev = if dense || idx.len() <= opts.per_sector + 2 {
            dense_eigenvalues(&block)?
        } else {
            complete = false;
            shift_invert(&block, sigma, ArnoldiOptions::new(opts.per_sector))?
        };
        for z in ev {
            found.push((z, q));
            if symmetric && q > 0 {
                found.push((z.conj(), -q));
            }
        }
    }
    let stationary = found
        .iter()
        .enumerate()
        .filter(|(_, (_, q))| *q == 0)
        .min_by(|a, b| a.1 .0.norm().partial_cmp(&b.1 .0.norm()).unwrap())
        .map(|(i, _)| i)
        .ok_or_else(|| LiouvilleError::Eigen("no eigenvalue in the population sector".into()))?;
    let (z0, q0) = found.remove(stationary);
    let (gap, gap_sector) = found
        .iter()
        .map(|(z, q)| (-z.re, *q))
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
        .unwrap_or((f64::INFINITY, 0));
    found.sort_by(|a, b| a.0.re.abs().partial_cmp(&b.0.re.abs()).unwrap());
    found.insert(0, (z0, q0));
    found.truncate(opts.k);
    Ok(SpectrumResult {
        eigenvalues: found.iter().map(|x| x.0).collect(),
        sectors: found.iter().map(|x| x.1).collect(),
        gap,
        gap_sector,
        complete,
    })
}
