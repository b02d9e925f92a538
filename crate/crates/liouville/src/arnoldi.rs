//! Restarted Arnoldi iteration for the largest-magnitude eigenvalues of a
//! linear operator, and its shift-invert use on sparse matrices.

use faer::prelude::*;
use faer::Mat;
use spinlab_core::{c64, SparseMatrix};

use crate::error::{LiouvilleError, LiouvilleResult};

#[derive(Debug, Clone, Copy)]
pub struct ArnoldiOptions {
    /// Number of eigenvalues wanted.
    pub nev: usize,
    /// Krylov subspace size per cycle.
    pub ncv: usize,
    /// Relative residual tolerance on Ritz pairs.
    pub tol: f64,
    pub max_restarts: usize,
}

impl ArnoldiOptions {
    pub fn new(nev: usize) -> Self {
        Self {
            nev,
            ncv: (3 * nev + 30).max(60),
            tol: 1e-10,
            max_restarts: 60,
        }
    }
}

fn dot(a: &[c64], b: &[c64]) -> c64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[c64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn start_vector(n: usize) -> Vec<c64> {
    let mut state = 0x9E37_79B9_7F4A_7C15u64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let v: Vec<c64> = (0..n).map(|_| c64::new(next(), next())).collect();
    let s = norm(&v);
    v.into_iter().map(|x| x / s).collect()
}

/// Largest-magnitude eigenvalues of `op` (acting on vectors of length `n`),
/// returned with their relative residual estimates, ordered by decreasing
/// magnitude.
pub fn largest_eigenvalues(
    n: usize,
    mut op: impl FnMut(&[c64]) -> Vec<c64>,
    opts: ArnoldiOptions,
) -> LiouvilleResult<Vec<(c64, f64)>> {
    if opts.nev == 0 || n == 0 {
        return Ok(Vec::new());
    }
    let nev = opts.nev.min(n);
    let m = opts.ncv.min(n).max(nev + 1).min(n);
    let mut v0 = start_vector(n);
    let mut worst = f64::INFINITY;
    let mut converged = 0;
    for restart in 0..=opts.max_restarts {
        let mut basis: Vec<Vec<c64>> = Vec::with_capacity(m + 1);
        let mut h = Mat::<c64>::zeros(m + 1, m);
        basis.push(v0.clone());
        let mut steps = m;
        for j in 0..m {
            let mut w = op(&basis[j]);
            for _pass in 0..2 {
                for (i, vi) in basis.iter().enumerate() {
                    let c = dot(vi, &w);
                    h[(i, j)] += c;
                    w.iter_mut().zip(vi).for_each(|(wk, vk)| *wk -= c * vk);
                }
            }
            let beta = norm(&w);
            h[(j + 1, j)] = c64::new(beta, 0.0);
            if beta < 1e-14 * h.norm_max().max(1.0) {
                steps = j + 1;
                break;
            }
            basis.push(w.into_iter().map(|x| x / beta).collect());
        }
        let hm = h.submatrix(0, 0, steps, steps).to_owned();
        let eig = hm
            .eigen()
            .map_err(|e| LiouvilleError::Eigen(format!("{e:?}")))?;
        let beta = h[(steps, steps - 1)].norm();
        let s = eig.S();
        let u = eig.U();
        let mut order: Vec<usize> = (0..steps).collect();
        order.sort_by(|&a, &b| s[b].norm().partial_cmp(&s[a].norm()).unwrap());
        let wanted = &order[..nev.min(steps)];
        let mut res = Vec::with_capacity(wanted.len());
        for &k in wanted {
            let theta = s[k];
            let col_norm = (0..steps).map(|i| u[(i, k)].norm_sqr()).sum::<f64>().sqrt();
            let r = beta * u[(steps - 1, k)].norm() / col_norm / theta.norm().max(1e-300);
            res.push((theta, r));
        }
        worst = res.iter().map(|x| x.1).fold(0.0, f64::max);
        converged = res.iter().filter(|x| x.1 < opts.tol).count();
        if converged == res.len() || steps < m {
            return Ok(res);
        }
        if restart == opts.max_restarts {
            break;
        }
        let mut next = vec![c64::new(0.0, 0.0); n];
        for &k in wanted {
            for (i, vi) in basis.iter().take(steps).enumerate() {
                let c = u[(i, k)];
                next.iter_mut().zip(vi).for_each(|(x, y)| *x += c * y);
            }
        }
        let s = norm(&next);
        v0 = next.into_iter().map(|x| x / s).collect();
    }
    Err(LiouvilleError::Arnoldi {
        converged,
        wanted: nev,
        restarts: opts.max_restarts,
        worst_residual: worst,
    })
}

/// The `opts.nev` eigenvalues of `a` closest to `sigma`, obtained from
/// Arnoldi on `(a - sigma)^{-1}`.
pub fn shift_invert(a: &SparseMatrix, sigma: c64, opts: ArnoldiOptions) -> LiouvilleResult<Vec<c64>> {
    let n = a.nrows();
    let shifted = a.add(&SparseMatrix::identity(n).scale(-sigma))?;
    let lu = shifted
        .to_faer()?
        .sp_lu()
        .map_err(|e| LiouvilleError::Factorization(format!("{e:?}")))?;
    let op = |x: &[c64]| {
        let mut b = Mat::<c64>::from_fn(n, 1, |i, _| x[i]);
        lu.solve_in_place(b.as_mut());
        (0..n).map(|i| b[(i, 0)]).collect::<Vec<_>>()
    };
    let ritz = largest_eigenvalues(n, op, opts)?;
    Ok(ritz.into_iter().map(|(theta, _)| sigma + c64::new(1.0, 0.0) / theta).collect())
}
