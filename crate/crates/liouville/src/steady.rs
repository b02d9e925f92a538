use faer::prelude::*;
use faer::Mat;
use spinlab_core::{c64, SparseMatrix};

use crate::error::{LiouvilleError, LiouvilleResult};
use crate::superop::Superoperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    BorderedLu,
    Propagation,
}

#[derive(Debug, Clone)]
pub struct SteadyState {
    pub rho: Mat<c64>,
    /// `||L vec(rho)||_2`.
    pub residual: f64,
    pub method: SolveMethod,
}

impl SteadyState {
    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn trace(&self) -> c64 {
        (0..self.dim()).map(|i| self.rho[(i, i)]).sum()
    }
}

/// Trace-one null vector of `L` from the bordered system in which one
/// redundant diagonal row is replaced by the trace constraint. Falls back to
/// explicit propagation if the factorization fails or is inaccurate.
pub fn steady_state(l: &Superoperator) -> LiouvilleResult<SteadyState> {
    let tol = 1e-10 * l.norm().max(1.0);
    match bordered_solve(l) {
        Ok(st) if st.residual < tol => Ok(st),
        Ok(st) => propagate(l, Some(st.rho), tol),
        Err(_) => propagate(l, None, tol),
    }
}

fn sector_zero(l: &Superoperator) -> Vec<usize> {
    l.sectors().remove(&0).unwrap_or_default()
}

fn bordered_solve(l: &Superoperator) -> LiouvilleResult<SteadyState> {
    let d = l.dim();
    let idx = sector_zero(l);
    let block = l.sector_block(&idx);
    let is_diag: Vec<bool> = idx.iter().map(|&p| p % d == p / d).collect();
    let k = is_diag
        .iter()
        .position(|&b| b)
        .ok_or_else(|| LiouvilleError::InvalidArgument("no diagonal entries in sector 0".into()))?;
    let mut t: Vec<(usize, usize, c64)> = block.triplets().filter(|&(r, _, _)| r != k).collect();
    t.extend(
        is_diag
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(c, _)| (k, c, c64::new(1.0, 0.0))),
    );
    let bordered = SparseMatrix::from_triplets(idx.len(), idx.len(), t)?;
    let lu = bordered
        .to_faer()?
        .sp_lu()
        .map_err(|e| LiouvilleError::Factorization(format!("{e:?}")))?;
    let mut rhs = Mat::<c64>::zeros(idx.len(), 1);
    rhs[(k, 0)] = c64::new(1.0, 0.0);
    lu.solve_in_place(rhs.as_mut());
    let mut x = vec![c64::new(0.0, 0.0); d * d];
    for (local, &p) in idx.iter().enumerate() {
        x[p] = rhs[(local, 0)];
    }
    if x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(LiouvilleError::Factorization("non-finite solution".into()));
    }
    Ok(finish(l, x, SolveMethod::BorderedLu))
}

fn finish(l: &Superoperator, x: Vec<c64>, method: SolveMethod) -> SteadyState {
    let d = l.dim();
    let raw = l.unvec(&x);
    let mut rho = Mat::<c64>::from_fn(d, d, |i, j| (raw[(i, j)] + raw[(j, i)].conj()) * 0.5);
    let tr: c64 = (0..d).map(|i| rho[(i, i)]).sum();
    rho = Mat::from_fn(d, d, |i, j| rho[(i, j)] / tr);
    let r = l.apply(&l.vec_of(&rho));
    let residual = r.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    SteadyState { rho, residual, method }
}

/// Classical RK4 from `start` (or the maximally mixed state) until the
/// residual drops below `tol`.
fn propagate(l: &Superoperator, start: Option<Mat<c64>>, tol: f64) -> LiouvilleResult<SteadyState> {
    let d = l.dim();
    let rho0 = start.unwrap_or_else(|| Mat::<c64>::from_fn(d, d, |i, j| if i == j { c64::new(1.0 / d as f64, 0.0) } else { c64::new(0.0, 0.0) }));
    let mut x = l.vec_of(&rho0);
    let dt = 1.0 / l.norm().max(1e-300);
    let max_steps = 2_000_000usize;
    let m = l.matrix();
    let axpy = |x: &[c64], k: &[c64], h: f64| -> Vec<c64> { x.iter().zip(k).map(|(a, b)| a + b * h).collect() };
    let mut residual = f64::INFINITY;
    for step in 0..max_steps {
        let k1 = m.apply(&x);
        if step % 100 == 0 {
            residual = k1.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if residual < tol {
                return Ok(finish(l, x, SolveMethod::Propagation));
            }
        }
        let k2 = m.apply(&axpy(&x, &k1, dt / 2.0));
        let k3 = m.apply(&axpy(&x, &k2, dt / 2.0));
        let k4 = m.apply(&axpy(&x, &k3, dt));
        for i in 0..x.len() {
            x[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (dt / 6.0);
        }
    }
    Err(LiouvilleError::NotConverged { residual })
}

/// Steady state by direct propagation, ignoring the sparse solver.
pub fn steady_state_by_propagation(l: &Superoperator, tol: f64) -> LiouvilleResult<SteadyState> {
    propagate(l, None, tol)
}
