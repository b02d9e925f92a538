use std::collections::BTreeMap;

use spinlab_core::{c64, ModelOperators, SparseMatrix};

use crate::error::{LiouvilleError, LiouvilleResult};

/// Largest superoperator dimension `d^2` accepted by [`vectorize`].
pub const DEFAULT_MAX_SUPEROP_DIM: usize = 100_000;

#[derive(Debug, Clone)]
pub struct Superoperator {
    dim: usize,
    matrix: SparseMatrix,
    charges: Option<Vec<i64>>,
}

pub fn vectorize(model: &ModelOperators) -> LiouvilleResult<Superoperator> {
    vectorize_with_budget(model, DEFAULT_MAX_SUPEROP_DIM)
}

/// `L = I⊗G + conj(G)⊗I + Σ 2 r conj(J)⊗J` with `G = -iH - Σ r J^†J`.
pub fn vectorize_with_budget(model: &ModelOperators, max_dim: usize) -> LiouvilleResult<Superoperator> {
    model.validate()?;
    let d = model.dim();
    let n = d.checked_mul(d).unwrap_or(usize::MAX);
    if n > max_dim {
        return Err(LiouvilleError::Budget { dim: n, limit: max_dim });
    }
    let mut terms: Vec<(c64, SparseMatrix)> = vec![(c64::new(0.0, -1.0), model.hamiltonian.clone())];
    for j in &model.jumps {
        terms.push((c64::new(-j.rate, 0.0), j.op.adjoint().matmul(&j.op)?));
    }
    let refs: Vec<(c64, &SparseMatrix)> = terms.iter().map(|(f, m)| (*f, m)).collect();
    let g = SparseMatrix::linear_combination(&refs)?;

    let mut t: Vec<(usize, usize, c64)> = Vec::new();
    for (i, ip, v) in g.triplets() {
        for j in 0..d {
            t.push((i + d * j, ip + d * j, v));
        }
    }
    for (j, jp, v) in g.triplets() {
        let v = v.conj();
        for i in 0..d {
            t.push((i + d * j, i + d * jp, v));
        }
    }
    for jump in &model.jumps {
        let entries: Vec<_> = jump.op.triplets().collect();
        let w = 2.0 * jump.rate;
        for &(j, jp, b) in &entries {
            let b = b.conj() * w;
            for &(i, ip, a) in &entries {
                t.push((i + d * j, ip + d * jp, a * b));
            }
        }
    }
    let matrix = SparseMatrix::from_triplets(n, n, t)?;
    Ok(Superoperator {
        dim: d,
        matrix,
        charges: model.charges.clone(),
    })
}

impl Superoperator {
    /// Wraps an explicit `d^2 x d^2` generator.
    pub fn from_matrix(dim: usize, matrix: SparseMatrix, charges: Option<Vec<i64>>) -> LiouvilleResult<Self> {
        if matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(LiouvilleError::InvalidArgument(format!(
                "generator must be {0}x{0}",
                dim * dim
            )));
        }
        Ok(Self { dim, matrix, charges })
    }

    /// Hilbert-space dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn charges(&self) -> Option<&[i64]> {
        self.charges.as_deref()
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm_inf()
    }

    /// Index of `rho[i, j]` in the vectorized density matrix.
    pub fn vec_index(&self, i: usize, j: usize) -> usize {
        i + self.dim * j
    }

    /// Vectorized indices grouped by the charge difference `c_i - c_j`.
    /// Without a conserved charge everything lands in sector 0.
    pub fn sectors(&self) -> BTreeMap<i64, Vec<usize>> {
        let mut out: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        let d = self.dim;
        for p in 0..d * d {
            let q = match &self.charges {
                Some(c) => c[p % d] - c[p / d],
                None => 0,
            };
            out.entry(q).or_default().push(p);
        }
        out
    }

    pub fn sector_block(&self, indices: &[usize]) -> SparseMatrix {
        self.matrix.submatrix(indices)
    }

    /// Largest entry of `vec(I)^† L`, which vanishes for a trace-preserving
    /// generator.
    pub fn trace_defect(&self) -> f64 {
        let d = self.dim;
        let mut acc = vec![c64::new(0.0, 0.0); d * d];
        for i in 0..d {
            let (cols, vals) = self.matrix.row(i + d * i);
            for (&c, &v) in cols.iter().zip(vals) {
                acc[c] += v;
            }
        }
        acc.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, x: &[c64]) -> Vec<c64> {
        self.matrix.apply(x)
    }

    pub fn vec_of(&self, rho: &spinlab_core::Mat<c64>) -> Vec<c64> {
        let d = self.dim;
        (0..d * d).map(|p| rho[(p % d, p / d)]).collect()
    }

    pub fn unvec(&self, x: &[c64]) -> spinlab_core::Mat<c64> {
        let d = self.dim;
        spinlab_core::Mat::from_fn(d, d, |i, j| x[i + d * j])
    }
}
