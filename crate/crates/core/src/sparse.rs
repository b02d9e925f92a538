//! Compressed sparse row storage for complex matrices.
//!
//! Only the handful of operations needed to assemble Hamiltonians and
//! Liouvillians are provided; factorizations go through `faer`.

use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use crate::error::{CoreError, CoreResult};
use crate::{c64, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<c64>,
}

impl SparseMatrix {
    /// Assembles a matrix from `(row, col, value)` entries. Duplicates are
    /// summed and exact zeros are dropped.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        entries: impl IntoIterator<Item = (usize, usize, c64)>,
    ) -> CoreResult<Self> {
        let mut entries: Vec<(usize, usize, c64)> = entries.into_iter().collect();
        for &(r, c, _) in &entries {
            if r >= nrows || c >= ncols {
                return Err(CoreError::InvalidArgument(format!(
                    "entry ({r}, {c}) outside a {nrows}x{ncols} matrix"
                )));
            }
        }
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; nrows + 1];
        let mut indices = Vec::with_capacity(entries.len());
        let mut values: Vec<c64> = Vec::with_capacity(entries.len());
        let mut last: Option<(usize, usize)> = None;
        let mut row_of = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                row_of.push(r);
                last = Some((r, c));
            }
        }
        let mut keep_idx = Vec::with_capacity(indices.len());
        let mut keep_val = Vec::with_capacity(values.len());
        for ((c, v), r) in indices.into_iter().zip(values).zip(row_of) {
            if v != ZERO {
                keep_idx.push(c);
                keep_val.push(v);
                indptr[r + 1] += 1;
            }
        }
        for r in 0..nrows {
            indptr[r + 1] += indptr[r];
        }
        Ok(Self {
            nrows,
            ncols,
            indptr,
            indices: keep_idx,
            values: keep_val,
        })
    }

    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            indptr: vec![0; nrows + 1],
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diagonal(&vec![1.0; n])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_triplets(n, n, diag.iter().enumerate().map(|(i, &d)| (i, i, c64::new(d, 0.0))))
            .expect("diagonal entries are in range")
    }

    pub fn from_dense(m: &Mat<c64>) -> Self {
        let mut t = Vec::new();
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let v = m[(i, j)];
                if v != ZERO {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), t).expect("dense indices are in range")
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    /// Column indices and values stored in `row`.
    pub fn row(&self, row: usize) -> (&[usize], &[c64]) {
        let (a, b) = (self.indptr[row], self.indptr[row + 1]);
        (&self.indices[a..b], &self.values[a..b])
    }

    pub fn get(&self, row: usize, col: usize) -> c64 {
        let (cols, vals) = self.row(row);
        match cols.binary_search(&col) {
            Ok(k) => vals[k],
            Err(_) => ZERO,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, c64)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            let (cols, vals) = self.row(r);
            cols.iter().zip(vals).map(move |(&c, &v)| (r, c, v))
        })
    }

    pub fn to_dense(&self) -> Mat<c64> {
        let mut m = Mat::<c64>::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    pub fn to_faer(&self) -> CoreResult<SparseColMat<usize, c64>> {
        let t: Vec<Triplet<usize, usize, c64>> =
            self.triplets().map(|(r, c, v)| Triplet::new(r, c, v)).collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &t)
            .map_err(|e| CoreError::InvalidArgument(format!("sparse conversion failed: {e:?}")))
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(self.ncols, self.nrows, self.triplets().map(|(r, c, v)| (c, r, v)))
            .expect("transposed indices are in range")
    }

    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = v.conj());
        out
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.ncols,
            self.nrows,
            self.triplets().map(|(r, c, v)| (c, r, v.conj())),
        )
        .expect("adjoint indices are in range")
    }

    pub fn scale(&self, factor: c64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= factor);
        out
    }

    pub fn add(&self, other: &Self) -> CoreResult<Self> {
        self.check_same_shape(other)?;
        Self::from_triplets(self.nrows, self.ncols, self.triplets().chain(other.triplets()))
    }

    /// Sum of `factor_k * matrix_k`; all terms must share a shape.
    pub fn linear_combination(terms: &[(c64, &Self)]) -> CoreResult<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(CoreError::InvalidArgument("empty linear combination".into()));
        };
        for (_, m) in terms {
            first.check_same_shape(m)?;
        }
        let it = terms
            .iter()
            .flat_map(|(f, m)| m.triplets().map(move |(r, c, v)| (r, c, *f * v)));
        Self::from_triplets(first.nrows, first.ncols, it)
    }

    pub fn matmul(&self, other: &Self) -> CoreResult<Self> {
        if self.ncols != other.nrows {
            return Err(CoreError::DimensionMismatch {
                expected: self.ncols,
                found: other.nrows,
            });
        }
        let mut t = Vec::new();
        let mut acc = vec![ZERO; other.ncols];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = vec![false; other.ncols];
        for r in 0..self.nrows {
            let (cols, vals) = self.row(r);
            for (&k, &a) in cols.iter().zip(vals) {
                let (cols2, vals2) = other.row(k);
                for (&c, &b) in cols2.iter().zip(vals2) {
                    if !mark[c] {
                        mark[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            for &c in &touched {
                t.push((r, c, acc[c]));
                acc[c] = ZERO;
                mark[c] = false;
            }
            touched.clear();
        }
        Self::from_triplets(self.nrows, other.ncols, t)
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (nr, nc) = (self.nrows * other.nrows, self.ncols * other.ncols);
        let mut t = Vec::with_capacity(self.nnz() * other.nnz());
        for (r1, c1, v1) in self.triplets() {
            for (r2, c2, v2) in other.triplets() {
                t.push((r1 * other.nrows + r2, c1 * other.ncols + c2, v1 * v2));
            }
        }
        Self::from_triplets(nr, nc, t).expect("Kronecker indices are in range")
    }

    /// `y = self * x`.
    pub fn matvec(&self, x: &[c64], y: &mut [c64]) {
        assert_eq!(x.len(), self.ncols, "matvec input length");
        assert_eq!(y.len(), self.nrows, "matvec output length");
        for (r, yr) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(r);
            *yr = cols.iter().zip(vals).map(|(&c, &v)| v * x[c]).sum();
        }
    }

    pub fn apply(&self, x: &[c64]) -> Vec<c64> {
        let mut y = vec![ZERO; self.nrows];
        self.matvec(x, &mut y);
        y
    }

    /// Restriction to the rows and columns listed in `keep` (in that order).
    pub fn submatrix(&self, keep: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.ncols.max(self.nrows)];
        for (k, &g) in keep.iter().enumerate() {
            pos[g] = k;
        }
        let mut t = Vec::new();
        for (k, &g) in keep.iter().enumerate() {
            let (cols, vals) = self.row(g);
            for (&c, &v) in cols.iter().zip(vals) {
                if pos[c] != usize::MAX {
                    t.push((k, pos[c], v));
                }
            }
        }
        Self::from_triplets(keep.len(), keep.len(), t).expect("restricted indices are in range")
    }

    /// Largest absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.nrows)
            .map(|r| self.row(r).1.iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_frobenius(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entry of `self - self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        self.triplets()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    fn check_same_shape(&self, other: &Self) -> CoreResult<()> {
        if self.nrows != other.nrows {
            return Err(CoreError::DimensionMismatch {
                expected: self.nrows,
                found: other.nrows,
            });
        }
        if self.ncols != other.ncols {
            return Err(CoreError::DimensionMismatch {
                expected: self.ncols,
                found: other.ncols,
            });
        }
        Ok(())
    }
}
