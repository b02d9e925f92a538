//! Tensor-product spaces. Site 0 is the leftmost (most significant) factor.

use faer::Mat;

use crate::error::{CoreError, CoreResult};
use crate::sparse::SparseMatrix;
use crate::{c64, ZERO};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSpace {
    site_dims: Vec<usize>,
    total_dim: usize,
}

impl ProductSpace {
    pub fn new(site_dims: Vec<usize>) -> CoreResult<Self> {
        if site_dims.is_empty() || site_dims.contains(&0) {
            return Err(CoreError::InvalidArgument("site dimensions must be positive".into()));
        }
        let total_dim = site_dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| CoreError::InvalidArgument("total dimension overflows".into()))?;
        Ok(Self {
            site_dims,
            total_dim,
        })
    }

    pub fn uniform(n_sites: usize, dim: usize) -> CoreResult<Self> {
        Self::new(vec![dim; n_sites])
    }

    pub fn site_dims(&self) -> &[usize] {
        &self.site_dims
    }

    pub fn n_sites(&self) -> usize {
        self.site_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.total_dim
    }

    /// Product of the dimensions to the right of `site`.
    pub fn stride(&self, site: usize) -> usize {
        self.site_dims[site + 1..].iter().product()
    }

    /// Local basis index of `site` inside global basis index `index`.
    pub fn local_index(&self, index: usize, site: usize) -> usize {
        (index / self.stride(site)) % self.site_dims[site]
    }

    /// Local indices of every site for the global basis index `index`.
    pub fn digits(&self, index: usize) -> Vec<usize> {
        (0..self.n_sites()).map(|s| self.local_index(index, s)).collect()
    }

    /// `1 ⊗ ... ⊗ op ⊗ ... ⊗ 1` with `op` acting on `site`.
    pub fn embed(&self, op: &Mat<c64>, site: usize) -> CoreResult<SparseMatrix> {
        if site >= self.n_sites() {
            return Err(CoreError::InvalidArgument(format!(
                "site {site} outside a {}-site space",
                self.n_sites()
            )));
        }
        let d = self.site_dims[site];
        if op.nrows() != d || op.ncols() != d {
            return Err(CoreError::DimensionMismatch {
                expected: d,
                found: op.nrows().max(op.ncols()),
            });
        }
        let right = self.stride(site);
        let left = self.total_dim / (d * right);
        let mut local = Vec::new();
        for i in 0..d {
            for j in 0..d {
                if op[(i, j)] != ZERO {
                    local.push((i, j, op[(i, j)]));
                }
            }
        }
        let mut t = Vec::with_capacity(left * right * local.len());
        for l in 0..left {
            for &(i, j, v) in &local {
                for r in 0..right {
                    let row = (l * d + i) * right + r;
                    let col = (l * d + j) * right + r;
                    t.push((row, col, v));
                }
            }
        }
        SparseMatrix::from_triplets(self.total_dim, self.total_dim, t)
    }
}

/// Free-function form of [`ProductSpace::embed`].
pub fn embed(op: &Mat<c64>, site: usize, space: &ProductSpace) -> CoreResult<SparseMatrix> {
    space.embed(op, site)
}
