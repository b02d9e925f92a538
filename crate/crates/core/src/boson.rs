//! Truncated single-mode boson operators.

use faer::Mat;

use crate::error::{CoreError, CoreResult};
use crate::{c64, ZERO};

#[derive(Debug, Clone)]
pub struct BosonMatrices {
    pub cutoff: usize,
    pub a: Mat<c64>,
    pub a_dag: Mat<c64>,
}

impl BosonMatrices {
    /// Fock states `|0>, ..., |cutoff>` are retained.
    pub fn new(cutoff: usize) -> CoreResult<Self> {
        if cutoff == 0 {
            return Err(CoreError::InvalidArgument("boson cutoff must be at least 1".into()));
        }
        let dim = cutoff + 1;
        let a = Mat::<c64>::from_fn(dim, dim, |i, j| {
            if j == i + 1 {
                c64::new((j as f64).sqrt(), 0.0)
            } else {
                ZERO
            }
        });
        let a_dag = a.adjoint().to_owned();
        Ok(Self { cutoff, a, a_dag })
    }

    pub fn dim(&self) -> usize {
        self.cutoff + 1
    }

    pub fn number(&self) -> Mat<c64> {
        &self.a_dag * &self.a
    }
}
