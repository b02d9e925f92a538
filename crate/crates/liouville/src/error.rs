use spinlab_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LiouvilleError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("superoperator dimension {dim} exceeds budget {limit}")]
    Budget { dim: usize, limit: usize },
    #[error("factorization failed: {0}")]
    Factorization(String),
    #[error("steady state did not converge (residual {residual:.3e})")]
    NotConverged { residual: f64 },
    #[error("eigensolver failed: {0}")]
    Eigen(String),
    #[error("Arnoldi did not converge: {converged}/{wanted} Ritz values after {restarts} restarts (worst residual {worst_residual:.3e})")]
    Arnoldi {
        converged: usize,
        wanted: usize,
        restarts: usize,
        worst_residual: f64,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type LiouvilleResult<T> = Result<T, LiouvilleError>;
