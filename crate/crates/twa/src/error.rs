use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TwaError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{excluded} of {total} trajectories diverged (budget 1%); reduce dt")]
    Unstable { excluded: usize, total: usize },
    #[error("exponential fit rejected: R^2 = {r2:.3} over {points} separations")]
    FitQuality { r2: f64, points: usize },
    #[error("not enough data: {0}")]
    InsufficientData(String),
}

pub type TwaResult<T> = Result<T, TwaError>;
