use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HpaError {
    #[error("outside the stability region: {0}")]
    Domain(String),
    #[error("drift matrix is not Hurwitz (largest real part {max_re:.3e})")]
    NotHurwitz { max_re: f64 },
    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

pub type HpaResult<T> = Result<T, HpaError>;
