use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeanFieldError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("step size underflow at t = {t:.6e} (h = {h:.3e}); the system is too stiff for the explicit integrator")]
    Stiffness { t: f64, h: f64 },
    #[error("self-consistency did not converge after {windows} windows (last change {amplitude:.3e})")]
    NotConverged { windows: usize, amplitude: f64 },
    #[error(transparent)]
    Core(#[from] spinlab_core::CoreError),
}

pub type MeanFieldResult<T> = Result<T, MeanFieldError>;
