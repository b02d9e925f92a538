//! Site-factorized mean-field equations and cluster mean-field (CMF)
//! dynamics for the gain/loss chain.

pub mod cmf;
pub mod error;
pub mod mf;
pub mod ode;

pub use cmf::{cmf_bistability, cmf_solve, Bias, CmfReport, CmfSpec};
pub use error::{MeanFieldError, MeanFieldResult};
pub use mf::{integrate_mf, jacobian, mf_rhs, MfOptions, MfParams, MfState, MfTrajectory, SteadyKind};
