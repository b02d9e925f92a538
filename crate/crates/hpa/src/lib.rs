//! Large-spin (Holstein-Primakoff) description of the gain/loss chain.
//!
//! Around a polarized configuration every spin becomes a boson `c`, and the
//! master equation becomes quadratic. The steady state is then Gaussian and
//! fully characterized by its second moments, which follow from a Lyapunov
//! equation. Closed forms for occupations, magnetizations, correlation
//! lengths, purity and negativity are provided alongside that numerical
//! route so the two can be checked against each other.

pub mod closed;
pub mod error;
pub mod gaussian;
pub mod lattice;
pub mod phase;

pub use closed::{
    correlation_length, correlation_length_asymptote, correlation_ratio, cross_correlation_fm_up, magnetizations, negativity_closed,
    occupations_k, purity_closed, KOccupations, Magnetizations,
};
pub use error::{HpaError, HpaResult};
pub use gaussian::{CovarianceMatrix, LinearModes, Orientation};
pub use lattice::{bloch_moments, bloch_modes, cell_covariance, covariance, dimer_modes, evaluate_point, HpaPoint, K_GRID};
pub use phase::{classify_phase, phase_raster, region_components, Phase, PhaseLabel, Rates};
