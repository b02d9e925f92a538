//! Truncated Wigner approximation for the gain/loss chain.
//!
//! Each spin is written with two Schwinger bosons, `S^+ = a^dag b`,
//! `S^z = (a^dag a - b^dag b)/2`, and the master equation becomes a
//! Fokker-Planck equation for the Wigner function of the `4N` modes. Third
//! derivatives are dropped and the diffusion is truncated to its positive
//! part, which leaves a Langevin system for the c-number fields `(alpha,
//! beta)` of every spin.

pub mod analysis;
pub mod ensemble;
pub mod error;
pub mod sample;
pub mod sde;

pub use analysis::{correlation_fit, symmetry_restoration_time, CorrelationFit, RestorationTime};
pub use ensemble::{run_ensemble, trajectory_endpoint, CorrelatorPoint, InitialSpec, NoiseMode, ObservableSeries, Scheme, Stat, TwaConfig};
pub use error::{TwaError, TwaResult};
pub use sample::{coherent_amplitudes, sample_initial, Sampling};
pub use sde::{derive_sde, DriftKind, SchwingerField, SdeModel};
