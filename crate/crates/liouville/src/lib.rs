//! Lindblad generators in vectorized form and the exact solvers built on
//! them: steady states, low-lying spectra, Liouvillian gaps and
//! density-matrix observables.
//!
//! Vectorization stacks columns, `vec(A X B) = (B^T ⊗ A) vec(X)`, so the
//! density-matrix entry `rho[i, j]` sits at index `i + d * j`.

pub mod arnoldi;
pub mod error;
pub mod observables;
pub mod spectrum;
pub mod steady;
pub mod superop;

pub use error::{LiouvilleError, LiouvilleResult};
pub use observables::{lobe_weights, observables, purity, tail_mass, DensityObservables};
pub use spectrum::{spectrum, SpectrumOptions, SpectrumResult, Strategy};
pub use steady::{steady_state, SolveMethod, SteadyState};
pub use superop::{vectorize, vectorize_with_budget, Superoperator};
