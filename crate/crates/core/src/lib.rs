//! Building blocks shared by every solver in the workspace: finite spin and
//! boson operator matrices, tensor-product embeddings, a compressed sparse
//! complex matrix, and the model constructors for the gain/loss spin chain
//! and the driven Kerr oscillator.

pub mod boson;
pub mod error;
pub mod models;
pub mod space;
pub mod sparse;
pub mod spin;

pub use faer::c64;
pub use faer::Mat;

pub use error::{CoreError, CoreResult};
pub use models::{Boundary, ChainSpec, KerrSpec, ModelOperators};
pub use space::ProductSpace;
pub use sparse::SparseMatrix;
pub use spin::SpinMatrices;

/// Complex zero.
pub const ZERO: c64 = c64 { re: 0.0, im: 0.0 };
/// Complex one.
pub const ONE: c64 = c64 { re: 1.0, im: 0.0 };
/// Imaginary unit.
pub const I: c64 = c64 { re: 0.0, im: 1.0 };
