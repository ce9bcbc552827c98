//! Numerical core for BCS pairing in the continuum: finite-temperature
//! two-body kernels, the Birman-Schwinger critical temperature of the
//! translation-invariant problem, and the weak-coupling criterion for
//! enhanced pairing at a three-dimensional half-space boundary.

pub mod quad;
pub mod error;
pub mod boundary3d;
pub mod diagnostics;
pub mod bs_solver;
pub mod kernels;
pub mod potentials;
pub mod special;

pub use error::{Error, Result};
pub use potentials::RadialPotential;
pub use special::Dimension;
