//! Quantum systems in rotating frames: energy spectra for four potential
//! families, density-matrix evolution under active and passive rotation
//! prescriptions, and an operator-algebra criterion deciding when the two
//! prescriptions agree.
//!
//! Units: hbar = 1 throughout. Angular momenta are half-integers stored
//! exactly as twice-values (see [`HalfInt`]).

pub mod angmo;
pub mod batch;
mod error;
pub mod equivalence;
pub mod evolution;
mod half;
pub mod specfun;
pub mod spectra;

pub use error::Error;
pub use half::HalfInt;

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
