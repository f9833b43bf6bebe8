//! Special functions and numerical primitives: orthogonal polynomials,
//! spherical harmonics, cylinder Bessel functions, deterministic root
//! finding, Gaussian quadrature, and the two bound-state wavefunctions used
//! by the spectra module.

mod bessel;
mod harmonics;
mod hydrogen;
mod laguerre;
mod legendre;
mod nu;
pub mod quad;
mod roots;

pub use bessel::{
    bessel_i, bessel_j, bessel_j_prime, bessel_k, bessel_k_prime, bessel_k_scaled, bessel_zero,
};
pub use harmonics::spherical_harmonic;
pub use hydrogen::{hydrogen_radial, hydrogen_wavefunction, HydrogenParams};
pub use laguerre::assoc_laguerre;
pub use legendre::assoc_legendre;
pub use nu::{nu_wavefunction, NuWavefunction};
pub use roots::{find_root, RootBracket};

/// n! as an f64. Exact through 18!, correctly rounded well past that; the
/// crate only ever asks for small arguments.
pub fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}
