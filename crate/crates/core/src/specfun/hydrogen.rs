//! Hydrogen-like bound states, used as the reference shape for the
//! parametric radial solver at zero field strength.
//!
//! With hbar = 1 the length scale is 1/(mass * alpha) and the radial factor
//! is rho^l exp(-rho/2) L_{n-l-1}^{2l+1}(rho) with rho = 2 r / (n a). The
//! normalization constant is evaluated by Gauss-Laguerre quadrature: the
//! integrand is a polynomial times the Laguerre weight, so the rule is exact
//! for every order this module accepts.

use num_complex::Complex;

use super::harmonics::spherical_harmonic;
use super::laguerre::assoc_laguerre;
use super::quad::gauss_laguerre;
use crate::{Error, Result};

/// Coupling and mass for an attractive 1/r potential.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HydrogenParams {
    /// Coulomb strength (product of the charge magnitudes), > 0.
    pub alpha: f64,
    /// Mass of the orbiting particle, > 0.
    pub mass: f64,
}

impl HydrogenParams {
    /// Build from the two charges: the strength is |q_orbiting * q_center|.
    /// Zero charge on either side leaves no bound problem and is rejected.
    pub fn from_charges(q_orbiting: f64, q_center: f64, mass: f64) -> Result<Self> {
        if !q_orbiting.is_finite() || !q_center.is_finite() {
            return Err(Error::invalid_argument("charges must be finite"));
        }
        let params = Self { alpha: (q_orbiting * q_center).abs(), mass };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(Error::invalid_argument(format!(
                "Coulomb strength must be positive and finite, got {}",
                self.alpha
            )));
        }
        if !self.mass.is_finite() || self.mass <= 0.0 {
            return Err(Error::invalid_argument(format!(
                "mass must be positive and finite, got {}",
                self.mass
            )));
        }
        Ok(())
    }

    /// Length scale 1/(mass * alpha).
    pub fn bohr_radius(&self) -> Result<f64> {
        self.validate()?;
        Ok(1.0 / (self.mass * self.alpha))
    }
}

fn check_quantum_numbers(n: u32, l: u32) -> Result<()> {
    if n == 0 || n > 30 {
        return Err(Error::invalid_argument(format!(
            "principal quantum number must lie in 1..=30, got {n}"
        )));
    }
    if l >= n {
        return Err(Error::invalid_argument(format!(
            "orbital quantum number must satisfy l < n, got l = {l}, n = {n}"
        )));
    }
    Ok(())
}

/// Radial factor R_{n l}(r), normalized so that the integral of R^2 r^2 dr
/// over [0, inf) is 1 and R is positive near the origin.
pub fn hydrogen_radial(params: &HydrogenParams, n: u32, l: u32, r: f64) -> Result<f64> {
    check_quantum_numbers(n, l)?;
    if !r.is_finite() || r < 0.0 {
        return Err(Error::invalid_argument(format!(
            "radius must be finite and nonnegative, got {r}"
        )));
    }
    let a = params.bohr_radius()?;
    let na = f64::from(n) * a;
    let k = n - l - 1;
    let upper = f64::from(2 * l + 1);

    let (nodes, weights) = gauss_laguerre(64)?;
    let mut norm = 0.0;
    for (x, w) in nodes.iter().zip(&weights) {
        let lag = assoc_laguerre(k, upper, *x)?;
        norm += w * x.powi(2 * l as i32 + 2) * lag * lag;
    }
    norm *= (na / 2.0).powi(3);

    let rho = 2.0 * r / na;
    let shape = rho.powi(l as i32) * (-rho / 2.0).exp() * assoc_laguerre(k, upper, rho)?;
    Ok(shape / norm.sqrt())
}

/// Full bound state psi_{n l m} = R_{n l}(r) Y_l^m(theta, phi).
pub fn hydrogen_wavefunction(
    params: &HydrogenParams,
    n: u32,
    l: u32,
    m: i32,
    r: f64,
    theta: f64,
    phi: f64,
) -> Result<Complex<f64>> {
    check_quantum_numbers(n, l)?;
    if m.unsigned_abs() > l {
        return Err(Error::invalid_argument(format!(
            "magnetic quantum number must satisfy |m| <= l, got m = {m}, l = {l}"
        )));
    }
    let radial = hydrogen_radial(params, n, l, r)?;
    Ok(spherical_harmonic(l, m, theta, phi)? * radial)
}
