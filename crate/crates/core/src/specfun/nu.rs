//! Bound states of radial equations with combined 1/r and 1/r^2 terms.
//!
//! For the reduced radial factor chi = r R satisfying
//!
//! ```text
//! chi'' + (-h0 + h1 / r + h2 / r^2) chi = 0,
//! ```
//!
//! the n-th bound solution has a Rodrigues form in the inverse coordinate
//! x = 1/r:
//!
//! ```text
//! chi = B x^u exp(sqrt(h0) / x) d^n/dx^n [ x^(2n - 2u) exp(-2 sqrt(h0) / x) ],
//! ```
//!
//! with u = h1 / (2 sqrt(h0)). Each application of d/dx maps a term
//! c x^e exp(-2 sqrt(h0) / x) to c e x^(e-1) + 2 sqrt(h0) c x^(e-2), so the
//! derivative expands symbolically and chi collapses to exp(-sqrt(h0) r)
//! times a finite sum of powers r^(u - n + j), j = 0..=n. Substituting that
//! sum back into the equation fixes h2 = -(u - n)(u - n - 1) and closes the
//! power ladder automatically, which is exactly the quantization relation
//! between h0, h1, n, and the angular sector; callers supply coefficients
//! already satisfying it. The angular factor is the matching associated
//! Legendre function with the usual alternating-sign phase.

use std::f64::consts::PI;

use super::legendre::assoc_legendre;
use super::quad::integrate_composite;
use crate::{Error, Result};

/// A normalized bound state, precomputed once and evaluated many times.
///
/// Normalization makes the square integral of the wavefunction against
/// r^2 sin(theta) dr dtheta dphi equal to 1, with the sign fixed so the
/// radial factor is positive near the origin.
#[derive(Debug, Clone)]
pub struct NuWavefunction {
    decay: f64,
    u: f64,
    n: u32,
    l: u32,
    m: u32,
    coef: Vec<f64>,
    amplitude: f64,
}

impl NuWavefunction {
    pub fn new(h0: f64, h1: f64, n: u32, l: u32, m: u32) -> Result<Self> {
        if !h0.is_finite() || !h1.is_finite() {
            return Err(Error::invalid_argument(format!(
                "radial coefficients must be finite, got h0 = {h0}, h1 = {h1}"
            )));
        }
        if h0 <= 0.0 {
            return Err(Error::no_bound_state(format!(
                "no exponential decay: h0 must be positive, got {h0}"
            )));
        }
        if n > 20 {
            return Err(Error::invalid_argument(format!(
                "radial excitation is capped at 20, got {n}"
            )));
        }
        if l > 30 || m > l {
            return Err(Error::invalid_argument(format!(
                "angular labels must satisfy m <= l <= 30, got l = {l}, m = {m}"
            )));
        }
        let decay = h0.sqrt();
        let u = h1 / (2.0 * decay);
        let exponent = u - f64::from(n);
        if exponent <= -0.5 {
            return Err(Error::NonNormalizable { exponent });
        }

        // Expand d^n/dx^n of x^beta exp(-c/x) term by term.
        let beta = 2.0 * f64::from(n) - 2.0 * u;
        let c = 2.0 * decay;
        let mut coef = vec![1.0_f64];
        for k in 0..n {
            let mut next = vec![0.0; coef.len() + 1];
            for (j, &cj) in coef.iter().enumerate() {
                let e = beta - f64::from(k) - j as f64;
                next[j] += e * cj;
                next[j + 1] += c * cj;
            }
            coef = next;
        }
        if let Some(&lead) = coef.iter().find(|v| **v != 0.0) {
            if lead < 0.0 {
                for v in &mut coef {
                    *v = -*v;
                }
            }
        }

        let mut state = NuWavefunction { decay, u, n, l, m, coef, amplitude: 1.0 };

        // Radial norm by composite quadrature out to where the tail is gone,
        // times the closed-form angular integral of the Legendre factor.
        let rmax = (25.0 + 2.0 * u + 2.0 * f64::from(n)) / decay;
        let radial = integrate_composite(
            |r| {
                let chi = state.reduced_radial(r);
                chi * chi
            },
            0.0,
            rmax,
            64,
            24,
        )?;
        let mut ratio = 1.0;
        for k in (l - m + 1)..=(l + m) {
            ratio *= f64::from(k);
        }
        let angular = 2.0 * PI * 2.0 * ratio / f64::from(2 * l + 1);
        state.amplitude = 1.0 / (radial * angular).sqrt();
        Ok(state)
    }

    /// chi(r) = r R(r) without normalization.
    fn reduced_radial(&self, r: f64) -> f64 {
        let mut sum = 0.0;
        for (j, &cj) in self.coef.iter().enumerate() {
            sum += cj * r.powf(self.u - f64::from(self.n) + j as f64);
        }
        sum * (-self.decay * r).exp()
    }

    /// Wavefunction value at (r, theta). Real by construction: the azimuthal
    /// phase is dropped and only its modulus convention (the alternating
    /// sign) is kept.
    pub fn evaluate(&self, r: f64, theta: f64) -> Result<f64> {
        if !r.is_finite() || r <= 0.0 {
            return Err(Error::invalid_argument(format!(
                "radius must be finite and positive, got {r}"
            )));
        }
        if !theta.is_finite() {
            return Err(Error::invalid_argument("polar angle must be finite"));
        }
        let sign = if self.m % 2 == 1 { -1.0 } else { 1.0 };
        let angular = sign * assoc_legendre(self.l, self.m, theta.cos())?;
        Ok(self.amplitude * self.reduced_radial(r) / r * angular)
    }
}

/// One-shot evaluation; for grids, build [`NuWavefunction`] once instead.
pub fn nu_wavefunction(
    h0: f64,
    h1: f64,
    n: u32,
    l: u32,
    m: u32,
    r: f64,
    theta: f64,
) -> Result<f64> {
    NuWavefunction::new(h0, h1, n, l, m)?.evaluate(r, theta)
}
