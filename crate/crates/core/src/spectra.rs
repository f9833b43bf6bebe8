//! Energy spectra of the four rotating-potential families, plus the
//! finite-difference radial eigensolver used as an independent oracle.
//!
//! All energies are in natural units (hbar = 1). Rotation about z enters
//! every family as an additive shift: E(omega) - E(0) = -M * omega_z, with
//! the magnetic family absorbing one extra uniform-field term into its
//! effective rate omega_eff = omega_z + gamma q Omega1 / (2 m).

use crate::angmo::CoupledLabel;
use crate::batch::{map_batch, map_indices};
use crate::specfun::{
    bessel_j, bessel_j_prime, bessel_k_scaled, bessel_zero, find_root, HydrogenParams, RootBracket,
};
use crate::{Error, HalfInt, Result};

/// Which of the four potential families an entry belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum PotentialFamily {
    Coulomb,
    MagneticCoulomb,
    CylindricalWell,
    CoulombWell,
}

impl std::fmt::Display for PotentialFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PotentialFamily::Coulomb => "coulomb",
            PotentialFamily::MagneticCoulomb => "magnetic-coulomb",
            PotentialFamily::CylindricalWell => "cylindrical-well",
            PotentialFamily::CoulombWell => "coulomb-well",
        })
    }
}

/// Rotation speed class of a cylindrical well; checked against R*omega at
/// use time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum WellRegime {
    Slow,
    Rapid,
}

/// Injected mapping from rotation rate to the planar principal number n'.
/// The identity ignores omega; a schedule replaces n' wholesale once |omega|
/// passes each step's threshold.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum NPrimeMap {
    #[default]
    Identity,
    Schedule {
        steps: Vec<ScheduleStep>,
    },
}

/// One schedule step: once |omega| >= min_speed, use this n'.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScheduleStep {
    pub min_speed: f64,
    pub n_prime: u32,
}

impl NPrimeMap {
    pub fn validate(&self) -> Result<()> {
        if let NPrimeMap::Schedule { steps } = self {
            let mut prev = -1.0;
            for step in steps {
                if !step.min_speed.is_finite() || step.min_speed < 0.0 {
                    return Err(Error::invalid_argument(format!(
                        "schedule threshold must be finite and nonnegative, got {}",
                        step.min_speed
                    )));
                }
                if step.min_speed <= prev {
                    return Err(Error::invalid_argument(
                        "schedule thresholds must strictly increase",
                    ));
                }
                if step.n_prime == 0 {
                    return Err(Error::invalid_argument("schedule n' starts at 1"));
                }
                prev = step.min_speed;
            }
        }
        Ok(())
    }

    /// The n' in force at rotation rate `omega_z`, falling back to `base`
    /// below every threshold.
    pub fn resolve(&self, base: u32, omega_z: f64) -> u32 {
        match self {
            NPrimeMap::Identity => base,
            NPrimeMap::Schedule { steps } => steps
                .iter()
                .filter(|s| s.min_speed <= omega_z.abs())
                .next_back()
                .map_or(base, |s| s.n_prime),
        }
    }
}

/// Coulomb center dressed with a uniform-plus-gradient magnetic profile
/// Omega1 + Omega2/r + Omega3/r^2 coupled through gamma * q.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MagneticParams {
    pub alpha: f64,
    pub mass: f64,
    pub gamma: f64,
    pub q: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub omega3: f64,
}

impl MagneticParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha", self.alpha),
            ("mass", self.mass),
            ("gamma", self.gamma),
            ("q", self.q),
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("omega3", self.omega3),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid_argument(format!("{name} must be finite")));
            }
        }
        if self.alpha <= 0.0 || self.mass <= 0.0 {
            return Err(Error::invalid_argument(
                "alpha and mass must be positive in the magnetic family",
            ));
        }
        Ok(())
    }

    /// gamma * q / (2 m), the factor multiplying M_j Omega_i everywhere.
    pub fn field_coupling(&self) -> f64 {
        self.gamma * self.q / (2.0 * self.mass)
    }
}

/// Finite cylindrical well of depth U0 and radius R with axial wavenumber
/// k_z, rotating about its axis.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WellParams {
    pub radius: f64,
    pub depth: f64,
    pub mass: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub k_z: f64,
    pub regime: WellRegime,
}

impl WellParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::invalid_argument(format!(
                "well radius must be positive and finite, got {}",
                self.radius
            )));
        }
        if !(self.depth.is_finite() && self.depth > 0.0) {
            return Err(Error::invalid_argument(format!(
                "well depth must be positive and finite, got {}",
                self.depth
            )));
        }
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::invalid_argument(format!(
                "mass must be positive and finite, got {}",
                self.mass
            )));
        }
        if !self.k_z.is_finite() {
            return Err(Error::invalid_argument("k_z must be finite"));
        }
        Ok(())
    }
}

/// Planar Coulomb problem confined to a rotating well, quantized by
/// half-odd principal numbers n' - 1/2.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CoulombWellParams {
    pub alpha: f64,
    pub mass: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub nprime_map: NPrimeMap,
}

impl CoulombWellParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) || !(self.mass.is_finite() && self.mass > 0.0)
        {
            return Err(Error::invalid_argument(
                "alpha and mass must be positive and finite",
            ));
        }
        self.nprime_map.validate()
    }
}

/// Tagged union over the four families.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "family", rename_all = "kebab-case"))]
pub enum PotentialSpec {
    Coulomb(HydrogenParams),
    MagneticCoulomb(MagneticParams),
    CylindricalWell(WellParams),
    CoulombWell(CoulombWellParams),
}

impl PotentialSpec {
    pub fn family(&self) -> PotentialFamily {
        match self {
            PotentialSpec::Coulomb(_) => PotentialFamily::Coulomb,
            PotentialSpec::MagneticCoulomb(_) => PotentialFamily::MagneticCoulomb,
            PotentialSpec::CylindricalWell(_) => PotentialFamily::CylindricalWell,
            PotentialSpec::CoulombWell(_) => PotentialFamily::CoulombWell,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PotentialSpec::Coulomb(p) => p.validate(),
            PotentialSpec::MagneticCoulomb(p) => p.validate(),
            PotentialSpec::CylindricalWell(p) => p.validate(),
            PotentialSpec::CoulombWell(p) => p.validate(),
        }
    }
}

/// Which frame the comparison treats as rotated; flips the sign convention
/// used when dynamical evolutions are matched against each other.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Convention {
    #[default]
    ActiveFrame,
    PassiveFrame,
}

/// Rotation about z at a constant rate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RotationSpec {
    pub omega_z: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub convention: Convention,
}

impl RotationSpec {
    pub fn validate(&self) -> Result<()> {
        if !self.omega_z.is_finite() {
            return Err(Error::invalid_argument("omega_z must be finite"));
        }
        Ok(())
    }
}

/// Coefficients of the reduced radial equation
/// chi'' + (-H0 + H1/r + H2/r^2) chi = 0; bound states need H0 > 0.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NUCoefficients {
    pub h0: f64,
    pub h1: f64,
    pub h2: f64,
}

/// Family-specific derived quantities worth reporting next to the energy.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "kebab-case"))]
pub enum SpectralDetail {
    Plain,
    Magnetic {
        coefficients: NUCoefficients,
        discriminant: f64,
    },
    SlowWell {
        /// Interior matching root y = q R, the n-th crossing of the
        /// boundary-condition mismatch.
        matching_root: f64,
        /// Exterior decay constant sqrt(2 m U0 - q^2).
        kappa: f64,
        /// Rim speed R * omega_z.
        lambda: f64,
    },
    RapidWell {
        bessel_zero: f64,
    },
    CoulombWell {
        /// n' actually used after the omega mapping.
        n_prime: u32,
    },
}

/// One labelled eigenvalue.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpectrumEntry {
    pub family: PotentialFamily,
    pub label: CoupledLabel,
    /// Secondary index where the family needs one: radial excitation count
    /// for the magnetic family, resolved n' for the Coulomb-in-well family,
    /// 0 otherwise.
    pub extra_index: u32,
    pub k_z: f64,
    pub omega_z: f64,
    /// The rate at which rotation shifts this family's levels per unit M.
    pub omega_eff: f64,
    pub energy: f64,
    pub detail: SpectralDetail,
}

impl SpectrumEntry {
    /// Energy with the rotational shift removed: E + M * omega_eff. Equal
    /// across an M-multiplet exactly when rotation commutes with the rest of
    /// the Hamiltonian.
    pub fn stripped_energy(&self) -> f64 {
        self.energy + self.label.m.as_f64() * self.omega_eff
    }
}

/// E = -alpha^2 m / (2 n^2) - omega_z M for a rotating Coulomb potential.
pub fn coulomb_energy(
    p: &HydrogenParams,
    label: &CoupledLabel,
    rot: &RotationSpec,
) -> Result<SpectrumEntry> {
    p.validate()?;
    rot.validate()?;
    label.validate()?;
    if label.l >= label.n {
        return Err(Error::invalid_argument(format!(
            "Coulomb family needs l < n, got l = {}, n = {}",
            label.l, label.n
        )));
    }
    let nf = f64::from(label.n);
    let energy = -p.alpha * p.alpha * p.mass / (2.0 * nf * nf) - rot.omega_z * label.m.as_f64();
    Ok(SpectrumEntry {
        family: PotentialFamily::Coulomb,
        label: *label,
        extra_index: 0,
        k_z: 0.0,
        omega_z: rot.omega_z,
        omega_eff: rot.omega_z,
        energy,
        detail: SpectralDetail::Plain,
    })
}

/// Reduced-equation coefficients for the magnetic family at energy `energy`.
pub fn magnetic_nu_coeffs(
    p: &MagneticParams,
    m_j: HalfInt,
    l: u32,
    rot: &RotationSpec,
    energy: f64,
) -> Result<NUCoefficients> {
    p.validate()?;
    rot.validate()?;
    if !energy.is_finite() {
        return Err(Error::invalid_argument("energy must be finite"));
    }
    let coup = p.field_coupling();
    let mj = m_j.as_f64();
    let lf = f64::from(l);
    Ok(NUCoefficients {
        h0: -2.0 * p.mass * (rot.omega_z * mj + coup * mj * p.omega1 + energy),
        h1: 2.0 * p.mass * (p.alpha + coup * mj * p.omega2),
        h2: p.gamma * p.q * mj * p.omega3 - lf * (lf + 1.0),
    })
}

/// Bound-state energy of the magnetic family: the squared-term binding plus
/// the rotational/uniform-field shift. `n_radial` counts radial excitations
/// from 0; the label's principal number is n_radial + l + 1.
pub fn magnetic_nu_energy(
    p: &MagneticParams,
    n_radial: u32,
    l: u32,
    s: HalfInt,
    j: HalfInt,
    m_j: HalfInt,
    rot: &RotationSpec,
) -> Result<SpectrumEntry> {
    p.validate()?;
    rot.validate()?;
    let label = CoupledLabel { n: n_radial + l + 1, l, s, j, m: m_j };
    label.validate()?;
    let coup = p.field_coupling();
    let mj = m_j.as_f64();
    let lf = f64::from(l);
    let discriminant = 1.0 - 4.0 * (p.gamma * p.q * mj * p.omega3 - lf * (lf + 1.0));
    if discriminant < 0.0 {
        return Err(Error::NoQuantizedSolution { discriminant });
    }
    let denom = 1.0 + 2.0 * f64::from(n_radial) + discriminant.sqrt();
    let numer = p.alpha + coup * mj * p.omega2;
    let omega_eff = rot.omega_z + coup * p.omega1;
    let energy = -2.0 * p.mass * (numer / denom) * (numer / denom) - mj * omega_eff;
    let coefficients = magnetic_nu_coeffs(p, m_j, l, rot, energy)?;
    Ok(SpectrumEntry {
        family: PotentialFamily::MagneticCoulomb,
        label,
        extra_index: n_radial,
        k_z: 0.0,
        omega_z: rot.omega_z,
        omega_eff,
        energy,
        detail: SpectralDetail::Magnetic { coefficients, discriminant },
    })
}

/// Integer-M labels for the well families: the spinless embedding puts
/// l = J = |M|.
fn well_label(m_angular: i32, radial: u32) -> Result<CoupledLabel> {
    if m_angular.unsigned_abs() > 40 {
        return Err(Error::invalid_argument(format!(
            "well families support |M| <= 40, got {m_angular}"
        )));
    }
    let l = m_angular.unsigned_abs();
    let label = CoupledLabel {
        n: radial,
        l,
        s: HalfInt::from_int(0),
        j: HalfInt::from_int(l as i32),
        m: HalfInt::from_int(m_angular),
    };
    label.validate()?;
    Ok(label)
}

/// Boundary-condition mismatch at the well edge: interior Bessel
/// log-derivative minus exterior decaying log-derivative, as a function of
/// the interior root variable y = q R. Bound states are its zeros.
fn matching_mismatch(p: &WellParams, m: u32, y: f64) -> Result<f64> {
    let q = y / p.radius;
    let kappa = (2.0 * p.mass * p.depth - q * q).sqrt();
    let z = kappa * p.radius;
    let interior = q * bessel_j_prime(m, y)? / bessel_j(m, y)?;
    // K'_m/K_m from exponentially scaled K values, valid at any depth.
    let km1 = bessel_k_scaled(if m == 0 { 1 } else { m - 1 }, z)?;
    let kp1 = bessel_k_scaled(m + 1, z)?;
    let km = bessel_k_scaled(m, z)?;
    let exterior = -kappa * (km1 + kp1) / (2.0 * km);
    Ok(interior - exterior)
}

/// The n-th interior matching root y_n = q_n R, bracketed between
/// consecutive zeros of J_M and clipped to the binding window
/// q^2 < 2 m U0 - k_z^2.
fn slow_matching_root(p: &WellParams, m: u32, n: u32) -> Result<f64> {
    let q_max_sq = 2.0 * p.mass * p.depth - p.k_z * p.k_z;
    if q_max_sq <= 0.0 {
        return Err(Error::no_bound_state(format!(
            "axial motion k_z = {} exhausts the well depth {}",
            p.k_z, p.depth
        )));
    }
    let y_max = q_max_sq.sqrt() * p.radius;
    let left = if n == 1 { 0.0 } else { bessel_zero(m, n - 1)? };
    if left >= y_max {
        return Err(Error::no_bound_state(format!(
            "no bound state {n} for |M| = {m}: the well holds fewer radial modes"
        )));
    }
    let right = bessel_zero(m, n)?.min(y_max);
    let pad = (right - left) * 1e-6;
    let (lo, hi) = (left + pad, right - pad);
    let g_lo = matching_mismatch(p, m, lo)?;
    let g_hi = matching_mismatch(p, m, hi)?;
    if g_lo.signum() == g_hi.signum() {
        return Err(Error::no_bound_state(format!(
            "no bound state {n} for |M| = {m}: no matching crossing inside the binding window"
        )));
    }
    find_root(
        |y| matching_mismatch(p, m, y).unwrap_or(f64::NAN),
        RootBracket::new(lo, hi)?,
        1e-12,
    )
}

/// Slowly rotating well: E = (q_n^2 + k_z^2)/(2m) - U0 - M omega_z with q_n
/// the n-th matching root. Equivalently -kappa^2/(2m) - M omega_z R / R
/// + k_z^2/(2m) through q^2 + kappa^2 = 2 m U0. Returned states satisfy
/// E + M omega_z < 0.
pub fn well_slow_energy(
    p: &WellParams,
    m_angular: i32,
    n: u32,
    rot: &RotationSpec,
) -> Result<SpectrumEntry> {
    p.validate()?;
    rot.validate()?;
    if p.regime != WellRegime::Slow {
        return Err(Error::invalid_argument(
            "well_slow_energy needs a slow-regime well",
        ));
    }
    let lambda = p.radius * rot.omega_z;
    if lambda.abs() >= 1.0 {
        return Err(Error::invalid_argument(format!(
            "slow regime requires |R omega| < 1, got {lambda}"
        )));
    }
    let label = well_label(m_angular, n)?;
    let y = slow_matching_root(p, m_angular.unsigned_abs(), n)?;
    let q = y / p.radius;
    let kappa = (2.0 * p.mass * p.depth - q * q).sqrt();
    let stripped = (q * q + p.k_z * p.k_z) / (2.0 * p.mass) - p.depth;
    let energy = stripped - f64::from(m_angular) * rot.omega_z;
    Ok(SpectrumEntry {
        family: PotentialFamily::CylindricalWell,
        label,
        extra_index: 0,
        k_z: p.k_z,
        omega_z: rot.omega_z,
        omega_eff: rot.omega_z,
        energy,
        detail: SpectralDetail::SlowWell { matching_root: y, kappa, lambda },
    })
}

/// Rapidly rotating well: confinement at the rotational radius 1/omega puts
/// the levels at the Bessel zeros,
/// E = (omega^2 x_{Ma}^2 + k_z^2)/(2m) - U0 - M omega_z.
pub fn well_rapid_energy(
    p: &WellParams,
    m_angular: i32,
    a: u32,
    rot: &RotationSpec,
) -> Result<SpectrumEntry> {
    p.validate()?;
    rot.validate()?;
    if p.regime != WellRegime::Rapid {
        return Err(Error::invalid_argument(
            "well_rapid_energy needs a rapid-regime well",
        ));
    }
    let lambda = p.radius * rot.omega_z;
    if lambda.abs() <= 1.0 {
        return Err(Error::invalid_argument(format!(
            "rapid regime requires |R omega| > 1, got {lambda}"
        )));
    }
    let label = well_label(m_angular, a)?;
    let x = bessel_zero(m_angular.unsigned_abs(), a)?;
    let energy = (rot.omega_z * rot.omega_z * x * x + p.k_z * p.k_z) / (2.0 * p.mass)
        - p.depth
        - f64::from(m_angular) * rot.omega_z;
    Ok(SpectrumEntry {
        family: PotentialFamily::CylindricalWell,
        label,
        extra_index: 0,
        k_z: p.k_z,
        omega_z: rot.omega_z,
        omega_eff: rot.omega_z,
        energy,
        detail: SpectralDetail::RapidWell { bessel_zero: x },
    })
}

/// Planar Coulomb levels in a rotating well:
/// E = -alpha^2 m / (2 (n' - 1/2)^2) - M omega_z, with n' resolved through
/// the injected omega mapping and |M| <= n' - 1.
pub fn coulomb_well_energy(
    p: &CoulombWellParams,
    n_prime: u32,
    m_angular: i32,
    rot: &RotationSpec,
) -> Result<SpectrumEntry> {
    p.validate()?;
    rot.validate()?;
    if n_prime == 0 {
        return Err(Error::invalid_argument("n' starts at 1"));
    }
    let resolved = p.nprime_map.resolve(n_prime, rot.omega_z);
    if m_angular.unsigned_abs() > resolved - 1 {
        return Err(Error::invalid_argument(format!(
            "planar Coulomb tower n' = {resolved} only reaches |M| <= {}, got M = {m_angular}",
            resolved - 1
        )));
    }
    let label = well_label(m_angular, n_prime)?;
    let half_shift = f64::from(resolved) - 0.5;
    let energy = -p.alpha * p.alpha * p.mass / (2.0 * half_shift * half_shift)
        - f64::from(m_angular) * rot.omega_z;
    Ok(SpectrumEntry {
        family: PotentialFamily::CoulombWell,
        label,
        extra_index: resolved,
        k_z: 0.0,
        omega_z: rot.omega_z,
        omega_eff: rot.omega_z,
        energy,
        detail: SpectralDetail::CoulombWell { n_prime: resolved },
    })
}

fn integer_m(label: &CoupledLabel) -> Result<i32> {
    if !label.m.is_integer() || label.s != HalfInt::from_int(0) {
        return Err(Error::basis_mismatch(format!(
            "well families use integer M with zero spin, got M = {}, s = {}",
            label.m, label.s
        )));
    }
    let m = label.m.twice() / 2;
    if label.l != m.unsigned_abs() || label.j != HalfInt::from_int(label.l as i32) {
        return Err(Error::basis_mismatch(format!(
            "well labels embed M as l = J = |M|, got l = {}, J = {}, M = {}",
            label.l, label.j, label.m
        )));
    }
    Ok(m)
}

fn one_entry(
    potential: &PotentialSpec,
    label: &CoupledLabel,
    rot: &RotationSpec,
) -> Result<SpectrumEntry> {
    match potential {
        PotentialSpec::Coulomb(p) => coulomb_energy(p, label, rot),
        PotentialSpec::MagneticCoulomb(p) => {
            let n_radial = label.n.checked_sub(label.l + 1).ok_or_else(|| {
                Error::invalid_argument(format!(
                    "magnetic family needs n >= l + 1, got n = {}, l = {}",
                    label.n, label.l
                ))
            })?;
            magnetic_nu_energy(p, n_radial, label.l, label.s, label.j, label.m, rot)
        }
        PotentialSpec::CylindricalWell(p) => {
            let m_ang = integer_m(label)?;
            match p.regime {
                WellRegime::Slow => well_slow_energy(p, m_ang, label.n, rot),
                WellRegime::Rapid => well_rapid_energy(p, m_ang, label.n, rot),
            }
        }
        PotentialSpec::CoulombWell(p) => {
            let m_ang = integer_m(label)?;
            coulomb_well_energy(p, label.n, m_ang, rot)
        }
    }
}

/// Energy for every label in one batch; label interpretation is
/// family-specific (principal number, radial mode count, or n').
pub fn assign_spectrum(
    potential: &PotentialSpec,
    labels: &[CoupledLabel],
    rot: &RotationSpec,
) -> Result<Vec<SpectrumEntry>> {
    potential.validate()?;
    rot.validate()?;
    map_batch(labels, |label| one_entry(potential, label, rot))
        .into_iter()
        .collect()
}

/// Radial geometry of the oracle eigensolver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    /// Reduced 3D operator -(1/2m) chi'' + V_eff chi on (0, r_max); any
    /// centrifugal term belongs in V_eff.
    Spherical,
    /// Reduced 2D operator with the (M^2 - 1/4)/(2 m r^2) centrifugal term
    /// supplied internally.
    Cylindrical { m_angular: i32 },
}

/// Oracle output: Richardson-extrapolated eigenvalues plus the raw drift
/// between the two grids that produced them.
#[derive(Debug, Clone)]
pub struct FdOutcome {
    pub eigenvalues: Vec<f64>,
    /// |E_fine - E_coarse| per eigenvalue.
    pub drift: Vec<f64>,
    /// True when any drift exceeded the caller's tolerance: the grid is too
    /// coarse for the requested accuracy.
    pub accuracy_warning: bool,
}

/// Assembles the symmetric tridiagonal discretization. Spherical geometry
/// uses interior nodes r_i = i h with Dirichlet values pinned at 0 and
/// r_max. Cylindrical geometry uses a cell-centered flux form of the same
/// reduced operator (the 1/4 shift is carried by the cell weights), which
/// keeps second-order convergence through the r^(1/2) behaviour at the axis;
/// its outer boundary condition is Dirichlet at the last face.
fn assemble<V: Fn(f64) -> f64>(
    v_eff: &V,
    mass: f64,
    geometry: Geometry,
    r_max: f64,
    n: usize,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = r_max / n as f64;
    let sample = |r: f64| -> Result<f64> {
        let v = v_eff(r);
        if !v.is_finite() {
            return Err(Error::invalid_argument(format!(
                "potential evaluated non-finite at r = {r}"
            )));
        }
        Ok(v)
    };
    match geometry {
        Geometry::Spherical => {
            let dim = n - 1;
            let kin = 1.0 / (mass * h * h);
            let mut diag = Vec::with_capacity(dim);
            for i in 0..dim {
                let r = h * (i as f64 + 1.0);
                diag.push(kin + sample(r)?);
            }
            let off = vec![-0.5 * kin; dim - 1];
            Ok((diag, off))
        }
        Geometry::Cylindrical { m_angular } => {
            let dim = n;
            let msq = f64::from(m_angular) * f64::from(m_angular);
            let mut diag = Vec::with_capacity(dim);
            let mut off = Vec::with_capacity(dim - 1);
            for i in 0..dim {
                let c = h * (i as f64 + 0.5);
                let f_lo = h * i as f64;
                let f_hi = h * (i as f64 + 1.0);
                // The outer face sits h/2 from the last center, so its
                // Dirichlet flux counts double.
                let face_sum = if i + 1 == dim { f_lo + 2.0 * f_hi } else { f_lo + f_hi };
                diag.push(
                    face_sum / (2.0 * mass * h * h * c)
                        + sample(c)?
                        + msq / (2.0 * mass * c * c),
                );
                if i + 1 < dim {
                    off.push(-f_hi / (2.0 * mass * h * h * (c * (c + h)).sqrt()));
                }
            }
            Ok((diag, off))
        }
    }
}

/// Number of eigenvalues of the tridiagonal matrix strictly below x, by the
/// standard pivot-sign count of the shifted LDL^T factorization.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0_f64;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = (diag[i] - x) - b2 / d;
        if d == 0.0 {
            d = -f64::MIN_POSITIVE;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn bisect_eigenvalue(diag: &[f64], off: &[f64], index: usize, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..160 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) > index {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-15 * (1.0 + mid.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

fn lowest_eigenvalues(diag: &[f64], off: &[f64], k: usize) -> Vec<f64> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..diag.len() {
        let reach = if i == 0 { 0.0 } else { off[i - 1].abs() }
            + if i + 1 == diag.len() { 0.0 } else { off[i].abs() };
        lo = lo.min(diag[i] - reach);
        hi = hi.max(diag[i] + reach);
    }
    let (lo, hi) = (lo - 1.0, hi + 1.0);
    map_indices(k, |j| bisect_eigenvalue(diag, off, j, lo, hi))
}

/// Lowest k eigenvalues of the reduced radial operator, solved on grids of
/// n and 2n points and Richardson-combined as (4 E_fine - E_coarse)/3. The
/// drift between the grids is reported per eigenvalue; any drift beyond
/// `drift_tol` sets the accuracy warning.
pub fn radial_fd_solve<V>(
    v_eff: V,
    mass: f64,
    geometry: Geometry,
    r_max: f64,
    n: usize,
    k: usize,
    drift_tol: f64,
) -> Result<FdOutcome>
where
    V: Fn(f64) -> f64 + Sync,
{
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::invalid_argument("mass must be positive and finite"));
    }
    if !(r_max.is_finite() && r_max > 0.0) {
        return Err(Error::invalid_argument("r_max must be positive and finite"));
    }
    if n < 200 {
        return Err(Error::invalid_argument(format!(
            "grid needs at least 200 points for the drift check to mean anything, got {n}"
        )));
    }
    if k == 0 || k > n / 4 {
        return Err(Error::invalid_argument(format!(
            "eigenvalue count must satisfy 1 <= k <= n/4, got k = {k}"
        )));
    }
    if !(drift_tol.is_finite() && drift_tol > 0.0) {
        return Err(Error::invalid_argument("drift tolerance must be positive"));
    }
    let (diag_c, off_c) = assemble(&v_eff, mass, geometry, r_max, n)?;
    let coarse = lowest_eigenvalues(&diag_c, &off_c, k);
    let (diag_f, off_f) = assemble(&v_eff, mass, geometry, r_max, 2 * n)?;
    let fine = lowest_eigenvalues(&diag_f, &off_f, k);
    let mut eigenvalues = Vec::with_capacity(k);
    let mut drift = Vec::with_capacity(k);
    let mut accuracy_warning = false;
    for j in 0..k {
        eigenvalues.push((4.0 * fine[j] - coarse[j]) / 3.0);
        let d = (fine[j] - coarse[j]).abs();
        accuracy_warning |= d > drift_tol;
        drift.push(d);
    }
    Ok(FdOutcome { eigenvalues, drift, accuracy_warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use nalgebra::{Matrix3, Vector3};

    fn h(twice: i32) -> HalfInt {
        HalfInt::from_twice(twice)
    }

    fn norot() -> RotationSpec {
        RotationSpec { omega_z: 0.0, convention: Convention::ActiveFrame }
    }

    fn rot(omega_z: f64) -> RotationSpec {
        RotationSpec { omega_z, convention: Convention::ActiveFrame }
    }

    const UNIT_COULOMB: HydrogenParams = HydrogenParams { alpha: 1.0, mass: 1.0 };

    fn clabel(n: u32, l: u32, s2: i32, j2: i32, m2: i32) -> CoupledLabel {
        CoupledLabel { n, l, s: h(s2), j: h(j2), m: h(m2) }
    }

    #[test]
    fn coulomb_closed_form() {
        let ground = coulomb_energy(&UNIT_COULOMB, &clabel(1, 0, 1, 1, 1), &norot()).unwrap();
        assert_eq!(ground.energy, -0.5);
        assert_eq!(ground.omega_eff, 0.0);
        // n = 2, M = 3/2 at omega = 0.1: -1/8 - 0.15.
        let e = coulomb_energy(&UNIT_COULOMB, &clabel(2, 1, 1, 3, 3), &rot(0.1)).unwrap();
        assert_relative_eq!(e.energy, -0.275, epsilon = 1e-15);
        assert_relative_eq!(e.stripped_energy(), -0.125, epsilon = 1e-15);
        // The Coulomb tower requires l < n.
        assert!(coulomb_energy(&UNIT_COULOMB, &clabel(1, 1, 1, 3, 1), &norot()).is_err());
    }

    #[test]
    fn coulomb_levels_match_fd_oracle() {
        let out = radial_fd_solve(
            |r: f64| -1.0 / r,
            1.0,
            Geometry::Spherical,
            60.0,
            4000,
            2,
            1e-4,
        )
        .unwrap();
        assert!(!out.accuracy_warning, "drift = {:?}", out.drift);
        assert_abs_diff_eq!(out.eigenvalues[0], -0.5, epsilon = 1e-5);
        assert_abs_diff_eq!(out.eigenvalues[1], -0.125, epsilon = 1e-5);
    }

    #[test]
    fn nu_coefficients_match_hand_substitution() {
        let p = MagneticParams {
            alpha: 1.0,
            mass: 1.0,
            gamma: 1.0,
            q: 1.0,
            omega1: 0.0,
            omega2: 0.0,
            omega3: 0.0,
        };
        let c = magnetic_nu_coeffs(&p, h(0), 0, &norot(), -0.5).unwrap();
        assert_eq!((c.h0, c.h1, c.h2), (1.0, 2.0, 0.0));
        // M_j = 0 kills every Omega term regardless of the field profile.
        let p2 = MagneticParams { omega1: 3.0, omega2: 5.0, omega3: 7.0, ..p };
        let c2 = magnetic_nu_coeffs(&p2, h(0), 2, &rot(0.4), -0.5).unwrap();
        assert_eq!(c2.h1, 2.0);
        assert_eq!(c2.h2, -6.0);
        assert_eq!(c2.h0, 1.0);
    }

    #[test]
    fn nu_coefficients_match_fd_operator_diagonal() {
        // Assemble the oracle operator for the same physical setup and read
        // the potential back off its diagonal at three radii; the reduced
        // equation chi'' = (H0 - H1/r - H2/r^2) chi fixes the coefficients
        // through a 3x3 solve, which must agree with the closed forms.
        let p = MagneticParams {
            alpha: 1.2,
            mass: 0.9,
            gamma: 0.7,
            q: 1.3,
            omega1: 0.3,
            omega2: 0.1,
            omega3: 0.05,
        };
        let m_j = h(1);
        let l = 1u32;
        let rotation = rot(0.11);
        let energy = -0.37;
        let coup = p.field_coupling();
        let mj = m_j.as_f64();
        let lf = f64::from(l);
        let v_tot = move |r: f64| {
            -p.alpha / r - coup * mj * (p.omega1 + p.omega2 / r + p.omega3 / (r * r))
                + lf * (lf + 1.0) / (2.0 * p.mass * r * r)
        };
        let n = 1000usize;
        let r_max = 8.0;
        let (diag, _) = assemble(&v_tot, p.mass, Geometry::Spherical, r_max, n).unwrap();
        let hstep = r_max / n as f64;
        let kin = 1.0 / (p.mass * hstep * hstep);
        // chi''/chi = 2m (V_tot - omega M - E) = H0 - H1/r - H2/r^2.
        let w = |i: usize| {
            2.0 * p.mass * (diag[i] - kin - rotation.omega_z * mj - energy)
        };
        let radii = [99usize, 199, 399];
        let mut a = Matrix3::zeros();
        let mut b = Vector3::zeros();
        for (row, &i) in radii.iter().enumerate() {
            let r = hstep * (i as f64 + 1.0);
            a[(row, 0)] = 1.0;
            a[(row, 1)] = -1.0 / r;
            a[(row, 2)] = -1.0 / (r * r);
            b[row] = w(i);
        }
        let sol = a.lu().solve(&b).unwrap();
        let c = magnetic_nu_coeffs(&p, m_j, l, &rotation, energy).unwrap();
        assert_relative_eq!(sol[0], c.h0, epsilon = 1e-10, max_relative = 1e-10);
        assert_relative_eq!(sol[1], c.h1, epsilon = 1e-10, max_relative = 1e-10);
        assert_relative_eq!(sol[2], c.h2, epsilon = 1e-10, max_relative = 1e-10);
        // Consistency at a fourth radius: the diagonal really is spanned by
        // {1, 1/r, 1/r^2}.
        let i4 = 799usize;
        let r4 = hstep * (i4 as f64 + 1.0);
        let predicted = sol[0] - sol[1] / r4 - sol[2] / (r4 * r4);
        assert_relative_eq!(w(i4), predicted, epsilon = 1e-10, max_relative = 1e-10);
    }

    #[test]
    fn magnetic_zero_field_reduces_to_coulomb() {
        let p = MagneticParams {
            alpha: 1.0,
            mass: 1.0,
            gamma: 1.0,
            q: 1.0,
            omega1: 0.0,
            omega2: 0.0,
            omega3: 0.0,
        };
        for n_radial in 0..=3u32 {
            for l in 0..=2u32 {
                for j2 in [2 * l as i32 - 1, 2 * l as i32 + 1] {
                    if j2 < 0 {
                        continue;
                    }
                    let e = magnetic_nu_energy(&p, n_radial, l, h(1), h(j2), h(1), &rot(0.3))
                        .unwrap();
                    let n_principal = n_radial + l + 1;
                    let label = clabel(n_principal, l.min(n_principal - 1), 1, j2, 1);
                    let reference = coulomb_energy(&UNIT_COULOMB, &label, &rot(0.3)).unwrap();
                    assert_abs_diff_eq!(e.energy, reference.energy, epsilon = 1e-12);
                    assert_eq!(e.label.n, n_principal);
                    assert_eq!(e.extra_index, n_radial);
                }
            }
        }
    }

    #[test]
    fn magnetic_uniform_field_shifts_like_rotation() {
        // Omega1 alone only retunes omega_eff; the stripped spectrum is
        // M-independent, and with dyadic parameters the match is exact.
        let p = MagneticParams {
            alpha: 1.0,
            mass: 1.0,
            gamma: 1.0,
            q: 1.0,
            omega1: 0.25,
            omega2: 0.0,
            omega3: 0.0,
        };
        let rotation = rot(0.375);
        let mut stripped = Vec::new();
        for m2 in [-3, -1, 1, 3] {
            let e = magnetic_nu_energy(&p, 0, 1, h(1), h(3), h(m2), &rotation).unwrap();
            assert_eq!(e.omega_eff, 0.5);
            stripped.push(e.stripped_energy());
        }
        for s in &stripped {
            assert_eq!(*s, stripped[0]);
        }
        // E(M) - E(-M) = -2 M omega_eff.
        let plus = magnetic_nu_energy(&p, 0, 1, h(1), h(3), h(3), &rotation).unwrap();
        let minus = magnetic_nu_energy(&p, 0, 1, h(1), h(3), h(-3), &rotation).unwrap();
        assert_eq!(plus.energy - minus.energy, -2.0 * 1.5 * 0.5);
    }

    #[test]
    fn magnetic_rejects_complex_discriminant() {
        let p = MagneticParams {
            alpha: 1.0,
            mass: 1.0,
            gamma: 1.0,
            q: 1.0,
            omega1: 0.0,
            omega2: 0.0,
            omega3: 1.0,
        };
        // gamma q M Omega3 = 1/2 > 1/4 at l = 0.
        let err = magnetic_nu_energy(&p, 0, 0, h(1), h(1), h(1), &norot()).unwrap_err();
        match err {
            Error::NoQuantizedSolution { discriminant } => {
                assert_relative_eq!(discriminant, -1.0, epsilon = 1e-14);
            }
            other => panic!("expected quantization failure, got {other}"),
        }
    }

    #[test]
    fn magnetic_generic_fields_match_fd_oracle() {
        let p = MagneticParams {
            alpha: 1.0,
            mass: 1.0,
            gamma: 1.0,
            q: 1.0,
            omega1: 0.0,
            omega2: 0.1,
            omega3: 0.05,
        };
        let m_j = h(1);
        let rotation = rot(0.2);
        let analytic = magnetic_nu_energy(&p, 0, 0, h(1), h(1), m_j, &rotation).unwrap();
        let coup = p.field_coupling();
        let mj = m_j.as_f64();
        let v = move |r: f64| {
            -p.alpha / r - coup * mj * (p.omega1 + p.omega2 / r + p.omega3 / (r * r))
        };
        let out = radial_fd_solve(v, p.mass, Geometry::Spherical, 20.0, 12000, 1, 1e-4).unwrap();
        let fd_energy = out.eigenvalues[0] - mj * rotation.omega_z;
        assert_relative_eq!(analytic.energy, fd_energy, max_relative = 1e-4);
    }

    #[test]
    fn slow_well_deep_limit_pins_first_bessel_zero() {
        let p = WellParams {
            radius: 1.0,
            depth: 1e9,
            mass: 1.0,
            k_z: 0.0,
            regime: WellRegime::Slow,
        };
        let e = well_slow_energy(&p, 0, 1, &norot()).unwrap();
        let SpectralDetail::SlowWell { matching_root, kappa, lambda } = e.detail else {
            panic!("wrong detail variant");
        };
        assert_relative_eq!(matching_root, 2.4048255577, max_relative = 1e-4);
        assert!(matching_root < 2.4048255577);
        assert_relative_eq!(kappa, (2.0 * p.depth).sqrt(), max_relative = 1e-6);
        assert_eq!(lambda, 0.0);
        // Second mode sits just below the second zero of J_0.
        let e2 = well_slow_energy(&p, 0, 2, &norot()).unwrap();
        let SpectralDetail::SlowWell { matching_root: y2, .. } = e2.detail else {
            panic!("wrong detail variant");
        };
        assert_relative_eq!(y2, 5.5200781103, max_relative = 1e-4);
    }

    #[test]
    fn slow_well_matches_cylindrical_fd_oracle() {
        let p = WellParams {
            radius: 1.0,
            depth: 50.0,
            mass: 1.0,
            k_z: 0.0,
            regime: WellRegime::Slow,
        };
        let rotation = rot(0.25);
        for (m_ang, n) in [(0i32, 1u32), (1, 1), (0, 2)] {
            let analytic = well_slow_energy(&p, m_ang, n, &rotation).unwrap();
            assert!(analytic.energy + f64::from(m_ang) * rotation.omega_z < 0.0);
            // r_max a multiple of R keeps the well edge on a cell face.
            let out = radial_fd_solve(
                |r: f64| if r < p.radius { -p.depth } else { 0.0 },
                p.mass,
                Geometry::Cylindrical { m_angular: m_ang },
                6.0,
                2400,
                n as usize,
                1e-2,
            )
            .unwrap();
            let fd_energy =
                out.eigenvalues[n as usize - 1] - f64::from(m_ang) * rotation.omega_z;
            assert_relative_eq!(analytic.energy, fd_energy, max_relative = 1e-4);
        }
        // Reference value for the ground matching root, solved independently
        // to high precision from the same continuity condition.
        let e = well_slow_energy(&p, 0, 1, &norot()).unwrap();
        let SpectralDetail::SlowWell { matching_root, .. } = e.detail else {
            panic!("wrong detail variant");
        };
        assert_relative_eq!(matching_root, 2.184518812773, epsilon = 1e-8);
    }

    #[test]
    fn slow_well_axial_motion_is_additive() {
        let base = WellParams {
            radius: 1.0,
            depth: 50.0,
            mass: 2.0,
            k_z: 0.0,
            regime: WellRegime::Slow,
        };
        let moving = WellParams { k_z: 0.7, ..base };
        let e0 = well_slow_energy(&base, 1, 1, &rot(0.3)).unwrap();
        let e1 = well_slow_energy(&moving, 1, 1, &rot(0.3)).unwrap();
        assert_relative_eq!(
            e1.energy - e0.energy,
            0.7 * 0.7 / (2.0 * base.mass),
            epsilon = 1e-10
        );
    }

    #[test]
    fn slow_well_error_paths() {
        let shallow = WellParams {
            radius: 1.0,
            depth: 0.05,
            mass: 1.0,
            k_z: 0.0,
            regime: WellRegime::Slow,
        };
        // The binding window ends below the first J_0 zero, so mode 2 cannot
        // exist.
        let err = well_slow_energy(&shallow, 0, 2, &norot()).unwrap_err();
        assert!(err.to_string().contains("no bound state"), "{err}");
        // M = 1 needs a finite threshold depth in two dimensions.
        let err = well_slow_energy(&shallow, 1, 1, &norot()).unwrap_err();
        assert!(err.to_string().contains("no bound state"), "{err}");
        // Axial kinetic energy can exhaust the well.
        let axial = WellParams { k_z: 1.0, ..shallow };
        assert!(well_slow_energy(&axial, 0, 1, &norot()).is_err());
        // Regime guard.
        let deep = WellParams { depth: 50.0, ..shallow };
        assert!(well_slow_energy(&deep, 0, 1, &rot(1.5)).is_err());
        let rapid_spec = WellParams { regime: WellRegime::Rapid, ..deep };
        assert!(well_slow_energy(&rapid_spec, 0, 1, &rot(0.2)).is_err());
    }

    #[test]
    fn rapid_well_frozen_point_and_structure() {
        let p = WellParams {
            radius: 4.0,
            depth: 1.0,
            mass: 1.0,
            k_z: 0.0,
            regime: WellRegime::Rapid,
        };
        let rotation = rot(0.5);
        let e = well_rapid_energy(&p, 0, 1, &rotation).unwrap();
        assert_abs_diff_eq!(e.energy, -0.2771017546, epsilon = 1e-9);
        let SpectralDetail::RapidWell { bessel_zero: x } = e.detail else {
            panic!("wrong detail variant");
        };
        assert_relative_eq!(x, 2.4048255577, epsilon = 1e-9);
        // k_z enters purely additively.
        let moving = WellParams { k_z: 0.8, ..p };
        let em = well_rapid_energy(&moving, 0, 1, &rotation).unwrap();
        assert_relative_eq!(em.energy - e.energy, 0.32, epsilon = 1e-12);
        // Strictly increasing in the radial index at fixed M.
        let mut prev = e.energy;
        for a in 2..=5u32 {
            let ea = well_rapid_energy(&p, 0, a, &rotation).unwrap().energy;
            assert!(ea > prev);
            prev = ea;
        }
        // Regime guard: R omega must exceed 1.
        assert!(well_rapid_energy(&p, 0, 1, &rot(0.2)).is_err());
    }

    #[test]
    fn rapid_well_matches_wall_at_rotational_radius() {
        // The rapid-regime levels coincide with a hard wall at r = 1/omega
        // over the flat well bottom.
        let p = WellParams {
            radius: 4.0,
            depth: 1.0,
            mass: 1.0,
            k_z: 0.0,
            regime: WellRegime::Rapid,
        };
        let rotation = rot(0.5);
        for (m_ang, a) in [(0i32, 1u32), (1, 1), (0, 2)] {
            let analytic = well_rapid_energy(&p, m_ang, a, &rotation).unwrap();
            let out = radial_fd_solve(
                |_: f64| -p.depth,
                p.mass,
                Geometry::Cylindrical { m_angular: m_ang },
                1.0 / rotation.omega_z,
                2000,
                a as usize,
                1e-4,
            )
            .unwrap();
            let fd_energy =
                out.eigenvalues[a as usize - 1] - f64::from(m_ang) * rotation.omega_z;
            assert_abs_diff_eq!(analytic.energy, fd_energy, epsilon = 1e-6);
        }
    }

    #[test]
    fn coulomb_well_closed_form_and_guards() {
        let p = CoulombWellParams { alpha: 1.0, mass: 1.0, nprime_map: NPrimeMap::Identity };
        let ground = coulomb_well_energy(&p, 1, 0, &rot(0.9)).unwrap();
        assert_eq!(ground.energy, -2.0);
        let e = coulomb_well_energy(&p, 2, 1, &rot(0.3)).unwrap();
        assert_relative_eq!(e.energy, -2.0 / 9.0 - 0.3, epsilon = 1e-14);
        assert!(coulomb_well_energy(&p, 1, 1, &norot()).is_err());
        assert!(coulomb_well_energy(&p, 0, 0, &norot()).is_err());
        // Constant n': E(omega) + M omega is omega-independent.
        let sweep: Vec<f64> = (0..5)
            .map(|i| {
                let w = 0.1 * f64::from(i);
                let entry = coulomb_well_energy(&p, 3, 2, &rot(w)).unwrap();
                entry.energy + 2.0 * w
            })
            .collect();
        for s in &sweep {
            assert_abs_diff_eq!(*s, sweep[0], epsilon = 1e-15);
        }
    }

    #[test]
    fn coulomb_well_schedule_changes_tower() {
        let p = CoulombWellParams {
            alpha: 1.0,
            mass: 1.0,
            nprime_map: NPrimeMap::Schedule {
                steps: vec![
                    ScheduleStep { min_speed: 0.5, n_prime: 3 },
                    ScheduleStep { min_speed: 1.0, n_prime: 4 },
                ],
            },
        };
        let slow = coulomb_well_energy(&p, 2, 0, &rot(0.2)).unwrap();
        assert_eq!(slow.extra_index, 2);
        assert_relative_eq!(slow.stripped_energy(), -2.0 / 9.0, epsilon = 1e-14);
        let mid = coulomb_well_energy(&p, 2, 0, &rot(-0.7)).unwrap();
        assert_eq!(mid.extra_index, 3);
        assert_relative_eq!(mid.stripped_energy(), -0.08, epsilon = 1e-14);
        let fast = coulomb_well_energy(&p, 2, 0, &rot(1.5)).unwrap();
        assert_eq!(fast.extra_index, 4);
        // |M| is checked against the resolved tower, which has grown.
        assert!(coulomb_well_energy(&p, 2, 2, &rot(0.2)).is_err());
        assert!(coulomb_well_energy(&p, 2, 2, &rot(0.7)).is_ok());
        assert_relative_eq!(fast.stripped_energy(), -1.0 / 24.5, epsilon = 1e-14);
        // Unsorted schedules are rejected.
        let bad = CoulombWellParams {
            alpha: 1.0,
            mass: 1.0,
            nprime_map: NPrimeMap::Schedule {
                steps: vec![
                    ScheduleStep { min_speed: 1.0, n_prime: 4 },
                    ScheduleStep { min_speed: 0.5, n_prime: 3 },
                ],
            },
        };
        assert!(coulomb_well_energy(&bad, 2, 0, &norot()).is_err());
    }

    #[test]
    fn coulomb_well_matches_planar_fd_oracle() {
        // Planar Coulomb tower: -alpha^2 m / (2 (n' - 1/2)^2) at omega = 0.
        let out = radial_fd_solve(
            |r: f64| -1.0 / r,
            1.0,
            Geometry::Cylindrical { m_angular: 0 },
            40.0,
            2000,
            2,
            1e-3,
        )
        .unwrap();
        assert_abs_diff_eq!(out.eigenvalues[0], -2.0, epsilon = 1e-5);
        assert_abs_diff_eq!(out.eigenvalues[1], -2.0 / 9.0, epsilon = 1e-5);
        let m1 = radial_fd_solve(
            |r: f64| -1.0 / r,
            1.0,
            Geometry::Cylindrical { m_angular: 1 },
            40.0,
            2000,
            1,
            1e-3,
        )
        .unwrap();
        assert_abs_diff_eq!(m1.eigenvalues[0], -2.0 / 9.0, epsilon = 1e-5);
    }

    #[test]
    fn fd_hard_wall_matches_bessel_zeros() {
        // With V = 0 the Dirichlet edge at r_max is the wall, so the levels
        // are x_{Ma}^2 / (2 m R^2) exactly.
        let out = radial_fd_solve(
            |_: f64| 0.0,
            1.0,
            Geometry::Cylindrical { m_angular: 0 },
            1.0,
            1000,
            2,
            1e-3,
        )
        .unwrap();
        assert!(!out.accuracy_warning);
        let x01 = bessel_zero(0, 1).unwrap();
        let x02 = bessel_zero(0, 2).unwrap();
        assert_abs_diff_eq!(out.eigenvalues[0], x01 * x01 / 2.0, epsilon = 1e-5);
        assert_abs_diff_eq!(out.eigenvalues[1], x02 * x02 / 2.0, epsilon = 1e-5);
        let m1 = radial_fd_solve(
            |_: f64| 0.0,
            1.0,
            Geometry::Cylindrical { m_angular: 1 },
            1.0,
            1000,
            1,
            1e-3,
        )
        .unwrap();
        let x11 = bessel_zero(1, 1).unwrap();
        assert_abs_diff_eq!(m1.eigenvalues[0], x11 * x11 / 2.0, epsilon = 1e-5);
    }

    #[test]
    fn fd_eigenvalues_monotone_under_domain_shrink() {
        // Dirichlet restriction raises every level as the box shrinks; equal
        // step sizes keep the discretization bias common to all three runs.
        let solve = |r_max: f64, n: usize| {
            radial_fd_solve(|r: f64| -1.0 / r, 1.0, Geometry::Spherical, r_max, n, 1, 1e-2)
                .unwrap()
                .eigenvalues[0]
        };
        let tight = solve(3.0, 3000);
        let middle = solve(4.0, 4000);
        let wide = solve(5.0, 5000);
        assert!(tight > middle);
        assert!(middle > wide);
    }

    #[test]
    fn fd_rejects_bad_grids_and_potentials() {
        let v = |_: f64| 0.0;
        assert!(radial_fd_solve(v, 1.0, Geometry::Spherical, 10.0, 100, 1, 1e-6).is_err());
        assert!(radial_fd_solve(v, 1.0, Geometry::Spherical, 10.0, 400, 0, 1e-6).is_err());
        assert!(radial_fd_solve(v, -1.0, Geometry::Spherical, 10.0, 400, 1, 1e-6).is_err());
        assert!(radial_fd_solve(v, 1.0, Geometry::Spherical, -1.0, 400, 1, 1e-6).is_err());
        let bad = |r: f64| if r > 5.0 { f64::NAN } else { 0.0 };
        assert!(radial_fd_solve(bad, 1.0, Geometry::Spherical, 10.0, 400, 1, 1e-6).is_err());
    }

    #[test]
    fn fd_flags_coarse_grids() {
        // A deliberately tight drift tolerance trips the warning while the
        // extrapolated value stays available.
        let out = radial_fd_solve(
            |r: f64| -1.0 / r,
            1.0,
            Geometry::Spherical,
            60.0,
            400,
            1,
            1e-12,
        )
        .unwrap();
        assert!(out.accuracy_warning);
        assert!(out.drift[0] > 1e-12);
    }

    #[test]
    fn assign_spectrum_dispatches_per_family() {
        let rotation = rot(0.2);
        // Coulomb: every label of a coupled sector.
        let labels: Vec<CoupledLabel> = crate::angmo::couple_basis(2, 1, h(1))
            .unwrap()
            .into_iter()
            .map(|c| c.label)
            .collect();
        let spec = PotentialSpec::Coulomb(UNIT_COULOMB);
        let entries = assign_spectrum(&spec, &labels, &rotation).unwrap();
        assert_eq!(entries.len(), labels.len());
        for (entry, label) in entries.iter().zip(&labels) {
            let single = coulomb_energy(&UNIT_COULOMB, label, &rotation).unwrap();
            assert_eq!(entry.energy, single.energy);
        }
        // Magnetic: n below l + 1 cannot be a radial label.
        let mag = PotentialSpec::MagneticCoulomb(MagneticParams {
            alpha: 1.0,
            mass: 1.0,
            gamma: 1.0,
            q: 1.0,
            omega1: 0.1,
            omega2: 0.0,
            omega3: 0.0,
        });
        let bad = vec![clabel(1, 1, 1, 3, 1)];
        assert!(assign_spectrum(&mag, &bad, &rotation).is_err());
        let good = vec![clabel(2, 1, 1, 3, 1), clabel(2, 1, 1, 3, -1)];
        let entries = assign_spectrum(&mag, &good, &rotation).unwrap();
        assert_eq!(entries[0].extra_index, 0);
        assert_eq!(entries[0].omega_eff, 0.2 + 0.05);
        // Wells reject spinful labels.
        let well = PotentialSpec::CylindricalWell(WellParams {
            radius: 1.0,
            depth: 50.0,
            mass: 1.0,
            k_z: 0.0,
            regime: WellRegime::Slow,
        });
        assert!(assign_spectrum(&well, &[clabel(1, 1, 1, 3, 1)], &rotation).is_err());
        let ok = assign_spectrum(&well, &[clabel(1, 1, 0, 2, 2)], &rotation).unwrap();
        assert_eq!(ok[0].label.l, 1);
        // Coulomb-in-well goes through the injected map.
        let cw = PotentialSpec::CoulombWell(CoulombWellParams {
            alpha: 1.0,
            mass: 1.0,
            nprime_map: NPrimeMap::Identity,
        });
        let entries = assign_spectrum(&cw, &[clabel(2, 1, 0, 2, -2)], &rotation).unwrap();
        assert_relative_eq!(entries[0].energy, -2.0 / 9.0 + 0.2, epsilon = 1e-14);
    }

    #[test]
    fn rotation_shift_is_additive_in_every_family() {
        let w = 0.35;
        // Coulomb.
        let label = clabel(3, 2, 1, 5, 3);
        let e0 = coulomb_energy(&UNIT_COULOMB, &label, &norot()).unwrap().energy;
        let e1 = coulomb_energy(&UNIT_COULOMB, &label, &rot(w)).unwrap().energy;
        assert_abs_diff_eq!(e1 - e0, -1.5 * w, epsilon = 1e-14);
        // Slow well: the matching root does not depend on omega at all.
        let p = WellParams {
            radius: 1.0,
            depth: 50.0,
            mass: 1.0,
            k_z: 0.0,
            regime: WellRegime::Slow,
        };
        let s0 = well_slow_energy(&p, 1, 1, &norot()).unwrap();
        let s1 = well_slow_energy(&p, 1, 1, &rot(w)).unwrap();
        assert_abs_diff_eq!(s1.energy - s0.energy, -w, epsilon = 1e-12);
        let (SpectralDetail::SlowWell { matching_root: y0, .. },
             SpectralDetail::SlowWell { matching_root: y1, .. }) = (s0.detail, s1.detail)
        else {
            panic!("wrong detail variant");
        };
        assert_eq!(y0, y1);
        // Magnetic with fields on: shift is still -M omega_z exactly.
        let mag = MagneticParams {
            alpha: 1.0,
            mass: 1.0,
            gamma: 1.0,
            q: 1.0,
            omega1: 0.3,
            omega2: 0.1,
            omega3: 0.02,
        };
        let m0 = magnetic_nu_energy(&mag, 1, 1, h(1), h(3), h(-1), &norot()).unwrap();
        let m1 = magnetic_nu_energy(&mag, 1, 1, h(1), h(3), h(-1), &rot(w)).unwrap();
        assert_abs_diff_eq!(m1.energy - m0.energy, 0.5 * w, epsilon = 1e-14);
    }
}
