//! Deciding whether active and passive rotations coincide.
//!
//! Three instruments, one question. The spectral criterion asks whether the
//! rotation-stripped energies E0 = E + M omega_eff are degenerate across
//! every set of states the rotation algebra connects; degeneracy there is
//! the spectral face of [J, H0] = 0. The dynamical comparison evolves one
//! state both ways and measures the gap. The factorization check tests
//! whether matrix elements still split into a reduced part times a purely
//! geometric M-dependent part, which any full rotation symmetry enforces.

use std::collections::HashMap;

use crate::angmo::{CoupledLabel, GeneratorSet};
use crate::evolution::{
    evolve_active, evolve_passive, trace_distance, DensityMatrix,
};
use crate::spectra::{Convention, PotentialFamily, RotationSpec, SpectrumEntry};
use crate::{Error, HalfInt, Result};

/// Outcome of either the spectral or the dynamical test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Equivalent => "equivalent",
            Verdict::NotEquivalent => "not-equivalent",
        })
    }
}

/// Spectrum prepared for the degeneracy test: one family, one rotation
/// rate, one effective stripping rate shared by every entry.
#[derive(Debug, Clone)]
pub struct CriterionInput {
    pub spectrum: Vec<SpectrumEntry>,
    pub omega_eff: f64,
}

impl CriterionInput {
    /// Wraps a spectrum after checking that it is uniform enough to strip:
    /// same family, same omega_z, same omega_eff everywhere.
    pub fn from_spectrum(spectrum: Vec<SpectrumEntry>) -> Result<Self> {
        let Some(first) = spectrum.first() else {
            return Err(Error::invalid_argument("criterion needs at least one entry"));
        };
        for entry in &spectrum {
            if entry.family != first.family {
                return Err(Error::invalid_argument(format!(
                    "criterion input mixes families {} and {}",
                    first.family, entry.family
                )));
            }
            if entry.omega_z != first.omega_z || entry.omega_eff != first.omega_eff {
                return Err(Error::invalid_argument(
                    "criterion input mixes rotation rates",
                ));
            }
        }
        let omega_eff = first.omega_eff;
        Ok(Self { spectrum, omega_eff })
    }
}

/// Key identifying one ladder-connected group of labels. Spin-orbit
/// families use the standard multiplet (n, l, s, J fixed, M varying). The
/// integer-M well family ladders across M at fixed radial ordinal. The
/// planar Coulomb tower is one connected family per k_z: its stretched edge
/// |M| = n' - 1 forces the M-ladder into the next tower, so no tower is
/// closed on its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum GroupKey {
    Multiplet { n: u32, l: u32, s: HalfInt, j: HalfInt },
    RadialOrdinal { n: u32, k_z_bits: u64 },
    WholeTower { k_z_bits: u64 },
}

fn group_key(entry: &SpectrumEntry) -> GroupKey {
    match entry.family {
        PotentialFamily::Coulomb | PotentialFamily::MagneticCoulomb => GroupKey::Multiplet {
            n: entry.label.n,
            l: entry.label.l,
            s: entry.label.s,
            j: entry.label.j,
        },
        PotentialFamily::CylindricalWell => GroupKey::RadialOrdinal {
            n: entry.label.n,
            k_z_bits: entry.k_z.to_bits(),
        },
        PotentialFamily::CoulombWell => GroupKey::WholeTower { k_z_bits: entry.k_z.to_bits() },
    }
}

/// M-degeneracy of the stripped spectrum within every ladder-connected
/// group, to within `tol`. Returns the verdict and the worst spread found.
/// Spin-orbit multiplets must be complete (every M from -J to J present);
/// the integer-M groups are tested pairwise over whatever projections are
/// populated, since any two members are still ladder-connected through the
/// full state space.
pub fn check_criterion(input: &CriterionInput, tol: f64) -> Result<(Verdict, f64)> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid_argument("criterion tolerance must be positive"));
    }
    let mut groups: HashMap<GroupKey, Vec<&SpectrumEntry>> = HashMap::new();
    for entry in &input.spectrum {
        let members = groups.entry(group_key(entry)).or_default();
        if members.iter().any(|m| m.label == entry.label) {
            return Err(Error::invalid_argument(format!(
                "duplicate spectrum entry for (n = {}, l = {}, s = {}, J = {}, M = {})",
                entry.label.n, entry.label.l, entry.label.s, entry.label.j, entry.label.m
            )));
        }
        members.push(entry);
    }
    let mut max_spread = 0.0_f64;
    for (key, members) in &groups {
        if let GroupKey::Multiplet { n, l, s, j } = key {
            for m in j.ladder_desc() {
                if !members.iter().any(|e| e.label.m == m) {
                    return Err(Error::invalid_argument(format!(
                        "multiplet (n = {n}, l = {l}, s = {s}, J = {j}) is missing M = {m}"
                    )));
                }
            }
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for entry in members {
            let stripped = entry.energy + entry.label.m.as_f64() * input.omega_eff;
            lo = lo.min(stripped);
            hi = hi.max(stripped);
        }
        max_spread = max_spread.max(hi - lo);
    }
    let verdict = if max_spread < tol { Verdict::Equivalent } else { Verdict::NotEquivalent };
    Ok((verdict, max_spread))
}

/// Everything the comparison measured, with the tolerances it measured
/// against.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EquivalenceReport {
    pub family: PotentialFamily,
    pub verdict_criterion: Verdict,
    pub verdict_dynamical: Verdict,
    /// Worst stripped-energy spread found by the spectral test.
    pub max_criterion_spread: f64,
    pub max_trace_distance: f64,
    /// Worst elementwise phase discrepancy (radians) over elements whose
    /// magnitude exceeds 1e-12 in both evolutions.
    pub max_element_phase_error: f64,
    pub times_sampled: Vec<f64>,
    pub tolerance: f64,
    pub convention: Convention,
    /// False when the spectral predictor and the dynamical measurement
    /// disagree; such reports need a human look, typically a state that is
    /// blind to the spectrum's M-dependence (diagonal, or single-M).
    pub verdicts_agree: bool,
    /// True when the initial state carries coherence between different
    /// principal shells; the phase law covers it, but the analytic spectra
    /// were derived shell by shell.
    pub cross_shell_coherences: bool,
}

/// Evolves `rho0` under both prescriptions over `times` and measures the
/// gap. The passive detector runs at the effective rate the spectrum
/// declares (omega_eff), which is the only rate that can possibly match;
/// the comparison direction follows the convention in `rot`: active at +t
/// against passive at -t for [`Convention::ActiveFrame`], both at +t for
/// [`Convention::PassiveFrame`].
pub fn compare_evolutions(
    rho0: &DensityMatrix,
    spectrum: &[SpectrumEntry],
    generators: &GeneratorSet,
    rot: &RotationSpec,
    times: &[f64],
    tol: f64,
) -> Result<EquivalenceReport> {
    rot.validate()?;
    if times.is_empty() {
        return Err(Error::invalid_argument("comparison needs at least one sample time"));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(Error::invalid_argument("sample times must be finite"));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid_argument("comparison tolerance must be positive"));
    }
    let input = CriterionInput::from_spectrum(spectrum.to_vec())?;
    if input.spectrum[0].omega_z != rot.omega_z {
        return Err(Error::invalid_argument(format!(
            "spectrum was computed at omega_z = {}, comparison asked for {}",
            input.spectrum[0].omega_z, rot.omega_z
        )));
    }
    let (verdict_criterion, max_criterion_spread) = check_criterion(&input, tol)?;
    let passive_rot = RotationSpec { omega_z: input.omega_eff, convention: rot.convention };
    let direction = match rot.convention {
        Convention::ActiveFrame => -1.0,
        Convention::PassiveFrame => 1.0,
    };
    let mut max_trace_distance = 0.0_f64;
    let mut max_element_phase_error = 0.0_f64;
    for &t in times {
        let active = evolve_active(rho0, spectrum, t)?;
        let passive = evolve_passive(rho0, generators, &passive_rot, direction * t)?;
        max_trace_distance = max_trace_distance.max(trace_distance(&active, &passive)?);
        let (a, p) = (active.elements(), passive.elements());
        for (x, y) in a.iter().zip(p.iter()) {
            if x.norm() > 1e-12 && y.norm() > 1e-12 {
                max_element_phase_error = max_element_phase_error.max((x * y.conj()).arg().abs());
            }
        }
    }
    let verdict_dynamical =
        if max_trace_distance < tol { Verdict::Equivalent } else { Verdict::NotEquivalent };
    Ok(EquivalenceReport {
        family: input.spectrum[0].family,
        verdict_criterion,
        verdict_dynamical,
        max_criterion_spread,
        max_trace_distance,
        max_element_phase_error,
        times_sampled: times.to_vec(),
        tolerance: tol,
        convention: rot.convention,
        verdicts_agree: verdict_criterion == verdict_dynamical,
        cross_shell_coherences: rho0.cross_shell_coherence(),
    })
}

/// Radial identity of a label: everything but the geometry (J, M).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct RadialId {
    n: u32,
    l: u32,
    s: HalfInt,
}

fn radial_id(label: &CoupledLabel) -> RadialId {
    RadialId { n: label.n, l: label.l, s: label.s }
}

fn rank_ratio(block: &nalgebra::DMatrix<num_complex::Complex64>) -> f64 {
    let sv = block.singular_values();
    if sv.is_empty() || sv[0] < 1e-12 {
        return 0.0;
    }
    if sv.len() < 2 {
        return 0.0;
    }
    sv[1] / sv[0]
}

/// Tests whether every matrix element splits as (reduced part over radial
/// identities) x (geometric part over projections): for each (J, J') pair
/// the elements are rearranged into a matrix with radial-identity pairs as
/// rows and (M, M') pairs as columns, and factorization holds exactly when
/// that matrix is rank 1. Spinless integer-M bases have no J structure
/// beyond M itself, so they rearrange as one single block with radial
/// ordinals as rows and projections as columns. Returns the pass flag and
/// the worst second-to-first singular value ratio; blocks with leading
/// singular value below 1e-12 count as empty and pass.
pub fn wigner_eckart_check(rho: &DensityMatrix, tol: f64) -> Result<(bool, f64)> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::invalid_argument("factorization tolerance must be positive"));
    }
    let basis = rho.basis();
    let elements = rho.elements();
    let spinless_embedded = basis.iter().all(|lab| {
        lab.s == HalfInt::from_int(0)
            && lab.j == HalfInt::from_int(lab.l as i32)
            && lab.m.abs() == lab.j
    });
    let mut residual = 0.0_f64;
    if spinless_embedded {
        // One block: rows are (n1, n2) radial ordinal pairs, columns are
        // (M1, M2) projection pairs; absent combinations stay zero.
        let mut ns: Vec<u32> = basis.iter().map(|lab| lab.n).collect();
        ns.sort_unstable();
        ns.dedup();
        let mut ms: Vec<i32> = basis.iter().map(|lab| lab.m.twice() / 2).collect();
        ms.sort_unstable();
        ms.dedup();
        let find = |n: u32, m: i32| {
            basis.iter().position(|lab| lab.n == n && lab.m == HalfInt::from_int(m))
        };
        let mut block = nalgebra::DMatrix::zeros(ns.len() * ns.len(), ms.len() * ms.len());
        for (r1, &n1) in ns.iter().enumerate() {
            for (r2, &n2) in ns.iter().enumerate() {
                for (c1, &m1) in ms.iter().enumerate() {
                    for (c2, &m2) in ms.iter().enumerate() {
                        if let (Some(i), Some(j)) = (find(n1, m1), find(n2, m2)) {
                            block[(r1 * ns.len() + r2, c1 * ms.len() + c2)] = elements[(i, j)];
                        }
                    }
                }
            }
        }
        residual = rank_ratio(&block);
    } else {
        let mut js: Vec<HalfInt> = basis.iter().map(|lab| lab.j).collect();
        js.sort_unstable();
        js.dedup();
        for &j1 in &js {
            for &j2 in &js {
                let mut rads1: Vec<RadialId> = basis
                    .iter()
                    .filter(|lab| lab.j == j1)
                    .map(radial_id)
                    .collect();
                rads1.dedup();
                let mut rads2: Vec<RadialId> = basis
                    .iter()
                    .filter(|lab| lab.j == j2)
                    .map(radial_id)
                    .collect();
                rads2.dedup();
                let ms1: Vec<HalfInt> = j1.ladder_desc().collect();
                let ms2: Vec<HalfInt> = j2.ladder_desc().collect();
                let find = |r: &RadialId, j: HalfInt, m: HalfInt| {
                    basis.iter().position(|lab| {
                        radial_id(lab) == *r && lab.j == j && lab.m == m
                    })
                };
                let mut block = nalgebra::DMatrix::zeros(
                    rads1.len() * rads2.len(),
                    ms1.len() * ms2.len(),
                );
                for (r1, ra) in rads1.iter().enumerate() {
                    for (r2, rb) in rads2.iter().enumerate() {
                        for (c1, &ma) in ms1.iter().enumerate() {
                            for (c2, &mb) in ms2.iter().enumerate() {
                                if let (Some(i), Some(j)) =
                                    (find(ra, j1, ma), find(rb, j2, mb))
                                {
                                    block[(r1 * rads2.len() + r2, c1 * ms2.len() + c2)] =
                                        elements[(i, j)];
                                }
                            }
                        }
                    }
                }
                residual = residual.max(rank_ratio(&block));
            }
        }
    }
    Ok((residual < tol, residual))
}
