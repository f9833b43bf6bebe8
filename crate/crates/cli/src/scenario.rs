//! Scenario files: the declarative input the CLI runs.
//!
//! A scenario is one TOML document. `[potential]` picks the family and its
//! physical parameters, `[rotation]` the rate and comparison convention,
//! `[basis]` the states, `[initial]` the starting density matrix, and the
//! optional `[times]`, `[tolerances]`, `[output]` sections control sampling
//! and reporting. Everything downstream (time grids included) is a pure
//! function of this file, so reruns reproduce outputs byte for byte.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use rotequiv::angmo::{couple_basis, generator_matrices, CoupledLabel, GeneratorSet};
use rotequiv::evolution::{build_rho0, DensityMatrix, InitialCoefficients};
use rotequiv::spectra::{
    assign_spectrum, PotentialFamily, PotentialSpec, RotationSpec, SpectrumEntry,
};
use rotequiv::HalfInt;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// Multiplies reported energies (spectrum CSV and scaled report fields)
    /// for dimensional output; internal math stays in natural units.
    #[serde(default = "one")]
    pub energy_scale: f64,
    pub potential: PotentialSpec,
    pub rotation: RotationSpec,
    pub basis: BasisSpec,
    pub initial: InitialSpec,
    #[serde(default)]
    pub times: TimesSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: OutputSpec,
}

fn one() -> f64 {
    1.0
}

/// Which states the scenario works in. The spin-orbit families (coulomb,
/// magnetic-coulomb) take shells `n` plus `l` and `s` and enumerate every
/// (J, M) of each shell; the well families take radial ordinals `n` and an
/// explicit integer projection list `m` (plus axial `k_z`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisSpec {
    /// Principal shells, radial ordinals, or tower bases n', by family.
    pub n: Vec<u32>,
    pub l: Option<u32>,
    pub s: Option<HalfInt>,
    /// Integer projections, well families only.
    pub m: Option<Vec<i32>>,
    #[serde(default)]
    pub k_z: f64,
}

/// Starting state. `spin` places a spin density matrix at fixed (n, l, m_l)
/// and couples it into the (J, M) basis; `pure` gives one complex amplitude
/// per basis label (normalized by the builder).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialSpec {
    Spin {
        /// Shell the state lives in; defaults to the single basis shell.
        n: Option<u32>,
        m_l: i32,
        /// Rows indexed by m_s from +s down to -s, entries as [re, im].
        matrix: Vec<Vec<[f64; 2]>>,
    },
    Pure {
        /// One [re, im] pair per basis label, in basis order.
        amplitudes: Vec<[f64; 2]>,
    },
}

/// Sample times: an explicit list, or a uniform grid of `count` points from
/// 0 to `t_max` inclusive. With the section absent the grid spans five
/// rotation periods (t_max = 5 * 2pi / |omega_z|) in 64 points.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimesSpec {
    pub explicit: Option<Vec<f64>>,
    pub t_max: Option<f64>,
    pub count: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Equivalence threshold for both the spectral criterion (stripped-energy
    /// spread) and the dynamical comparison (trace distance).
    #[serde(default = "default_equivalence")]
    pub equivalence: f64,
    /// Relative tolerance for the finite-difference energy cross-checks.
    #[serde(default = "default_oracle")]
    pub oracle: f64,
}

fn default_equivalence() -> f64 {
    1e-9
}

fn default_oracle() -> f64 {
    1e-4
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            equivalence: default_equivalence(),
            oracle: default_oracle(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// File prefix for emitted outputs; `--out` overrides it.
    pub prefix: Option<String>,
}

/// A scenario resolved into the objects the pipeline consumes.
#[derive(Debug)]
pub struct Built {
    pub scenario: Scenario,
    pub labels: Vec<CoupledLabel>,
    pub spectrum: Vec<SpectrumEntry>,
    pub rho0: DensityMatrix,
    pub generators: GeneratorSet,
    pub times: Vec<f64>,
}

impl Built {
    pub fn equivalence_tol(&self, flag: Option<f64>) -> f64 {
        flag.unwrap_or(self.scenario.tolerances.equivalence)
    }
}

pub fn parse(text: &str) -> CliResult<Scenario> {
    toml::from_str(text).map_err(|e| CliError::Parse(e.to_string()))
}

/// Resolves a parsed scenario into basis labels, spectrum, initial state,
/// generators, and the time grid, validating as it goes.
pub fn build(scenario: Scenario) -> CliResult<Built> {
    if !(scenario.energy_scale.is_finite() && scenario.energy_scale > 0.0) {
        return Err(CliError::Validation(format!(
            "energy_scale must be finite and positive, got {}",
            scenario.energy_scale
        )));
    }
    scenario.potential.validate()?;
    scenario.rotation.validate()?;
    let labels = build_labels(&scenario)?;
    let potential = effective_potential(&scenario);
    potential.validate()?;
    let spectrum = assign_spectrum(&potential, &labels, &scenario.rotation)?;
    let rho0 = build_initial(&scenario, &labels)?;
    let generators = generator_matrices(&labels)?;
    let times = resolve_times(&scenario)?;
    Ok(Built {
        scenario,
        labels,
        spectrum,
        rho0,
        generators,
        times,
    })
}

fn is_well(family: PotentialFamily) -> bool {
    matches!(
        family,
        PotentialFamily::CylindricalWell | PotentialFamily::CoulombWell
    )
}

fn build_labels(scenario: &Scenario) -> CliResult<Vec<CoupledLabel>> {
    let family = scenario.potential.family();
    let basis = &scenario.basis;
    if basis.n.is_empty() {
        return Err(CliError::Validation(
            "basis needs at least one entry in `n`".into(),
        ));
    }
    let mut labels = Vec::new();
    if is_well(family) {
        if basis.l.is_some() || basis.s.is_some() {
            return Err(CliError::Validation(format!(
                "{family} bases take integer `m`; drop `l` and `s`"
            )));
        }
        if family == PotentialFamily::CoulombWell && basis.k_z != 0.0 {
            return Err(CliError::Validation(format!(
                "{family} is planar and has no axial motion; drop `k_z` (got {})",
                basis.k_z
            )));
        }
        let ms = basis.m.as_deref().filter(|m| !m.is_empty()).ok_or_else(|| {
            CliError::Validation(format!("{family} bases need a nonempty `m` list"))
        })?;
        for &n in &basis.n {
            for &m in ms {
                let half = HalfInt::from_int(m.abs());
                labels.push(CoupledLabel {
                    n,
                    l: m.unsigned_abs(),
                    s: HalfInt::ZERO,
                    j: half,
                    m: HalfInt::from_int(m),
                });
            }
        }
    } else {
        if basis.m.is_some() {
            return Err(CliError::Validation(format!(
                "the `m` list applies to well families; {family} bases enumerate all projections"
            )));
        }
        if basis.k_z != 0.0 {
            return Err(CliError::Validation(format!(
                "`k_z` applies to well families, not {family}"
            )));
        }
        let l = basis
            .l
            .ok_or_else(|| CliError::Validation(format!("{family} bases need `l`")))?;
        let s = basis
            .s
            .ok_or_else(|| CliError::Validation(format!("{family} bases need `s`")))?;
        for &n in &basis.n {
            labels.extend(couple_basis(n, l, s)?.into_iter().map(|c| c.label));
        }
    }
    for (i, a) in labels.iter().enumerate() {
        if labels[..i].contains(a) {
            return Err(CliError::Validation(format!(
                "basis repeats a label (n = {}, M = {})",
                a.n, a.m
            )));
        }
    }
    Ok(labels)
}

/// The potential with the basis `k_z` folded in: well spectra read axial
/// motion from their parameters, but the scenario keeps `k_z` under
/// `[basis]` next to the other state indices.
pub fn effective_potential(scenario: &Scenario) -> PotentialSpec {
    let mut potential = scenario.potential.clone();
    if let PotentialSpec::CylindricalWell(ref mut p) = potential {
        p.k_z = scenario.basis.k_z;
    }
    potential
}

fn complex_rows(rows: &[Vec<[f64; 2]>], what: &str) -> CliResult<DMatrix<Complex64>> {
    let dim = rows.len();
    if dim == 0 {
        return Err(CliError::Validation(format!("{what} must not be empty")));
    }
    if rows.iter().any(|r| r.len() != dim) {
        return Err(CliError::Validation(format!(
            "{what} must be square; got {dim} rows of lengths {:?}",
            rows.iter().map(Vec::len).collect::<Vec<_>>()
        )));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| {
        Complex64::new(rows[i][j][0], rows[i][j][1])
    }))
}

fn build_initial(scenario: &Scenario, labels: &[CoupledLabel]) -> CliResult<DensityMatrix> {
    let family = scenario.potential.family();
    match &scenario.initial {
        InitialSpec::Spin { n, m_l, matrix } => {
            if is_well(family) {
                return Err(CliError::Validation(format!(
                    "{family} scenarios take an `initial` of kind \"pure\"; \
                     spin blocks only make sense with `l` and `s`"
                )));
            }
            let shell = n.unwrap_or(scenario.basis.n[0]);
            if scenario.basis.n != [shell] {
                return Err(CliError::Validation(format!(
                    "spin initial data lives in a single shell n = {shell}, \
                     but the basis lists n = {:?}; use kind \"pure\" for \
                     multi-shell states",
                    scenario.basis.n
                )));
            }
            let coefficients = InitialCoefficients {
                n: shell,
                l: scenario.basis.l.expect("checked in build_labels"),
                m_l: *m_l,
                s: scenario.basis.s.expect("checked in build_labels"),
                spin_matrix: complex_rows(matrix, "initial.matrix")?,
            };
            let rho = build_rho0(&coefficients)?;
            if rho.basis() != labels {
                return Err(CliError::Validation(
                    "initial state basis does not match the scenario basis".into(),
                ));
            }
            Ok(rho)
        }
        InitialSpec::Pure { amplitudes } => {
            if amplitudes.len() != labels.len() {
                return Err(CliError::Validation(format!(
                    "initial.amplitudes has {} entries but the basis has {} labels",
                    amplitudes.len(),
                    labels.len()
                )));
            }
            let v: Vec<Complex64> = amplitudes
                .iter()
                .map(|&[re, im]| Complex64::new(re, im))
                .collect();
            let norm2: f64 = v.iter().map(|a| a.norm_sqr()).sum();
            if !(norm2.is_finite() && norm2 > 1e-24) {
                return Err(CliError::Validation(
                    "initial.amplitudes must be finite and not all zero".into(),
                ));
            }
            let dim = v.len();
            let elements =
                DMatrix::from_fn(dim, dim, |i, j| v[i] * v[j].conj() / norm2);
            Ok(DensityMatrix::new(labels.to_vec(), elements, 0.0)?)
        }
    }
}

fn resolve_times(scenario: &Scenario) -> CliResult<Vec<f64>> {
    let spec = &scenario.times;
    if let Some(list) = &spec.explicit {
        if spec.t_max.is_some() || spec.count.is_some() {
            return Err(CliError::Validation(
                "give either times.explicit or (times.t_max, times.count), not both".into(),
            ));
        }
        if list.is_empty() || list.iter().any(|t| !t.is_finite()) {
            return Err(CliError::Validation(
                "times.explicit must be a nonempty list of finite times".into(),
            ));
        }
        return Ok(list.clone());
    }
    let count = spec.count.unwrap_or(64);
    if count < 2 {
        return Err(CliError::Validation(format!(
            "times.count must be at least 2, got {count}; use times.explicit for a single instant"
        )));
    }
    let t_max = match spec.t_max {
        Some(t) => t,
        None => {
            let omega = scenario.rotation.omega_z.abs();
            if omega == 0.0 {
                return Err(CliError::Validation(
                    "omega_z = 0 has no rotation period; set times.t_max explicitly".into(),
                ));
            }
            5.0 * std::f64::consts::TAU / omega
        }
    };
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(CliError::Validation(format!(
            "times.t_max must be finite and positive, got {t_max}"
        )));
    }
    Ok((0..count)
        .map(|i| t_max * i as f64 / (count - 1) as f64)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rotequiv::spectra::Convention;

    const COULOMB: &str = r#"
        name = "demo"

        [potential]
        family = "coulomb"
        alpha = 1.0
        mass = 1.0

        [rotation]
        omega_z = 0.5

        [basis]
        n = [2]
        l = 1
        s = "1/2"

        [initial]
        kind = "spin"
        m_l = 0
        matrix = [[[0.5, 0.0], [0.25, 0.25]], [[0.25, -0.25], [0.5, 0.0]]]
    "#;

    #[test]
    fn coulomb_scenario_builds_the_full_pipeline() {
        let built = build(parse(COULOMB).unwrap()).unwrap();
        assert_eq!(built.labels.len(), 6);
        assert_eq!(built.spectrum.len(), 6);
        assert_eq!(built.times.len(), 64);
        assert_eq!(built.times[0], 0.0);
        let t_max = 5.0 * std::f64::consts::TAU / 0.5;
        assert_eq!(*built.times.last().unwrap(), t_max);
        assert_eq!(built.scenario.rotation.convention, Convention::ActiveFrame);
        assert_eq!(built.scenario.tolerances.equivalence, 1e-9);
        assert_eq!(built.scenario.energy_scale, 1.0);
        assert!((built.rho0.elements().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_potential_parse_error_names_the_field() {
        let err = parse("name = \"x\"").unwrap_err();
        match err {
            CliError::Parse(msg) => assert!(msg.contains("potential"), "{msg}"),
            other => panic!("wrong class: {other:?}"),
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = parse(&format!("turbo = true\n{COULOMB}")).unwrap_err();
        match err {
            CliError::Parse(msg) => assert!(msg.contains("turbo"), "{msg}"),
            other => panic!("wrong class: {other:?}"),
        }
        let sneaky = COULOMB.replace("n = [2]", "n = [2]\nturbo = true");
        let err = parse(&sneaky).unwrap_err();
        match err {
            CliError::Parse(msg) => assert!(msg.contains("turbo"), "{msg}"),
            other => panic!("wrong class: {other:?}"),
        }
    }

    #[test]
    fn well_scenarios_build_product_bases() {
        let text = r#"
            name = "well"

            [potential]
            family = "cylindrical-well"
            radius = 4.0
            depth = 1.0
            mass = 1.0
            regime = "rapid"

            [rotation]
            omega_z = 0.5

            [basis]
            n = [1]
            m = [0, 1]

            [initial]
            kind = "pure"
            amplitudes = [[0.7071067811865476, 0.0], [0.7071067811865476, 0.0]]
        "#;
        let built = build(parse(text).unwrap()).unwrap();
        assert_eq!(built.labels.len(), 2);
        assert_eq!(built.labels[0].m, HalfInt::ZERO);
        assert_eq!(built.labels[1].m, HalfInt::from_int(1));
        assert!(built.labels.iter().all(|l| l.s == HalfInt::ZERO));
        let off = built.rho0.elements()[(0, 1)];
        assert!((off.re - 0.5).abs() < 1e-12 && off.im.abs() < 1e-15);
    }

    #[test]
    fn validation_errors_name_the_bad_section() {
        let no_l = COULOMB.replace("l = 1\n", "");
        let err = build(parse(&no_l).unwrap()).unwrap_err();
        assert!(err.to_string().contains('`'), "{err}");
        assert_eq!(err.code(), 3);

        let with_m = COULOMB.replace("s = \"1/2\"", "s = \"1/2\"\nm = [0]");
        let err = build(parse(&with_m).unwrap()).unwrap_err();
        assert!(err.to_string().contains("well families"), "{err}");
    }

    #[test]
    fn time_grids_are_validated() {
        let both = format!("{COULOMB}\n[times]\nexplicit = [0.0]\nt_max = 1.0\ncount = 4\n");
        assert!(build(parse(&both).unwrap()).unwrap_err().to_string().contains("not both"));

        let frozen = COULOMB.replace("omega_z = 0.5", "omega_z = 0.0");
        let err = build(parse(&frozen).unwrap()).unwrap_err();
        assert!(err.to_string().contains("t_max"), "{err}");

        let short = format!("{COULOMB}\n[times]\ncount = 1\n");
        assert!(build(parse(&short).unwrap()).unwrap_err().to_string().contains("at least 2"));
    }
}
