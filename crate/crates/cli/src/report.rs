//! Pipeline output: the report bundle, its oracle cross-checks, and the
//! file emitters.
//!
//! Emission is deterministic: rows follow basis order, time grids come from
//! the scenario, floats render with 17 significant digits, and nothing
//! depends on wall clock or environment, so rerunning a scenario reproduces
//! every output byte for byte.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use rotequiv::angmo::CoupledLabel;
use rotequiv::equivalence::{compare_evolutions, EquivalenceReport};
use rotequiv::evolution::{evolve_active, evolve_passive, oracle_evolve, trace_distance};
use rotequiv::spectra::{
    radial_fd_solve, Convention, Geometry, PotentialSpec, RotationSpec, SpectrumEntry,
    WellRegime,
};

use crate::error::{CliError, CliResult};
use crate::scenario::{self, Built, Scenario};

#[derive(Debug, Serialize)]
pub struct ToolInfo {
    pub name: &'static str,
    pub version: &'static str,
    pub phase_convention: &'static str,
    pub comparison: &'static str,
}

impl ToolInfo {
    fn current() -> Self {
        ToolInfo {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            phase_convention: "rho(t) = exp(+iHt) rho(0) exp(-iHt)",
            comparison: "active-frame: active(+t) vs passive(-t); passive-frame: both at +t",
        }
    }
}

/// One analytic level checked against the finite-difference eigensolver.
/// `analytic` and `numerical` are the rotation-stripped lab energies
/// (E + M omega_z), which is what the radial operator actually produces.
#[derive(Debug, Serialize)]
pub struct EnergyCheck {
    pub label: String,
    pub grid: String,
    pub analytic: f64,
    pub numerical: f64,
    pub abs_error: f64,
    pub rel_error: f64,
    pub tolerance_rel: f64,
    pub within: bool,
    pub richardson_drift: f64,
    pub accuracy_warning: bool,
}

/// Analytic phase evolution checked against dense eigendecomposition.
#[derive(Debug, Serialize)]
pub struct EvolutionCheck {
    pub times_checked: usize,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub within: bool,
}

#[derive(Debug, Serialize)]
pub struct OracleSummary {
    pub energy_checks: Vec<EnergyCheck>,
    pub evolution: EvolutionCheck,
}

#[derive(Debug, Serialize)]
pub struct SpectrumRow {
    #[serde(flatten)]
    pub entry: SpectrumEntry,
    /// `energy * energy_scale`, the value the spectrum CSV reports.
    pub energy_scaled: f64,
    pub stripped_energy: f64,
}

#[derive(Debug, Serialize)]
pub struct ReportBundle {
    pub tool: ToolInfo,
    pub scenario: Scenario,
    pub spectrum: Vec<SpectrumRow>,
    pub equivalence: EquivalenceReport,
    pub oracle: OracleSummary,
}

pub fn load(path: &Path) -> CliResult<Built> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    scenario::build(scenario::parse(&text)?)
}

/// Parses, validates, and runs the full pipeline for one scenario file.
pub fn run_scenario(path: &Path, tol_flag: Option<f64>) -> CliResult<(Built, ReportBundle)> {
    let built = load(path)?;
    let bundle = make_bundle(&built, tol_flag)?;
    Ok((built, bundle))
}

pub fn make_bundle(built: &Built, tol_flag: Option<f64>) -> CliResult<ReportBundle> {
    let tol = built.equivalence_tol(tol_flag);
    let equivalence = compare_evolutions(
        &built.rho0,
        &built.spectrum,
        &built.generators,
        &built.scenario.rotation,
        &built.times,
        tol,
    )?;
    let oracle = OracleSummary {
        energy_checks: oracle_energy_checks(built)?,
        evolution: oracle_evolution_check(built, tol)?,
    };
    let spectrum = built
        .spectrum
        .iter()
        .map(|e| SpectrumRow {
            entry: e.clone(),
            energy_scaled: e.energy * built.scenario.energy_scale,
            stripped_energy: e.stripped_energy(),
        })
        .collect();
    Ok(ReportBundle {
        tool: ToolInfo::current(),
        scenario: built.scenario.clone(),
        spectrum,
        equivalence,
        oracle,
    })
}

fn check_row(
    label: String,
    grid: String,
    analytic: f64,
    numerical: f64,
    drift: f64,
    warn: bool,
    tol_rel: f64,
) -> EnergyCheck {
    let abs_error = (analytic - numerical).abs();
    let rel_error = abs_error / analytic.abs().max(1e-12);
    EnergyCheck {
        label,
        grid,
        analytic,
        numerical,
        abs_error,
        rel_error,
        tolerance_rel: tol_rel,
        within: rel_error <= tol_rel,
        richardson_drift: drift,
        accuracy_warning: warn,
    }
}

/// Lab energy with the rotation term stripped: what the radial operator
/// sees. Uses omega_z (not omega_eff) because field-induced shifts live
/// inside the potential the solver is handed.
fn comparable(e: &SpectrumEntry) -> f64 {
    e.energy + e.label.m.as_f64() * e.omega_z
}

/// Re-derives one representative level per distinct radial problem in the
/// spectrum with the finite-difference eigensolver. Grid recipes are fixed
/// functions of the scenario, so reruns are bit-identical.
fn oracle_energy_checks(built: &Built) -> CliResult<Vec<EnergyCheck>> {
    let tol_rel = built.scenario.tolerances.oracle;
    let potential = scenario::effective_potential(&built.scenario);
    let entries = &built.spectrum;
    let mut checks = Vec::new();
    match &potential {
        PotentialSpec::Coulomb(p) => {
            let keys: BTreeSet<(u32, u32)> =
                entries.iter().map(|e| (e.label.n, e.label.l)).collect();
            for (n, l) in keys {
                let e = entries
                    .iter()
                    .find(|e| e.label.n == n && e.label.l == l)
                    .expect("key came from entries");
                let analytic = comparable(e);
                let bohr = 1.0 / (p.alpha * p.mass);
                let r_max = 15.0 * (n * n) as f64 * bohr;
                let pts = (2000 + 1000 * (n * n) as usize).min(9000);
                let k = (n - l) as usize;
                let lam = (l * (l + 1)) as f64 / (2.0 * p.mass);
                let alpha = p.alpha;
                let out = radial_fd_solve(
                    |r| -alpha / r + lam / (r * r),
                    p.mass,
                    Geometry::Spherical,
                    r_max,
                    pts,
                    k,
                    drift_budget(tol_rel, analytic),
                )?;
                checks.push(check_row(
                    format!("coulomb n={n} l={l}"),
                    format!("spherical r_max={r_max} points={pts}"),
                    analytic,
                    out.eigenvalues[k - 1],
                    out.drift[k - 1],
                    out.accuracy_warning,
                    tol_rel,
                ));
            }
        }
        PotentialSpec::MagneticCoulomb(p) => {
            let keys: BTreeSet<(u32, u32, i32)> = entries
                .iter()
                .map(|e| (e.extra_index, e.label.l, e.label.m.twice()))
                .collect();
            for (n_r, l, m_twice) in keys {
                let e = entries
                    .iter()
                    .find(|e| {
                        e.extra_index == n_r && e.label.l == l && e.label.m.twice() == m_twice
                    })
                    .expect("key came from entries");
                let analytic = comparable(e);
                let mj = e.label.m.as_f64();
                let coup = p.field_coupling();
                let (alpha, o1, o2, o3) = (p.alpha, p.omega1, p.omega2, p.omega3);
                let lam = (l * (l + 1)) as f64 / (2.0 * p.mass);
                // Field terms can leave a level weakly bound, and its tail
                // r^nu exp(-kappa r) then reaches far past the bare Bohr
                // radius; size the box from the analytic decay constant so
                // truncation stays below the grid error.
                let kappa = (2.0 * p.mass * analytic.abs()).sqrt();
                let nu = (n_r + l + 1) as f64;
                let r_max = ((12.5 + 3.0 * nu) / kappa).min(2000.0 / (p.alpha * p.mass));
                let pts = 24000;
                let k = n_r as usize + 1;
                let out = radial_fd_solve(
                    |r| -alpha / r + lam / (r * r) - coup * mj * (o1 + o2 / r + o3 / (r * r)),
                    p.mass,
                    Geometry::Spherical,
                    r_max,
                    pts,
                    k,
                    drift_budget(tol_rel, analytic),
                )?;
                checks.push(check_row(
                    format!("magnetic-coulomb n_r={n_r} l={l} M_J={}", e.label.m),
                    format!("spherical r_max={r_max} points={pts}"),
                    analytic,
                    out.eigenvalues[k - 1],
                    out.drift[k - 1],
                    out.accuracy_warning,
                    tol_rel,
                ));
            }
        }
        PotentialSpec::CylindricalWell(p) => {
            let keys: BTreeSet<(u32, u32)> =
                entries.iter().map(|e| (e.label.n, e.label.l)).collect();
            let axial = p.k_z * p.k_z / (2.0 * p.mass);
            for (n, m_abs) in keys {
                let e = entries
                    .iter()
                    .find(|e| e.label.n == n && e.label.l == m_abs)
                    .expect("key came from entries");
                let analytic = comparable(e);
                let depth = p.depth;
                let (r_max, pts, grid_name) = match p.regime {
                    WellRegime::Slow => (6.0 * p.radius, 2400, "interior+tail"),
                    // The rapid regime quantizes inside the rotational
                    // radius 1/|omega|; the grid truncation at r_max is
                    // exactly that wall.
                    WellRegime::Rapid => {
                        (1.0 / built.scenario.rotation.omega_z.abs(), 2000, "wall")
                    }
                };
                let radius = p.radius;
                let out = radial_fd_solve(
                    |r| if r < radius { -depth } else { 0.0 },
                    p.mass,
                    Geometry::Cylindrical {
                        m_angular: m_abs as i32,
                    },
                    r_max,
                    pts,
                    n as usize,
                    drift_budget(tol_rel, analytic),
                )?;
                checks.push(check_row(
                    format!("cylindrical-well |M|={m_abs} n={n}"),
                    format!("cylindrical({grid_name}) r_max={r_max} points={pts}"),
                    analytic,
                    out.eigenvalues[n as usize - 1] + axial,
                    out.drift[n as usize - 1],
                    out.accuracy_warning,
                    tol_rel,
                ));
            }
        }
        PotentialSpec::CoulombWell(p) => {
            let keys: BTreeSet<(u32, u32)> =
                entries.iter().map(|e| (e.extra_index, e.label.l)).collect();
            for (resolved, m_abs) in keys {
                let e = entries
                    .iter()
                    .find(|e| e.extra_index == resolved && e.label.l == m_abs)
                    .expect("key came from entries");
                let analytic = comparable(e);
                let bohr = 1.0 / (p.alpha * p.mass);
                let r_max = 20.0 * resolved.max(2) as f64 * bohr;
                let pts = 1000 * (resolved as usize + 1);
                let k = (resolved - m_abs) as usize;
                let alpha = p.alpha;
                let out = radial_fd_solve(
                    |r| -alpha / r,
                    p.mass,
                    Geometry::Cylindrical {
                        m_angular: m_abs as i32,
                    },
                    r_max,
                    pts,
                    k,
                    drift_budget(tol_rel, analytic),
                )?;
                checks.push(check_row(
                    format!("coulomb-well n'={resolved} |M|={m_abs}"),
                    format!("cylindrical r_max={r_max} points={pts}"),
                    analytic,
                    out.eigenvalues[k - 1],
                    out.drift[k - 1],
                    out.accuracy_warning,
                    tol_rel,
                ));
            }
        }
    }
    Ok(checks)
}

fn drift_budget(tol_rel: f64, analytic: f64) -> f64 {
    (10.0 * tol_rel * analytic.abs()).max(1e-8)
}

/// Checks the analytic phase evolution against dense eigendecomposition at
/// up to nine of the sampled times.
fn oracle_evolution_check(built: &Built, tol: f64) -> CliResult<EvolutionCheck> {
    let dim = built.labels.len();
    let h = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(built.spectrum[i].energy, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let step = (built.times.len() / 8).max(1);
    let mut max_deviation = 0.0_f64;
    let mut times_checked = 0;
    for &t in built.times.iter().step_by(step) {
        let analytic = evolve_active(&built.rho0, &built.spectrum, t)?;
        let dense = oracle_evolve(&built.rho0, &h, t)?;
        let dev = (analytic.elements() - dense.elements())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        max_deviation = max_deviation.max(dev);
        times_checked += 1;
    }
    Ok(EvolutionCheck {
        times_checked,
        max_deviation,
        tolerance: tol,
        within: max_deviation <= tol,
    })
}

fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

/// Label rendered without commas so it can sit inside a CSV field.
pub fn label_text(label: &CoupledLabel) -> String {
    format!(
        "n={} l={} s={} J={} M={}",
        label.n, label.l, label.s, label.j, label.m
    )
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_os_string();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_report_json(path: &Path, bundle: &ReportBundle) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(bundle)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_spectrum_csv(path: &Path, built: &Built) -> CliResult<()> {
    let mut out = String::from("family,n,l,s,J,M,extra_index,k_z,omega,E\n");
    let scale = built.scenario.energy_scale;
    for e in &built.spectrum {
        let l = &e.label;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            e.family,
            l.n,
            l.l,
            l.s,
            l.j,
            l.m,
            e.extra_index,
            sci(e.k_z),
            sci(e.omega_z),
            sci(e.energy * scale)
        )
        .expect("writing to a String cannot fail");
    }
    write_text(path, &out)
}

pub fn write_evolution_csv(path: &Path, built: &Built) -> CliResult<()> {
    let out = render_evolution_csv(built)?;
    write_text(path, &out)
}

fn render_evolution_csv(built: &Built) -> CliResult<String> {
    let rot = &built.scenario.rotation;
    let passive_rot = RotationSpec {
        omega_z: built.spectrum[0].omega_eff,
        convention: rot.convention,
    };
    let direction = match rot.convention {
        Convention::ActiveFrame => -1.0,
        Convention::PassiveFrame => 1.0,
    };
    let names: Vec<String> = built.labels.iter().map(label_text).collect();
    let mut out = String::from(
        "t,row_label,col_label,re_active,im_active,re_passive,im_passive,abs_diff,trace_distance\n",
    );
    for &t in &built.times {
        let act = evolve_active(&built.rho0, &built.spectrum, t)?;
        let pas = evolve_passive(&built.rho0, &built.generators, &passive_rot, direction * t)?;
        let td = trace_distance(&act, &pas)?;
        let (a, p) = (act.elements(), pas.elements());
        for i in 0..names.len() {
            for j in 0..names.len() {
                let (x, y) = (a[(i, j)], p[(i, j)]);
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{},{}",
                    sci(t),
                    names[i],
                    names[j],
                    sci(x.re),
                    sci(x.im),
                    sci(y.re),
                    sci(y.im),
                    sci((x - y).norm()),
                    sci(td)
                )
                .expect("writing to a String cannot fail");
            }
        }
    }
    Ok(out)
}

/// Writes the three artifacts for a prefix and returns their paths.
pub fn emit_outputs(built: &Built, bundle: &ReportBundle, prefix: &Path) -> CliResult<Vec<PathBuf>> {
    let report = with_suffix(prefix, ".report.json");
    let spectrum = with_suffix(prefix, ".spectrum.csv");
    let evolution = with_suffix(prefix, ".evolution.csv");
    write_report_json(&report, bundle)?;
    write_spectrum_csv(&spectrum, built)?;
    write_evolution_csv(&evolution, built)?;
    Ok(vec![report, spectrum, evolution])
}

pub fn print_summary(bundle: &ReportBundle, written: &[PathBuf]) {
    let eq = &bundle.equivalence;
    println!("scenario: {} ({})", bundle.scenario.name, eq.family);
    println!(
        "criterion: {}  (stripped-energy spread {:.3e}, tol {:.1e})",
        eq.verdict_criterion, eq.max_criterion_spread, eq.tolerance
    );
    println!(
        "dynamics:  {}  (max trace distance {:.3e}, max phase error {:.3e} rad, tol {:.1e})",
        eq.verdict_dynamical, eq.max_trace_distance, eq.max_element_phase_error, eq.tolerance
    );
    println!(
        "verdicts agree: {}; cross-shell coherence: {}",
        eq.verdicts_agree, eq.cross_shell_coherences
    );
    let ok = bundle.oracle.energy_checks.iter().filter(|c| c.within).count();
    let total = bundle.oracle.energy_checks.len();
    let ev = &bundle.oracle.evolution;
    println!(
        "oracle: {ok}/{total} energy checks within {:.1e} relative; \
         evolution deviates {:.3e} over {} times (tol {:.1e})",
        bundle
            .oracle
            .energy_checks
            .first()
            .map_or(bundle.scenario.tolerances.oracle, |c| c.tolerance_rel),
        ev.max_deviation,
        ev.times_checked,
        ev.tolerance
    );
    for path in written {
        println!("wrote: {}", path.display());
    }
}

pub fn print_spectrum(built: &Built) {
    println!(
        "{:<16} {:>3} {:>3} {:>5} {:>5} {:>5} {:>6} {:>13} {:>13} {:>24}",
        "family", "n", "l", "s", "J", "M", "extra", "k_z", "omega", "E"
    );
    for e in &built.spectrum {
        let l = &e.label;
        println!(
            "{:<16} {:>3} {:>3} {:>5} {:>5} {:>5} {:>6} {:>13.6e} {:>13.6e} {:>24.16e}",
            e.family.to_string(),
            l.n,
            l.l,
            l.s.to_string(),
            l.j.to_string(),
            l.m.to_string(),
            e.extra_index,
            e.k_z,
            e.omega_z,
            e.energy * built.scenario.energy_scale
        );
    }
}

/// Max elementwise gap and trace distance between the two prescriptions
/// over the scenario's time grid, for the `evolve` summary line.
pub fn evolution_extremes(built: &Built) -> CliResult<(f64, f64)> {
    let rot = &built.scenario.rotation;
    let passive_rot = RotationSpec {
        omega_z: built.spectrum[0].omega_eff,
        convention: rot.convention,
    };
    let direction = match rot.convention {
        Convention::ActiveFrame => -1.0,
        Convention::PassiveFrame => 1.0,
    };
    let mut max_abs = 0.0_f64;
    let mut max_td = 0.0_f64;
    for &t in &built.times {
        let act = evolve_active(&built.rho0, &built.spectrum, t)?;
        let pas = evolve_passive(&built.rho0, &built.generators, &passive_rot, direction * t)?;
        max_td = max_td.max(trace_distance(&act, &pas)?);
        let diff = act.elements() - pas.elements();
        max_abs = max_abs.max(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    Ok((max_abs, max_td))
}
