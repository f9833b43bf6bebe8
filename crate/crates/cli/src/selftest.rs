//! Built-in oracle battery: re-derives a fixed set of analytic results
//! through deliberately independent routes (ladder-recursion coupling
//! coefficients, bisected Bessel zeros, finite-difference eigensolves,
//! dense eigendecomposition) and checks the library against them. Runs
//! without a scenario file and uses no randomness.

use nalgebra::DMatrix;
use num_complex::Complex64;

use rotequiv::angmo::{clebsch_gordan, generator_matrices};
use rotequiv::evolution::{
    build_rho0, evolve_active, evolve_passive, oracle_evolve, InitialCoefficients,
};
use rotequiv::specfun::{bessel_zero, HydrogenParams};
use rotequiv::spectra::{
    assign_spectrum, magnetic_nu_energy, radial_fd_solve, well_rapid_energy, well_slow_energy,
    Geometry, MagneticParams, PotentialSpec, RotationSpec, WellParams, WellRegime,
};
use rotequiv::HalfInt;

use crate::error::{CliError, CliResult};

struct CheckLine {
    name: &'static str,
    error: f64,
    tol: f64,
}

impl CheckLine {
    fn ok(&self) -> bool {
        self.error < self.tol
    }
}

fn check(name: &'static str, error: f64, tol: f64) -> CheckLine {
    CheckLine { name, error, tol }
}

pub fn run(quiet: bool) -> CliResult<()> {
    let checks = battery()?;
    let mut failed = 0usize;
    for c in &checks {
        if !c.ok() {
            failed += 1;
        }
        if !quiet {
            let mark = if c.ok() { "ok  " } else { "FAIL" };
            println!("{mark} {:<34} |err| {:9.3e} vs tol {:.1e}", c.name, c.error, c.tol);
        }
    }
    if failed > 0 {
        return Err(CliError::Solver(format!(
            "{failed}/{} selftest checks failed",
            checks.len()
        )));
    }
    if !quiet {
        println!("all {} selftest checks passed", checks.len());
    }
    Ok(())
}

fn battery() -> CliResult<Vec<CheckLine>> {
    let mut checks = Vec::new();
    let half = HalfInt::from_twice(1);
    let rot = RotationSpec {
        omega_z: 0.5,
        convention: Default::default(),
    };

    // Coupling coefficient <1 0; 1/2 1/2 | 3/2 1/2> against its closed form.
    let cg = clebsch_gordan(
        HalfInt::from_int(1),
        HalfInt::ZERO,
        half,
        half,
        HalfInt::from_twice(3),
        half,
    )?;
    checks.push(check("cg-spot-sqrt-2-3", (cg - (2.0f64 / 3.0).sqrt()).abs(), 1e-12));

    // First two cylindrical mode constants from the bisection oracle.
    checks.push(check("bessel-zero-x01", (bessel_zero(0, 1)? - 2.4048255577).abs(), 1e-9));
    checks.push(check("bessel-zero-x11", (bessel_zero(1, 1)? - 3.8317059702).abs(), 1e-9));

    // Spherical ground state of the attractive 1/r problem.
    let coulomb = radial_fd_solve(
        |r| -1.0 / r,
        1.0,
        Geometry::Spherical,
        60.0,
        4000,
        1,
        1e-4,
    )?;
    checks.push(check("fd-coulomb-ground", (coulomb.eigenvalues[0] + 0.5).abs(), 1e-5));

    // Hard-wall cylindrical mode, the deep-well limit: x01^2 / (2 m R^2).
    let wall = radial_fd_solve(
        |_| 0.0,
        1.0,
        Geometry::Cylindrical { m_angular: 0 },
        1.0,
        1000,
        1,
        1e-3,
    )?;
    let x01 = bessel_zero(0, 1)?;
    let wall_rel = (wall.eigenvalues[0] - x01 * x01 / 2.0).abs() / (x01 * x01 / 2.0);
    checks.push(check("fd-hard-wall-vs-bessel", wall_rel, 1e-4));

    // Finite well, slow regime: matching quantization vs the grid.
    let slow = WellParams {
        radius: 1.0,
        depth: 50.0,
        mass: 1.0,
        k_z: 0.0,
        regime: WellRegime::Slow,
    };
    let slow_rot = RotationSpec {
        omega_z: 0.3,
        convention: Default::default(),
    };
    let analytic = well_slow_energy(&slow, 0, 1, &slow_rot)?.energy;
    let fd = radial_fd_solve(
        |r| if r < 1.0 { -50.0 } else { 0.0 },
        1.0,
        Geometry::Cylindrical { m_angular: 0 },
        6.0,
        2400,
        1,
        1e-3,
    )?;
    checks.push(check(
        "fd-slow-well",
        (analytic - fd.eigenvalues[0]).abs() / analytic.abs(),
        1e-4,
    ));

    // Magnetic family with a gradient field, against the assembled operator.
    let magnetic = MagneticParams {
        alpha: 1.0,
        mass: 1.0,
        gamma: 1.0,
        q: 1.0,
        omega1: 0.0,
        omega2: 0.1,
        omega3: 0.0,
    };
    let mj = half;
    let entry = magnetic_nu_energy(&magnetic, 0, 1, half, HalfInt::from_twice(3), mj, &rot)?;
    let coup = magnetic.field_coupling();
    let fd = radial_fd_solve(
        |r| -1.0 / r + 1.0 / (r * r) - coup * 0.5 * (0.1 / r),
        1.0,
        Geometry::Spherical,
        20.0,
        12000,
        1,
        1e-3,
    )?;
    let comparable = entry.energy + 0.5 * rot.omega_z;
    checks.push(check(
        "fd-magnetic-gradient",
        (comparable - fd.eigenvalues[0]).abs() / comparable.abs(),
        1e-4,
    ));

    // Rapid-regime spectrum point frozen from the Bessel-zero substitution.
    let rapid = WellParams {
        radius: 4.0,
        depth: 1.0,
        mass: 1.0,
        k_z: 0.0,
        regime: WellRegime::Rapid,
    };
    let e = well_rapid_energy(&rapid, 0, 1, &rot)?.energy;
    checks.push(check("rapid-well-frozen-point", (e + 0.2771017546).abs(), 1e-9));

    // Planar Coulomb ground tower: E = -alpha^2 m / (2 (1 - 1/2)^2) = -2.
    let planar = radial_fd_solve(
        |r| -1.0 / r,
        1.0,
        Geometry::Cylindrical { m_angular: 0 },
        40.0,
        2000,
        1,
        1e-3,
    )?;
    checks.push(check("fd-planar-coulomb-ground", (planar.eigenvalues[0] + 2.0).abs() / 2.0, 1e-5));

    // Analytic phase evolution vs dense eigendecomposition, and the
    // active/passive time-reversal identity, on a Coulomb shell.
    let spin = DMatrix::from_row_slice(
        2,
        2,
        &[
            Complex64::new(0.5, 0.0),
            Complex64::new(0.25, 0.25),
            Complex64::new(0.25, -0.25),
            Complex64::new(0.5, 0.0),
        ],
    );
    let rho0 = build_rho0(&InitialCoefficients {
        n: 2,
        l: 1,
        m_l: 0,
        s: half,
        spin_matrix: spin,
    })?;
    let potential = PotentialSpec::Coulomb(HydrogenParams { alpha: 1.0, mass: 1.0 });
    let spectrum = assign_spectrum(&potential, rho0.basis(), &rot)?;
    let dim = rho0.basis().len();
    let h = DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            Complex64::new(spectrum[i].energy, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let mut dev_dense = 0.0_f64;
    let mut dev_reversal = 0.0_f64;
    let generators = generator_matrices(rho0.basis())?;
    let passive_rot = RotationSpec {
        omega_z: spectrum[0].omega_eff,
        convention: rot.convention,
    };
    for &t in &[0.7, 3.9, 11.3] {
        let act = evolve_active(&rho0, &spectrum, t)?;
        let dense = oracle_evolve(&rho0, &h, t)?;
        let pas = evolve_passive(&rho0, &generators, &passive_rot, -t)?;
        dev_dense = dev_dense.max(max_abs(act.elements() - dense.elements()));
        dev_reversal = dev_reversal.max(max_abs(act.elements() - pas.elements()));
    }
    checks.push(check("evolution-vs-dense-oracle", dev_dense, 1e-11));
    checks.push(check("active-equals-reversed-passive", dev_reversal, 1e-11));

    Ok(checks)
}

fn max_abs(m: DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
