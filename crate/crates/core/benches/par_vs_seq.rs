//! Parallel-vs-sequential comparison for the two batch-heavy paths: time
//! sweeps of density-matrix evolution and slow-well spectrum sweeps.
//! Run `cargo bench` for the rayon build and
//! `cargo bench --no-default-features` for the sequential baseline; the
//! group names match so the two reports line up.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::hint::black_box;

use rotequiv::angmo::couple_basis;
use rotequiv::evolution::{build_rho0, evolve_active_at_times, InitialCoefficients};
use rotequiv::spectra::{
    assign_spectrum, well_slow_energy, Convention, PotentialSpec, RotationSpec, WellParams,
    WellRegime,
};
use rotequiv::specfun::HydrogenParams;
use rotequiv::HalfInt;

fn evolution_sweep(c: &mut Criterion) {
    let omega_z = 0.5;
    let rot = RotationSpec { omega_z, convention: Convention::ActiveFrame };
    let labels: Vec<_> = couple_basis(4, 3, HalfInt::from_twice(3))
        .unwrap()
        .into_iter()
        .map(|st| st.label)
        .collect();
    let potential = PotentialSpec::Coulomb(HydrogenParams { alpha: 1.0, mass: 1.0 });
    let spectrum = assign_spectrum(&potential, &labels, &rot).unwrap();
    let coefficients = InitialCoefficients {
        n: 4,
        l: 3,
        m_l: 1,
        s: HalfInt::from_twice(3),
        spin_matrix: DMatrix::from_diagonal_element(4, 4, Complex64::new(0.25, 0.0)),
    };
    let rho0 = build_rho0(&coefficients).unwrap();
    let times: Vec<f64> = (0..512).map(|i| 0.05 * f64::from(i)).collect();
    c.bench_function("evolution_sweep_512_times", |b| {
        b.iter_batched(
            || (rho0.clone(), times.clone()),
            |(rho, ts)| black_box(evolve_active_at_times(&rho, &spectrum, &ts).unwrap()),
            BatchSize::SmallInput,
        );
    });
}

fn slow_well_sweep(c: &mut Criterion) {
    let params = WellParams {
        radius: 1.0,
        depth: 400.0,
        mass: 1.0,
        k_z: 0.0,
        regime: WellRegime::Slow,
    };
    let rot = RotationSpec { omega_z: 0.25, convention: Convention::ActiveFrame };
    // 36 bound modes, each a fresh boundary-matching root search.
    let requests: Vec<(i32, u32)> = (0..6)
        .flat_map(|m| (1..=6).map(move |n| (m, n)))
        .collect();
    c.bench_function("slow_well_spectrum_36_modes", |b| {
        b.iter(|| {
            let energies = rotequiv::batch::map_batch(&requests, |&(m, n)| {
                well_slow_energy(&params, m, n, &rot).unwrap().energy
            });
            black_box(energies)
        });
    });
}

criterion_group!(benches, evolution_sweep, slow_well_sweep);
criterion_main!(benches);
