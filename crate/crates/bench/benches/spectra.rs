use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ptlab_bench::{alternating_chain, dimer_phase_diagram, kappa_scan};
use ptlab_core::floquet::{
    build_effective_hamiltonian, effective_coupling_monochromatic, effective_coupling_numeric,
};
use ptlab_core::propagation::{monodromy, DEFAULT_STEPS_PER_PERIOD};
use ptlab_core::scan;
use ptlab_core::special::bessel_j_batch;
use ptlab_core::spectra::{eigen, pt_threshold};
use ptlab_core::{LatticeSpec, ModulationSpec};

fn bessel(c: &mut Criterion) {
    let mut group = c.benchmark_group("bessel_batch");
    for x in [1.8412, 50.0, 1000.0] {
        group.bench_with_input(BenchmarkId::from_parameter(x), &x, |b, &x| {
            b.iter(|| bessel_j_batch(80, black_box(x)).unwrap())
        });
    }
    group.finish();
}

fn eigenvalues(c: &mut Criterion) {
    let mut group = c.benchmark_group("eigenvalues");
    for n in [2, 16, 64] {
        let h = alternating_chain(n, 1.8412, 0.1);
        group.bench_with_input(BenchmarkId::from_parameter(n), &h, |b, h| {
            b.iter(|| eigen::eigenvalues(black_box(h)).unwrap())
        });
    }
    group.finish();
}

fn scans(c: &mut Criterion) {
    let scan_config = kappa_scan(401);
    c.bench_function("scan_kappa_16_sites_401_points", |b| {
        b.iter(|| scan::scan_kappa(black_box(&scan_config)).unwrap())
    });
    let diagram = dimer_phase_diagram(100);
    c.bench_function("dimer_phase_diagram_100x100", |b| {
        b.iter(|| scan::run_phase_diagram(black_box(&diagram)).unwrap())
    });
}

fn threshold(c: &mut Criterion) {
    let profile = LatticeSpec::alternating(16, 1.0, 1.0).unwrap();
    let coupling = effective_coupling_monochromatic(1, 1.8412, 0.0).unwrap();
    c.bench_function("pt_threshold_16_sites", |b| {
        b.iter(|| {
            let family = |g: f64| {
                Ok(build_effective_hamiltonian(&profile.scaled_gammas(g), coupling))
            };
            pt_threshold(family, 1.0, 1e-9).unwrap()
        })
    });
}

fn dynamics(c: &mut Criterion) {
    let spec = ModulationSpec::monochromatic(1, 50.0, 1.8412, 0.0).unwrap();
    let mut group = c.benchmark_group("monodromy");
    group.sample_size(10);
    for n in [2, 16] {
        let lattice = LatticeSpec::alternating(n, 1.0, 0.1).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &lattice, |b, lattice| {
            b.iter(|| monodromy(lattice, &spec, DEFAULT_STEPS_PER_PERIOD).unwrap())
        });
    }
    group.finish();
    c.bench_function("averaging_oracle_one_period", |b| {
        b.iter(|| effective_coupling_numeric(black_box(&spec), 1, 4096).unwrap())
    });
}

criterion_group!(benches, bessel, eigenvalues, scans, threshold, dynamics);
criterion_main!(benches);
