mod common;

use std::f64::consts::{PI, TAU};

use rand::Rng;

use ptlab_core::floquet::{build_effective_hamiltonian, effective_coupling_monochromatic};
use ptlab_core::spectra::{
    eigenvalues_dense, pt_threshold, trimer_gamma_real_points, DimerizedRingSpec, ThresholdStatus, TrimerSpec,
};
use ptlab_core::{Complex64, EffectiveCoupling, LatticeSpec};

#[test]
fn spectrum_stays_real_below_threshold() {
    let families: Vec<(LatticeSpec, f64)> = vec![
        (LatticeSpec::alternating(16, 1.0, 1.0).unwrap(), 1.8412),
        (LatticeSpec::alternating(8, 1.0, 1.0).unwrap(), 2.1),
        (LatticeSpec::trimer(1.0, 1.3, 0.4, 1.0).unwrap(), 1.5),
        (LatticeSpec::dimer(1.0, 1.0).unwrap(), 0.9),
    ];
    for (profile, kappa) in families {
        let coupling = effective_coupling_monochromatic(1, kappa, 0.0).unwrap();
        let family = |g: f64| Ok(build_effective_hamiltonian(&profile.scaled_gammas(g), coupling));
        let r = pt_threshold(family, 1.0, 1e-9).unwrap();
        assert_eq!(r.status, ThresholdStatus::Broken);
        for i in 0..200 {
            let g = r.gamma_star * i as f64 / 200.0;
            let s = eigenvalues_dense(&build_effective_hamiltonian(&profile.scaled_gammas(g), coupling)).unwrap();
            assert!(s.max_abs_imag() < s.tol_im(), "N = {}, γ = {g}", profile.n_sites());
        }
    }
}

#[test]
fn alternating_chain_threshold_is_bracketed() {
    let coupling = effective_coupling_monochromatic(1, 1.8412, 0.0).unwrap();
    let profile = LatticeSpec::alternating(16, 1.0, 1.0).unwrap();
    let family = |g: f64| Ok(build_effective_hamiltonian(&profile.scaled_gammas(g), coupling));
    let r = pt_threshold(family, 1.0, 1e-9).unwrap();
    assert!(r.gamma_star > 0.1 && r.gamma_star < common::bessel(1, 1.8412));
}

#[test]
fn dimer_threshold_vanishes_at_oracle_zero() {
    let zero = common::bessel_zero(1, 3.0, 4.5);
    let coupling = effective_coupling_monochromatic(1, zero, 0.0).unwrap();
    let family = |g: f64| Ok(build_effective_hamiltonian(&LatticeSpec::dimer(1.0, g)?, coupling));
    assert!(pt_threshold(family, 1.0, 1e-9).unwrap().gamma_star < 1e-8);
}

#[test]
fn real_trimer_roots_need_vanishing_b() {
    let mut rng = common::rng(11);
    let mut real_seen = 0;
    for i in 0..3000 {
        let t1 = rng.gen_range(0.3..1.5);
        let j = rng.gen_range(0.1..0.6);
        let (t2, s, gamma) = match i % 3 {
            0 => (rng.gen_range(0.3..1.5), rng.gen_range(-2.0..2.0), rng.gen_range(0.0..1.0)),
            1 => (t1, 0.0, rng.gen_range(0.0..1.0)),
            _ => {
                let s: f64 = rng.gen_range(0.1..1.5);
                let floor = t1 * t1 * (1.0 + s).max(s * (1.0 + s));
                let t2 = (floor * rng.gen_range(1.1f64..2.0)).sqrt();
                let (_, g) = trimer_gamma_real_points(t1, t2, s, j).unwrap();
                (t2, s, g)
            }
        };
        let spec = TrimerSpec { t1, t2, s, gamma, coupling_mag: j };
        let spectrum = spec.spectrum().unwrap();
        if spectrum.is_real() {
            real_seen += 1;
            assert!(spec.coefficients().1.abs() < 1e-10, "{spec:?}");
        }
    }
    assert!(real_seen > 100);
}

#[test]
fn band_radicand_minimum_ignores_peierls_phase_on_grid() {
    let mag = common::bessel(1, 1.8412).abs();
    let grid: Vec<f64> = (0..1024).map(|i| -PI + TAU * i as f64 / 1024.0).collect();
    let minima: Vec<f64> = (0..64)
        .map(|k| {
            let theta = -PI + TAU * (16 * k) as f64 / 1024.0;
            let spec = DimerizedRingSpec {
                c: 1.6,
                t: 1.0,
                gamma: 0.2,
                coupling: EffectiveCoupling::new(Complex64::from_polar(mag, theta)),
                q: 0.0,
            };
            grid.iter().map(|&q| spec.with_q(q).radicand()).fold(f64::INFINITY, f64::min)
        })
        .collect();
    let spread = minima.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - minima.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread < 1e-10, "{spread:e}");
}
