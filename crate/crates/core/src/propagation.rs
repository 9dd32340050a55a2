//! Direct integration of `i dψ/dz = H(z) ψ` and one-period monodromy spectra.
//!
//! Integration is classical fourth-order Runge-Kutta with a fixed step, so
//! repeated runs are bit-for-bit reproducible.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{LatticeSpec, ModulationSpec};
use crate::matrix::ComplexMatrix;
use crate::spectra::eigen;

/// Default resolution, in steps per base period `2π/ω0`.
pub const DEFAULT_STEPS_PER_PERIOD: usize = 2048;

/// Minimum steps per base period accepted by [`propagate`].
pub const MIN_STEPS_PER_PERIOD: usize = 64;

/// Minimum steps per common period accepted by [`monodromy`].
pub const MIN_MONODROMY_STEPS: usize = 512;

/// Power above which integration stops with an overflow.
pub const OVERFLOW_POWER: f64 = 1e100;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
    pub z: f64,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>, z: f64) -> Result<Self> {
        let state = StateVector { amplitudes, z };
        if !(state.power() > 0.0 && state.power().is_finite()) {
            return Err(Error::domain("initial state must have finite, nonzero power"));
        }
        Ok(state)
    }

    /// All power on one zero-based site.
    pub fn localized(n_sites: usize, site: usize) -> Result<Self> {
        if site >= n_sites {
            return Err(Error::domain(format!("site {site} outside a {n_sites}-site lattice")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); n_sites];
        amplitudes[site] = Complex64::new(1.0, 0.0);
        Self::new(amplitudes, 0.0)
    }

    /// `P = Σ|ψ_n|²`.
    pub fn power(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Result of a propagation run.
#[derive(Debug, Clone, PartialEq)]
pub enum Propagated {
    Completed(StateVector),
    /// Power exceeded [`OVERFLOW_POWER`]; holds the last finite state.
    Overflow(StateVector),
}

impl Propagated {
    pub fn state(&self) -> &StateVector {
        match self {
            Propagated::Completed(s) | Propagated::Overflow(s) => s,
        }
    }

    pub fn is_overflow(&self) -> bool {
        matches!(self, Propagated::Overflow(_))
    }
}

/// RK4 stepper in the frame `ψ_n = e^{-i n Δη(z)} a_n`, `Δη = η(z) - η(z0)`,
/// where the gradient term is carried exactly by the phase and only the
/// hopping (with phases `e^{±iΔη}`) and gain/loss are integrated.
struct Stepper<'a> {
    lattice: &'a LatticeSpec,
    spec: &'a ModulationSpec,
    eta0: f64,
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl<'a> Stepper<'a> {
    fn new(lattice: &'a LatticeSpec, spec: &'a ModulationSpec, z0: f64) -> Self {
        let n = lattice.n_sites();
        let zero = vec![Complex64::new(0.0, 0.0); n];
        Stepper {
            lattice,
            spec,
            eta0: spec.eta(z0),
            k: [zero.clone(), zero.clone(), zero.clone(), zero.clone()],
            tmp: zero,
        }
    }

    fn delta_eta(&self, z: f64) -> f64 {
        self.spec.eta(z) - self.eta0
    }

    /// `out = -i H_a a` for the co-moving Hamiltonian at phase `Δη`.
    fn rhs(lattice: &LatticeSpec, delta_eta: f64, a: &[Complex64], out: &mut [Complex64]) {
        for ((o, &x), &g) in out.iter_mut().zip(a).zip(lattice.gammas()) {
            *o = Complex64::new(0.0, g) * x;
        }
        for (i, j, t) in lattice.bonds() {
            // (i, j) picks up e^{i (n_i - n_j) Δη}.
            let phase = Complex64::from_polar(t, (i as f64 - j as f64) * delta_eta);
            out[i] -= phase * a[j];
            out[j] -= phase.conj() * a[i];
        }
        for o in out.iter_mut() {
            *o = Complex64::new(o.im, -o.re);
        }
    }

    fn step(&mut self, a: &mut [Complex64], z: f64, h: f64) {
        let e0 = self.delta_eta(z);
        let em = self.delta_eta(z + 0.5 * h);
        let e1 = self.delta_eta(z + h);
        let [k1, k2, k3, k4] = &mut self.k;

        Self::rhs(self.lattice, e0, a, k1);
        for ((t, p), k) in self.tmp.iter_mut().zip(a.iter()).zip(k1.iter()) {
            *t = p + 0.5 * h * k;
        }
        Self::rhs(self.lattice, em, &self.tmp, k2);
        for ((t, p), k) in self.tmp.iter_mut().zip(a.iter()).zip(k2.iter()) {
            *t = p + 0.5 * h * k;
        }
        Self::rhs(self.lattice, em, &self.tmp, k3);
        for ((t, p), k) in self.tmp.iter_mut().zip(a.iter()).zip(k3.iter()) {
            *t = p + h * k;
        }
        Self::rhs(self.lattice, e1, &self.tmp, k4);
        let sixth = h / 6.0;
        for (i, p) in a.iter_mut().enumerate() {
            *p += sixth * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }

    /// Lab-frame state from co-moving amplitudes at `z`.
    fn to_lab(&self, a: &[Complex64], z: f64) -> Vec<Complex64> {
        let d = self.delta_eta(z);
        a.iter()
            .enumerate()
            .map(|(i, &x)| x * Complex64::from_polar(1.0, -((i + 1) as f64) * d))
            .collect()
    }
}

/// Integrates from `psi0.z` to `z_end` in `steps` equal steps.
pub fn propagate(
    lattice: &LatticeSpec,
    spec: &ModulationSpec,
    psi0: &StateVector,
    z_end: f64,
    steps: usize,
) -> Result<Propagated> {
    propagate_observed(lattice, spec, psi0, z_end, steps, 0, |_| {})
}

/// Like [`propagate`], calling `observe` with the initial state and then
/// after every `stride` steps (never when `stride == 0`). The final state is
/// always observed when `stride > 0`.
pub fn propagate_observed<F>(
    lattice: &LatticeSpec,
    spec: &ModulationSpec,
    psi0: &StateVector,
    z_end: f64,
    steps: usize,
    stride: usize,
    mut observe: F,
) -> Result<Propagated>
where
    F: FnMut(&StateVector),
{
    if psi0.amplitudes.len() != lattice.n_sites() {
        return Err(Error::domain(format!(
            "state has {} amplitudes for a {}-site lattice",
            psi0.amplitudes.len(),
            lattice.n_sites()
        )));
    }
    if !z_end.is_finite() {
        return Err(Error::domain("end position must be finite"));
    }
    let span = z_end - psi0.z;
    let periods = span.abs() / spec.base_period();
    let required = (MIN_STEPS_PER_PERIOD as f64 * periods).ceil().max(1.0) as usize;
    if steps < required {
        return Err(Error::domain(format!(
            "{steps} steps over {periods:.3} periods; at least {MIN_STEPS_PER_PERIOD} per period ({required}) required"
        )));
    }

    let h = span / steps as f64;
    let mut stepper = Stepper::new(lattice, spec, psi0.z);
    // Co-moving and lab frames coincide at the start.
    let mut amplitudes = psi0.amplitudes.clone();
    let mut state = psi0.clone();
    if stride > 0 {
        observe(&state);
    }
    for i in 0..steps {
        let z = psi0.z + i as f64 * h;
        let previous = amplitudes.clone();
        stepper.step(&mut amplitudes, z, h);
        let power: f64 = amplitudes.iter().map(|x| x.norm_sqr()).sum();
        if !(power.is_finite() && power <= OVERFLOW_POWER) {
            state = StateVector {
                amplitudes: stepper.to_lab(&previous, z),
                z,
            };
            return Ok(Propagated::Overflow(state));
        }
        let last = i + 1 == steps;
        let z_next = if last { z_end } else { psi0.z + (i + 1) as f64 * h };
        if last || (stride > 0 && (i + 1) % stride == 0) {
            state = StateVector {
                amplitudes: stepper.to_lab(&amplitudes, z_next),
                z: z_next,
            };
            if stride > 0 {
                observe(&state);
            }
        }
    }
    Ok(Propagated::Completed(state))
}

/// One-period propagator and its quasi-energies.
#[derive(Debug, Clone, PartialEq)]
pub struct MonodromyResult {
    pub matrix: ComplexMatrix,
    /// Common period `Z`.
    pub period: f64,
    /// `ε = (i/Z) Log λ`, real parts in `(-π/Z, π/Z]`, sorted by `(re, im)`.
    pub quasi_energies: Vec<Complex64>,
}

impl MonodromyResult {
    /// Width `2π/Z` of the quasi-energy zone.
    pub fn zone_width(&self) -> f64 {
        TAU / self.period
    }
}

/// Propagates the identity over one common period in `steps` steps.
pub fn monodromy(lattice: &LatticeSpec, spec: &ModulationSpec, steps: usize) -> Result<MonodromyResult> {
    let period = spec.common_period().ok_or_else(|| {
        Error::domain("monodromy needs a periodic gradient; an irrational tone has no exact period")
    })?;
    if steps < MIN_MONODROMY_STEPS {
        return Err(Error::domain(format!(
            "monodromy needs at least {MIN_MONODROMY_STEPS} steps, got {steps}"
        )));
    }
    let n = lattice.n_sites();
    let columns: Vec<Result<Vec<Complex64>>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let start = StateVector::localized(n, j)?;
            match propagate(lattice, spec, &start, period, steps)? {
                Propagated::Completed(s) => Ok(s.amplitudes),
                Propagated::Overflow(s) => Err(Error::Overflow { z: s.z }),
            }
        })
        .collect();
    let mut matrix = ComplexMatrix::zeros(n);
    for (j, col) in columns.into_iter().enumerate() {
        matrix.set_column(j, &col?);
    }

    let mut quasi_energies: Vec<Complex64> = eigen::eigenvalues(&matrix)?
        .into_iter()
        .map(|lambda| quasi_energy(lambda, period))
        .collect();
    quasi_energies.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(MonodromyResult {
        matrix,
        period,
        quasi_energies,
    })
}

/// `(i/Z) Log λ` with the real part folded into `(-π/Z, π/Z]`.
fn quasi_energy(lambda: Complex64, period: f64) -> Complex64 {
    let arg = lambda.arg();
    let mut re = -arg / period;
    if arg == PI {
        re = PI / period;
    }
    Complex64::new(re, lambda.norm().ln() / period)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::floquet::{build_effective_hamiltonian, effective_coupling_monochromatic};
    use crate::spectra::{eigenvalues_dense, pairing_distance};

    #[test]
    fn rabi_flop() {
        let lattice = LatticeSpec::dimer(1.0, 0.0).unwrap();
        let spec = ModulationSpec::new(0, 1.0, vec![]).unwrap();
        let psi0 = StateVector::localized(2, 0).unwrap();
        let out = propagate(&lattice, &spec, &psi0, PI / 2.0, 4096).unwrap();
        let psi = &out.state().amplitudes;
        assert!((psi[1].norm_sqr() - 1.0).abs() < 1e-12);
        // ψ2(z) = i sin z
        assert!((psi[1] - Complex64::new(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn hermitian_power_is_conserved() {
        let lattice = LatticeSpec::alternating(6, 1.0, 0.0).unwrap();
        let spec = ModulationSpec::monochromatic(1, 10.0, 1.5, 0.3).unwrap();
        let psi0 = StateVector::localized(6, 2).unwrap();
        let z_end = 10.0 * spec.base_period();
        let out = propagate(&lattice, &spec, &psi0, z_end, 10 * DEFAULT_STEPS_PER_PERIOD).unwrap();
        assert!((out.state().power() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn too_few_steps_is_rejected() {
        let lattice = LatticeSpec::dimer(1.0, 0.0).unwrap();
        let spec = ModulationSpec::monochromatic(1, 10.0, 1.0, 0.0).unwrap();
        let psi0 = StateVector::localized(2, 0).unwrap();
        let z_end = 4.0 * spec.base_period();
        assert!(propagate(&lattice, &spec, &psi0, z_end, 100).is_err());
        assert!(propagate(&lattice, &spec, &psi0, z_end, 256).is_ok());
        let wrong = StateVector::localized(3, 0).unwrap();
        assert!(propagate(&lattice, &spec, &wrong, z_end, 256).is_err());
        assert!(StateVector::new(vec![Complex64::new(0.0, 0.0); 2], 0.0).is_err());
    }

    #[test]
    fn runaway_growth_reports_overflow() {
        let lattice = LatticeSpec::dimer(1.0, 40.0).unwrap();
        let spec = ModulationSpec::new(1, 100.0, vec![]).unwrap();
        let psi0 = StateVector::localized(2, 0).unwrap();
        let z_end = 5.0;
        let steps = 200_000;
        let out = propagate(&lattice, &spec, &psi0, z_end, steps).unwrap();
        assert!(out.is_overflow());
        assert!(out.state().power().is_finite());
        assert!(out.state().z < z_end);
    }

    #[test]
    fn observer_sees_stride_and_final_state() {
        let lattice = LatticeSpec::dimer(1.0, 0.0).unwrap();
        let spec = ModulationSpec::new(0, 1.0, vec![]).unwrap();
        let psi0 = StateVector::localized(2, 0).unwrap();
        let mut zs = Vec::new();
        propagate_observed(&lattice, &spec, &psi0, 1.0, 100, 30, |s| zs.push(s.z)).unwrap();
        assert_eq!(zs.len(), 1 + 3 + 1);
        assert_eq!(zs[0], 0.0);
        assert!((zs.last().unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn constant_hamiltonian_quasi_energies_are_eigenvalues() {
        let lattice = LatticeSpec::trimer(1.0, 0.6, 0.5, 0.1).unwrap();
        let spec = ModulationSpec::new(0, 4.0, vec![]).unwrap();
        let m = monodromy(&lattice, &spec, 2048).unwrap();
        let h = lattice.hamiltonian_with_gradient(0.0);
        let e = eigenvalues_dense(&h).unwrap();
        assert!(pairing_distance(&m.quasi_energies, e.eigenvalues()) < 1e-9);
    }

    #[test]
    fn unitary_monodromy_without_gain_loss() {
        let lattice = LatticeSpec::dimer(1.0, 0.0).unwrap();
        let spec = ModulationSpec::monochromatic(1, 20.0, 1.8412, 0.0).unwrap();
        let m = monodromy(&lattice, &spec, DEFAULT_STEPS_PER_PERIOD).unwrap();
        for e in eigen::eigenvalues(&m.matrix).unwrap() {
            assert!((e.norm() - 1.0).abs() < 1e-8);
        }
        let udu = m.matrix.conj_transpose().matmul(&m.matrix);
        assert!(udu.max_abs_diff(&ComplexMatrix::identity(2)) < 1e-8);
    }

    #[test]
    fn monodromy_rejects_irrational_and_coarse() {
        let lattice = LatticeSpec::dimer(1.0, 0.0).unwrap();
        let quasi = ModulationSpec::bichromatic(
            1,
            10.0,
            (1.0, 0.0),
            crate::floquet::Beta::Irrational(2f64.sqrt()),
            (1.0, 0.0),
        )
        .unwrap();
        assert!(monodromy(&lattice, &quasi, 4096).is_err());
        let mono = ModulationSpec::monochromatic(1, 10.0, 1.0, 0.0).unwrap();
        assert!(monodromy(&lattice, &mono, 100).is_err());
    }

    #[test]
    fn high_frequency_dimer_matches_effective_spectrum() {
        let gamma = 0.3;
        let lattice = LatticeSpec::dimer(1.0, gamma).unwrap();
        let spec = ModulationSpec::monochromatic(1, 100.0, 1.8412, 0.0).unwrap();
        let m = monodromy(&lattice, &spec, DEFAULT_STEPS_PER_PERIOD).unwrap();
        let coupling = effective_coupling_monochromatic(1, 1.8412, 0.0).unwrap();
        let eff = eigenvalues_dense(&build_effective_hamiltonian(&lattice, coupling)).unwrap();
        assert!(pairing_distance(&m.quasi_energies, eff.eigenvalues()) < 0.03);
    }

    #[test]
    fn quasi_energy_folding() {
        let z = 0.5;
        let e = quasi_energy(Complex64::from_polar(2.0, -PI), z);
        assert!((e.re - PI / z).abs() < 1e-12);
        let e = quasi_energy(Complex64::from_polar(1.0, -0.3), z);
        assert!((e - Complex64::new(0.6, 0.0)).norm() < 1e-12);
    }
}
