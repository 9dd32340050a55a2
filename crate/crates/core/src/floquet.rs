//! High-frequency effective couplings.
//!
//! In the high-frequency limit each bond's tunneling is renormalised by the
//! `z`-average of `e^{iη(z)}`. Expanding with Jacobi-Anger, only the terms
//! whose total frequency `l + n + mβ` vanishes survive the average, which
//! gives closed forms for the monochromatic and bichromatic gradients:
//!
//! ```text
//! mono:           J_{-l}(κ) e^{-ilφ}
//! bi, β = p/q:    e^{-ilφ1} Σ_k e^{iqk(φ2 - βφ1)} J_{-l-pk}(κ1) J_{qk}(κ2/β)
//! bi, irrational: J_{-l}(κ1) J_0(κ2/β) e^{-ilφ1}
//! ```
//!
//! The closed forms leave out the constant `-Σ (κ_i/β_i) sin φ_i` that the
//! lower integration limit adds to `η`. [`effective_coupling_numeric`]
//! integrates `e^{iη}` directly and reports both the raw average and the
//! value with that unit-modulus factor divided out, which is what the closed
//! forms should be compared against.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{gcd, LatticeSpec, ModulationSpec};
use crate::matrix::ComplexMatrix;
use crate::special::{self, BesselTable};

/// Default quadrature resolution for the averaging oracle.
pub const DEFAULT_STEPS_PER_PERIOD: usize = 4096;

/// Below this many steps per period the oracle flags its result.
pub const MIN_ACCURATE_STEPS: usize = 64;

/// Terms where both Bessel factors are below this are skipped.
const NEGLIGIBLE_TERM: f64 = 1e-15;

/// `β = p/q` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalBeta {
    p: u64,
    q: u64,
}

impl RationalBeta {
    /// Reduces `p/q` to lowest terms; both must be positive.
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::domain(format!(
                "rational frequency ratio needs positive integers, got {p}/{q}"
            )));
        }
        let g = gcd(p, q);
        Ok(RationalBeta { p: p / g, q: q / g })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn value(&self) -> f64 {
        self.p as f64 / self.q as f64
    }
}

/// A tone's frequency ratio, tagged by the caller as rational or irrational.
///
/// Irrationality is never inferred from a floating-point value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Beta {
    Rational(RationalBeta),
    Irrational(f64),
}

impl Beta {
    /// `β = 1/1`.
    pub fn unit() -> Self {
        Beta::Rational(RationalBeta { p: 1, q: 1 })
    }

    pub fn rational(p: u64, q: u64) -> Result<Self> {
        RationalBeta::new(p, q).map(Beta::Rational)
    }

    pub fn irrational(value: f64) -> Result<Self> {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::domain(format!("frequency ratio must be positive, got {value}")));
        }
        Ok(Beta::Irrational(value))
    }

    pub fn value(&self) -> f64 {
        match self {
            Beta::Rational(r) => r.value(),
            Beta::Irrational(v) => *v,
        }
    }

    pub fn is_unit(&self) -> bool {
        matches!(self, Beta::Rational(r) if r.p == 1 && r.q == 1)
    }

    fn validate(&self) -> Result<()> {
        match self {
            Beta::Rational(_) => Ok(()),
            Beta::Irrational(v) => Beta::irrational(*v).map(|_| ()),
        }
    }
}

/// Effective tunneling ratio `T_eff / T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveCoupling {
    value: Complex64,
}

impl EffectiveCoupling {
    pub fn new(value: Complex64) -> Self {
        EffectiveCoupling { value }
    }

    pub fn real(value: f64) -> Self {
        Self::new(Complex64::new(value, 0.0))
    }

    pub fn value(&self) -> Complex64 {
        self.value
    }

    pub fn magnitude(&self) -> f64 {
        self.value.norm()
    }

    /// Peierls phase `Θ = arg(T_eff)`.
    pub fn peierls_phase(&self) -> f64 {
        self.value.arg()
    }
}

/// `J_{-l}(κ) e^{-ilφ}`.
pub fn effective_coupling_monochromatic(l: i64, kappa: f64, phi: f64) -> Result<EffectiveCoupling> {
    let j = special::bessel_j(-l, kappa)?;
    Ok(EffectiveCoupling::new(
        j * Complex64::from_polar(1.0, -(l as f64) * phi),
    ))
}

/// Bichromatic effective coupling.
///
/// For rational `β = p/q` only the resonant terms `m = qk` contribute; the sum
/// runs over `|qk| ≤ m_max` (default `ceil(max(κ1, κ2/β)) + 40`). For an
/// irrational ratio only `m = 0` survives.
pub fn effective_coupling_bichromatic(
    l: i64,
    (kappa1, phi1): (f64, f64),
    beta: Beta,
    (kappa2, phi2): (f64, f64),
    m_max: Option<usize>,
) -> Result<EffectiveCoupling> {
    beta.validate()?;
    let b = beta.value();
    let arg2 = kappa2 / b;
    let global = Complex64::from_polar(1.0, -(l as f64) * phi1);

    let r = match beta {
        Beta::Irrational(_) => {
            let v = special::bessel_j(-l, kappa1)? * special::bessel_j(0, arg2)?;
            return Ok(EffectiveCoupling::new(v * global));
        }
        Beta::Rational(r) => r,
    };

    let m_max = m_max.unwrap_or_else(|| special::default_truncation(kappa1.abs().max(arg2.abs())));
    let (p, q) = (r.p as i64, r.q as i64);
    let k_max = m_max as i64 / q;
    let order1 = (l.unsigned_abs() + r.p * k_max as u64) as usize;
    let table1 = BesselTable::new(kappa1, order1)?;
    let table2 = BesselTable::new(arg2, (q * k_max) as usize)?;

    let mut sum = Complex64::new(0.0, 0.0);
    for k in -k_max..=k_max {
        let j1 = table1.get(-l - p * k);
        let j2 = table2.get(q * k);
        if j1.abs() < NEGLIGIBLE_TERM && j2.abs() < NEGLIGIBLE_TERM {
            continue;
        }
        let phase = (q * k) as f64 * (phi2 - b * phi1);
        sum += j1 * j2 * Complex64::from_polar(1.0, phase);
    }
    Ok(EffectiveCoupling::new(global * sum))
}

/// Product formula `J_0(κ/β) Π_{m≥1} J_{-l}(κ_m/m)` for a harmonic series of
/// tones `κ_m cos(mω0 z + φ_m)` plus one irrational tone `κ cos(βω0 z + φ)`,
/// truncated at `harmonic_kappas.len()` harmonics.
///
/// The multi-index resonance condition for this gradient is `Σ_m m·n_m = -l`
/// rather than `n_m = -l` for every harmonic, so this product is not in
/// general the `z`-average; compare with [`effective_coupling_numeric`].
pub fn effective_coupling_polychromatic_product(
    l: i64,
    harmonic_kappas: &[f64],
    kappa: f64,
    beta: f64,
) -> Result<f64> {
    Beta::irrational(beta)?;
    let mut product = special::bessel_j(0, kappa / beta)?;
    for (i, &k) in harmonic_kappas.iter().enumerate() {
        if !k.is_finite() {
            return Err(Error::domain(format!("harmonic amplitude #{} is not finite", i + 1)));
        }
        product *= special::bessel_j(-l, k / (i + 1) as f64)?;
    }
    Ok(product)
}

/// Closed-form coupling for the gradients that admit one: no tones, a single
/// tone, or two tones whose first has `β = 1`.
pub fn analytic_coupling(spec: &ModulationSpec) -> Result<EffectiveCoupling> {
    let l = spec.l();
    match spec.tones() {
        [] => Ok(EffectiveCoupling::real(if l == 0 { 1.0 } else { 0.0 })),
        [t] if t.beta().is_unit() => effective_coupling_monochromatic(l, t.kappa(), t.phi()),
        [t] => effective_coupling_bichromatic(l, (0.0, 0.0), t.beta(), (t.kappa(), t.phi()), None),
        [t1, t2] if t1.beta().is_unit() => effective_coupling_bichromatic(
            l,
            (t1.kappa(), t1.phi()),
            t2.beta(),
            (t2.kappa(), t2.phi()),
            None,
        ),
        _ => Err(Error::domain(
            "no closed-form coupling for this tone list; use the averaging oracle",
        )),
    }
}

/// Output of the brute-force averaging oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericCoupling {
    /// `(1/Z) ∫_0^Z e^{iη(z)} dz` with `η(0) = 0`.
    pub raw: EffectiveCoupling,
    /// `raw` with the constant phase `e^{i·η_offset}` divided out; directly
    /// comparable with the closed forms.
    pub normalized: EffectiveCoupling,
    /// Averaging window `Z`.
    pub window: f64,
    /// Set when fewer than [`MIN_ACCURATE_STEPS`] steps per period were used.
    pub accuracy_warning: bool,
}

/// Averages `e^{iη(z)}` by composite Simpson quadrature.
///
/// The window is `window_periods` common periods when every tone is rational,
/// otherwise `window_periods` base periods `2π/ω0`.
pub fn effective_coupling_numeric(
    spec: &ModulationSpec,
    window_periods: usize,
    steps_per_period: usize,
) -> Result<NumericCoupling> {
    if window_periods == 0 {
        return Err(Error::domain("averaging window must cover at least one period"));
    }
    if steps_per_period < 2 {
        return Err(Error::domain("at least two quadrature steps per period are required"));
    }
    let base_periods = spec.common_period_multiple().unwrap_or(1) as usize * window_periods;
    let window = base_periods as f64 * spec.base_period();
    let mut intervals = base_periods * steps_per_period;
    if intervals % 2 == 1 {
        intervals += 1;
    }
    let h = window / intervals as f64;

    let sample = |i: usize| Complex64::from_polar(1.0, spec.eta(i as f64 * h));
    let mut odd = Complex64::new(0.0, 0.0);
    let mut even = Complex64::new(0.0, 0.0);
    for i in 1..intervals {
        if i % 2 == 1 {
            odd += sample(i);
        } else {
            even += sample(i);
        }
    }
    let integral = (sample(0) + sample(intervals) + 4.0 * odd + 2.0 * even) * (h / 3.0);
    let raw = integral / window;
    let normalized = raw * Complex64::from_polar(1.0, -spec.eta_offset());

    Ok(NumericCoupling {
        raw: EffectiveCoupling::new(raw),
        normalized: EffectiveCoupling::new(normalized),
        window,
        accuracy_warning: steps_per_period < MIN_ACCURATE_STEPS,
    })
}

/// `H_eff`: `-T_n c` on `(n, n+1)`, `-T_n c*` on `(n+1, n)`, `iγ_n` on the
/// diagonal. The gradient term is absorbed by the averaging.
pub fn build_effective_hamiltonian(lattice: &LatticeSpec, coupling: EffectiveCoupling) -> ComplexMatrix {
    let n = lattice.n_sites();
    let c = coupling.value();
    let mut h = ComplexMatrix::zeros(n);
    for (i, &g) in lattice.gammas().iter().enumerate() {
        h[(i, i)] = Complex64::new(0.0, g);
    }
    for (a, b, t) in lattice.bonds() {
        h[(a, b)] -= t * c;
        h[(b, a)] -= t * c.conj();
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Boundary, ModulationTone};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    const GOLDEN: f64 = 1.618_033_988_749_895;

    #[test]
    fn rational_beta_is_reduced() {
        let r = RationalBeta::new(6, 4).unwrap();
        assert_eq!((r.p(), r.q()), (3, 2));
        assert!(RationalBeta::new(0, 3).is_err());
        assert!(Beta::irrational(-1.0).is_err());
        assert!(Beta::irrational(0.0).is_err());
    }

    #[test]
    fn monochromatic_examples() {
        assert_eq!(effective_coupling_monochromatic(1, 0.0, 0.7).unwrap().magnitude(), 0.0);
        let unmod = effective_coupling_monochromatic(0, 0.0, 1.3).unwrap();
        assert_eq!(unmod.value(), Complex64::new(1.0, 0.0));
        let peak = effective_coupling_monochromatic(1, 1.8412, 0.0).unwrap();
        assert!((peak.value().re + 0.5819).abs() < 1e-4);
        assert!((peak.magnitude() - 0.5819).abs() < 1e-4);
    }

    #[test]
    fn irrational_second_tone_off_is_monochromatic() {
        let mono = effective_coupling_monochromatic(1, 1.3, 0.4).unwrap();
        let bi = effective_coupling_bichromatic(1, (1.3, 0.4), Beta::Irrational(GOLDEN), (0.0, 0.9), None)
            .unwrap();
        assert!((mono.value() - bi.value()).norm() < 1e-15);
    }

    #[test]
    fn irrational_coupling_vanishes_at_j0_zero() {
        let kappa2 = 2.404_825_557_695_773 * GOLDEN;
        let bi = effective_coupling_bichromatic(1, (1.8412, 0.0), Beta::Irrational(GOLDEN), (kappa2, 0.0), None)
            .unwrap();
        assert!(bi.magnitude() < 1e-12);
    }

    #[test]
    fn rational_phases_change_magnitude() {
        let a = effective_coupling_bichromatic(1, (1.5, 0.0), Beta::unit(), (1.2, PI / 3.0), None).unwrap();
        let b = effective_coupling_bichromatic(1, (1.5, 0.0), Beta::unit(), (1.2, 0.0), None).unwrap();
        assert!((a.magnitude() - b.magnitude()).abs() > 1e-3);
    }

    #[test]
    fn bichromatic_rejects_bad_beta() {
        let r = effective_coupling_bichromatic(1, (1.0, 0.0), Beta::Irrational(-2.0), (1.0, 0.0), None);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn polychromatic_product_examples() {
        let mono = effective_coupling_monochromatic(1, 1.1, 0.0).unwrap();
        let single = effective_coupling_polychromatic_product(1, &[1.1], 0.0, GOLDEN).unwrap();
        assert!((single - mono.value().re).abs() < 1e-15);

        let zeros = effective_coupling_polychromatic_product(2, &[0.0, 0.0, 0.0], 0.7, GOLDEN).unwrap();
        assert_eq!(zeros, 0.0);

        let kappas: Vec<f64> = (1..=50).map(|m| 1.8412 * m as f64).collect();
        let tiny = effective_coupling_polychromatic_product(1, &kappas, 0.0, GOLDEN).unwrap();
        assert!(tiny.abs() < 1e-11);
    }

    #[test]
    fn numeric_pure_dc_averages_to_zero() {
        let spec = ModulationSpec::new(1, 1.0, vec![]).unwrap();
        let avg = effective_coupling_numeric(&spec, 1, DEFAULT_STEPS_PER_PERIOD).unwrap();
        assert!(avg.raw.magnitude() < 1e-10);
        assert!(!avg.accuracy_warning);
    }

    #[test]
    fn numeric_matches_monochromatic() {
        let spec = ModulationSpec::monochromatic(1, 1.0, 2.0, 0.4).unwrap();
        let avg = effective_coupling_numeric(&spec, 1, 4096).unwrap();
        let exact = effective_coupling_monochromatic(1, 2.0, 0.4).unwrap();
        assert!((avg.normalized.value() - exact.value()).norm() < 1e-8);
        assert!((avg.raw.magnitude() - exact.magnitude()).abs() < 1e-8);
    }

    #[test]
    fn numeric_flags_coarse_grids_and_rejects_empty_windows() {
        let spec = ModulationSpec::monochromatic(1, 1.0, 1.0, 0.0).unwrap();
        assert!(effective_coupling_numeric(&spec, 1, 16).unwrap().accuracy_warning);
        assert!(effective_coupling_numeric(&spec, 0, 4096).is_err());
    }

    #[test]
    fn analytic_dispatch() {
        let none = ModulationSpec::new(2, 1.0, vec![]).unwrap();
        assert_eq!(analytic_coupling(&none).unwrap().magnitude(), 0.0);
        let three = ModulationSpec::new(
            1,
            1.0,
            vec![ModulationTone::new(1.0, Beta::unit(), 0.0).unwrap(); 3],
        )
        .unwrap();
        assert!(analytic_coupling(&three).is_err());

        // A lone tone at β = 2 resonates only for even l.
        let lone = ModulationSpec::new(
            2,
            1.0,
            vec![ModulationTone::new(1.7, Beta::rational(2, 1).unwrap(), 0.3).unwrap()],
        )
        .unwrap();
        let closed = analytic_coupling(&lone).unwrap();
        let avg = effective_coupling_numeric(&lone, 1, 4096).unwrap();
        assert!((closed.value() - avg.normalized.value()).norm() < 1e-10);
    }

    #[test]
    fn effective_hamiltonian_examples() {
        let lattice = LatticeSpec::new(vec![1.0, 2.0], vec![0.0; 3], Boundary::Open).unwrap();
        let h = build_effective_hamiltonian(&lattice, EffectiveCoupling::real(1.0));
        assert!(h.max_abs_diff(&h.conj_transpose()) == 0.0);
        assert_eq!(h[(1, 2)], Complex64::new(-2.0, 0.0));

        let lattice = LatticeSpec::trimer(1.0, 1.0, 0.5, 0.3).unwrap();
        let h = build_effective_hamiltonian(&lattice, EffectiveCoupling::real(0.0));
        let diag: Vec<Complex64> = lattice.gammas().iter().map(|&g| Complex64::new(0.0, g)).collect();
        assert_eq!(h, ComplexMatrix::from_diagonal(&diag));
    }

    #[test]
    fn complex_coupling_placement() {
        let c = Complex64::from_polar(0.4, 0.9);
        let lattice = LatticeSpec::dimer(2.0, 0.1).unwrap();
        let h = build_effective_hamiltonian(&lattice, EffectiveCoupling::new(c));
        assert_eq!(h[(0, 1)], -2.0 * c);
        assert_eq!(h[(1, 0)], -2.0 * c.conj());
    }

    proptest! {
        #[test]
        fn monochromatic_magnitude_ignores_phase(l in -4i64..5, kappa in 0.0f64..8.0, phi in -6.0f64..6.0) {
            let base = effective_coupling_monochromatic(l, kappa, 0.0).unwrap();
            let shifted = effective_coupling_monochromatic(l, kappa, phi).unwrap();
            prop_assert!((base.magnitude() - shifted.magnitude()).abs() < 1e-15);
            prop_assert!((shifted.value() - base.value() * Complex64::from_polar(1.0, -(l as f64) * phi)).norm() < 1e-14);
        }

        #[test]
        fn irrational_magnitude_ignores_both_phases(
            kappa1 in 0.0f64..5.0, kappa2 in 0.0f64..5.0,
            phi1 in -4.0f64..4.0, phi2 in -4.0f64..4.0,
        ) {
            let beta = Beta::Irrational(GOLDEN);
            let a = effective_coupling_bichromatic(1, (kappa1, 0.0), beta, (kappa2, 0.0), None).unwrap();
            let b = effective_coupling_bichromatic(1, (kappa1, phi1), beta, (kappa2, phi2), None).unwrap();
            prop_assert!((a.magnitude() - b.magnitude()).abs() < 1e-15);
        }

        #[test]
        fn magnitudes_never_exceed_one(
            l in -3i64..4, kappa1 in 0.0f64..6.0, kappa2 in 0.0f64..6.0,
            p in 1u64..5, q in 1u64..5, phi1 in -3.0f64..3.0, phi2 in -3.0f64..3.0,
        ) {
            let beta = Beta::rational(p, q).unwrap();
            let c = effective_coupling_bichromatic(l, (kappa1, phi1), beta, (kappa2, phi2), None).unwrap();
            prop_assert!(c.magnitude() <= 1.0 + 1e-12);
            let m = effective_coupling_monochromatic(l, kappa1, phi1).unwrap();
            prop_assert!(m.magnitude() <= 1.0 + 1e-12);
        }

        #[test]
        fn effective_hamiltonian_is_pt_symmetric(
            half in 1usize..6, t in 0.2f64..2.0, gamma in 0.0f64..1.0,
            mag in 0.0f64..1.0, theta in -3.0f64..3.0,
        ) {
            let n = 2 * half;
            let lattice = LatticeSpec::alternating(n, t, gamma).unwrap();
            let h = build_effective_hamiltonian(&lattice, EffectiveCoupling::new(Complex64::from_polar(mag, theta)));
            let mut pt = ComplexMatrix::zeros(n);
            for i in 0..n {
                for j in 0..n {
                    pt[(i, j)] = h[(n - 1 - i, n - 1 - j)].conj();
                }
            }
            prop_assert!(pt.max_abs_diff(&h) < 1e-14);
        }
    }
}
