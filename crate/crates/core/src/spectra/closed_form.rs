//! Closed-form spectra: dimer, trimer and the dimerized ring band structure.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::floquet::EffectiveCoupling;
use crate::matrix::ComplexMatrix;
use crate::special;

use super::{eigen, SpectrumResult};

/// `E = ∓√(radicand)` as a complex pair `(E-, E+)`.
fn symmetric_pair(radicand: f64) -> (Complex64, Complex64) {
    if radicand >= 0.0 {
        let r = radicand.sqrt();
        (Complex64::new(-r, 0.0), Complex64::new(r, 0.0))
    } else {
        let r = (-radicand).sqrt();
        (Complex64::new(0.0, -r), Complex64::new(0.0, r))
    }
}

/// Dimer with gain/loss `(γ, -γ)`: `E = ∓√(|T J_{-l}(κ)|² - γ²)`.
pub fn dimer_spectrum(t: f64, l: i64, kappa: f64, gamma: f64) -> Result<SpectrumResult> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::domain(format!("tunneling must be positive, got {t}")));
    }
    let teff = t * special::bessel_j(-l, kappa)?.abs();
    let (lo, hi) = symmetric_pair(teff * teff - gamma * gamma);
    Ok(SpectrumResult::new(vec![lo, hi], None))
}

/// Trimer with gain/loss `(γ, sγ, -(1+s)γ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrimerSpec {
    pub t1: f64,
    pub t2: f64,
    pub s: f64,
    pub gamma: f64,
    /// `|J_{-l}(κ)|`.
    pub coupling_mag: f64,
}

impl TrimerSpec {
    /// Coefficients of the characteristic equation `E³ - aE - ib = 0`.
    pub fn coefficients(&self) -> (f64, f64) {
        let TrimerSpec { t1, t2, s, gamma, coupling_mag } = *self;
        let j2 = coupling_mag * coupling_mag;
        let a = (t1 * t1 + t2 * t2) * j2 - gamma * gamma * (1.0 + s + s * s);
        let b = gamma * (gamma * gamma * s * (1.0 + s) + (t1 * t1 * (1.0 + s) - t2 * t2) * j2);
        (a, b)
    }

    /// Roots of `E³ - aE - ib`, from the eigenvalues of its companion
    /// matrix. When `b = 0` and `a ≥ 0` the roots are `{-√a, 0, √a}`.
    pub fn spectrum(&self) -> Result<SpectrumResult> {
        let (a, b) = self.coefficients();
        if b == 0.0 && a >= 0.0 {
            let r = a.sqrt();
            return Ok(SpectrumResult::new(
                vec![Complex64::new(-r, 0.0), Complex64::new(0.0, 0.0), Complex64::new(r, 0.0)],
                None,
            ));
        }
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let companion = ComplexMatrix::from_rows(&[
            vec![zero, Complex64::new(a, 0.0), Complex64::new(0.0, b)],
            vec![one, zero, zero],
            vec![zero, one, zero],
        ])?;
        Ok(SpectrumResult::new(eigen::eigenvalues(&companion)?, None))
    }

    /// `|E³ - aE - ib|` at `e`.
    pub fn residual(&self, e: Complex64) -> f64 {
        let (a, b) = self.coefficients();
        (e * e * e - a * e - Complex64::new(0.0, b)).norm()
    }
}

/// The two gain/loss strengths `γ∓ = ∓𝒥 √((T2² - T1²(1+s)) / (s(1+s)))` at
/// which `b` vanishes for `s ≠ 0`.
pub fn trimer_gamma_real_points(t1: f64, t2: f64, s: f64, coupling_mag: f64) -> Result<(f64, f64)> {
    if ![t1, t2, s, coupling_mag].iter().all(|v| v.is_finite()) {
        return Err(Error::domain("trimer parameters must be finite"));
    }
    let ss = s * (1.0 + s);
    if ss <= 0.0 {
        return Err(Error::domain(format!("requires s(1+s) > 0, got s = {s}")));
    }
    if t2 * t2 <= t1 * t1 * ss {
        return Err(Error::domain(format!(
            "requires T2² > T1²·s(1+s): {} ≤ {}",
            t2 * t2,
            t1 * t1 * ss
        )));
    }
    if t2 * t2 <= t1 * t1 * (1.0 + s) {
        return Err(Error::domain(format!(
            "requires T2² > T1²(1+s) for a real γ∓: {} ≤ {}",
            t2 * t2,
            t1 * t1 * (1.0 + s)
        )));
    }
    let g = coupling_mag.abs() * ((t2 * t2 - t1 * t1 * (1.0 + s)) / ss).sqrt();
    Ok((-g, g))
}

/// Dimerized ring: `T_n = T` (n odd), `cT` (n even), `γ_n = (-1)^n γ`, at
/// Bloch momentum `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimerizedRingSpec {
    pub c: f64,
    pub t: f64,
    pub gamma: f64,
    pub coupling: EffectiveCoupling,
    pub q: f64,
}

impl DimerizedRingSpec {
    /// `((c-1)² + 4c cos²((q-Θ)/2)) |T_eff|² - γ²`.
    pub fn radicand(&self) -> f64 {
        let teff = self.t * self.coupling.magnitude();
        let theta = self.coupling.peierls_phase();
        let cos = ((self.q - theta) / 2.0).cos();
        ((self.c - 1.0).powi(2) + 4.0 * self.c * cos * cos) * teff * teff - self.gamma * self.gamma
    }

    pub fn with_q(&self, q: f64) -> Self {
        DimerizedRingSpec { q, ..*self }
    }
}

/// `(E-, E+) = ∓√(((c-1)² + 4c cos²((q-Θ)/2)) |T_eff|² - γ²)`.
pub fn band_energy(spec: &DimerizedRingSpec) -> (Complex64, Complex64) {
    symmetric_pair(spec.radicand())
}

/// Two-site Bloch matrix whose eigenvalues are [`band_energy`]:
///
/// ```text
/// [[-iγ, -|T_eff| (1 + c e^{-i(q-Θ)})], [h.c., iγ]]
/// ```
///
/// with `Θ` acting as the phase accumulated per unit cell.
pub fn bloch_hamiltonian(spec: &DimerizedRingSpec) -> ComplexMatrix {
    let teff = spec.t * spec.coupling.magnitude();
    let theta = spec.coupling.peierls_phase();
    let off = -teff * (1.0 + spec.c * Complex64::from_polar(1.0, -(spec.q - theta)));
    let mut h = ComplexMatrix::zeros(2);
    h[(0, 0)] = Complex64::new(0.0, -spec.gamma);
    h[(1, 1)] = Complex64::new(0.0, spec.gamma);
    h[(0, 1)] = off;
    h[(1, 0)] = off.conj();
    h
}
