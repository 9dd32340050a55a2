//! Spectra of effective Hamiltonians and their reality classification.

mod closed_form;
pub mod eigen;
mod threshold;

use num_complex::Complex64;

use crate::error::Result;
use crate::matrix::ComplexMatrix;

pub use closed_form::{
    band_energy, bloch_hamiltonian, dimer_spectrum, trimer_gamma_real_points, DimerizedRingSpec,
    TrimerSpec,
};
pub use threshold::{pt_threshold, ThresholdResult, ThresholdStatus, COARSE_GRID_POINTS};

/// Relative reality tolerance: `tol_im = 1e-9 · max(1, spectral radius)`.
pub const REALITY_TOLERANCE: f64 = 1e-9;

/// Default reality tolerance for a set of eigenvalues.
pub fn default_tolerance(eigenvalues: &[Complex64]) -> f64 {
    let radius = eigenvalues.iter().map(|e| e.norm()).fold(0.0, f64::max);
    REALITY_TOLERANCE * radius.max(1.0)
}

/// Sorted eigenvalues with reality classification.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    eigenvalues: Vec<Complex64>,
    max_abs_imag: f64,
    tol_im: f64,
}

impl SpectrumResult {
    /// Sorts by `(re, im)` and classifies with `tol_im` (default rule when
    /// `None`).
    pub fn new(mut eigenvalues: Vec<Complex64>, tol_im: Option<f64>) -> Self {
        eigenvalues.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let max_abs_imag = eigenvalues.iter().map(|e| e.im.abs()).fold(0.0, f64::max);
        let tol_im = tol_im.unwrap_or_else(|| default_tolerance(&eigenvalues));
        SpectrumResult {
            eigenvalues,
            max_abs_imag,
            tol_im,
        }
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.max_abs_imag
    }

    pub fn tol_im(&self) -> f64 {
        self.tol_im
    }

    pub fn is_real(&self) -> bool {
        self.max_abs_imag < self.tol_im
    }
}

/// All eigenvalues of a general complex matrix.
pub fn eigenvalues_dense(h: &ComplexMatrix) -> Result<SpectrumResult> {
    Ok(SpectrumResult::new(eigen::eigenvalues(h)?, None))
}

/// Largest distance between paired eigenvalues of two equally sized
/// spectra, pairing greedily by nearest remaining neighbour.
///
/// Sorting alone mis-pairs conjugate pairs whose real parts agree to
/// rounding, so closed-form/dense comparisons go through this.
pub fn pairing_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "spectra must have equal length");
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for (d, i, j) in pairs {
        if used_a[i] || used_b[j] {
            continue;
        }
        used_a[i] = true;
        used_b[j] = true;
        worst = worst.max(d);
    }
    worst
}
