//! Search for the first gain/loss strength at which a spectrum turns complex.

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

use super::eigenvalues_dense;

/// Coarse scan resolution before bisection.
pub const COARSE_GRID_POINTS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdStatus {
    /// Real at `γ = 0`, complex beyond `gamma_star`.
    Broken,
    /// Complex already for arbitrarily small `γ > 0`; `gamma_star = 0`.
    BrokenAtZero,
    /// Real on the whole scanned range; `gamma_star = gamma_max`.
    Unbroken,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdResult {
    pub gamma_star: f64,
    pub status: ThresholdStatus,
    /// A coarse grid point above `gamma_star` was real again. The reported
    /// value is still the first breaking point.
    pub reentrant: bool,
}

/// Locates the smallest `γ*` in `[0, gamma_max]` at which the spectrum of
/// `family(γ)` stops being real, to absolute precision `tol`.
///
/// A coarse scan over [`COARSE_GRID_POINTS`] points brackets the first
/// breaking point, which bisection then refines.
pub fn pt_threshold<F>(family: F, gamma_max: f64, tol: f64) -> Result<ThresholdResult>
where
    F: Fn(f64) -> Result<ComplexMatrix>,
{
    if !(gamma_max.is_finite() && gamma_max > 0.0) {
        return Err(Error::domain(format!("gamma_max must be positive, got {gamma_max}")));
    }
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::domain(format!("tolerance must be positive, got {tol}")));
    }
    let is_real = |gamma: f64| -> Result<bool> { Ok(eigenvalues_dense(&family(gamma)?)?.is_real()) };

    let broken_at_zero = |reentrant| ThresholdResult {
        gamma_star: 0.0,
        status: ThresholdStatus::BrokenAtZero,
        reentrant,
    };
    if !is_real(0.0)? || !is_real(tol.min(gamma_max))? {
        return Ok(broken_at_zero(false));
    }

    let step = gamma_max / (COARSE_GRID_POINTS - 1) as f64;
    let grid: Vec<bool> = (0..COARSE_GRID_POINTS)
        .map(|i| is_real(i as f64 * step))
        .collect::<Result<_>>()?;
    let Some(first_broken) = grid.iter().position(|&real| !real) else {
        return Ok(ThresholdResult {
            gamma_star: gamma_max,
            status: ThresholdStatus::Unbroken,
            reentrant: false,
        });
    };
    let reentrant = grid[first_broken..].iter().any(|&real| real);

    let mut lo = (first_broken - 1) as f64 * step;
    let mut hi = first_broken as f64 * step;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if is_real(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo == 0.0 && hi <= tol {
        return Ok(broken_at_zero(reentrant));
    }
    Ok(ThresholdResult {
        gamma_star: 0.5 * (lo + hi),
        status: ThresholdStatus::Broken,
        reentrant,
    })
}
