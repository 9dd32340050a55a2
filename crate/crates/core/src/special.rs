//! Bessel functions of the first kind for integer order and the truncated
//! Jacobi-Anger expansion
//!
//! ```text
//! e^{iκ sin θ} = Σ_m J_m(κ) e^{imθ}
//! ```
//!
//! Every effective-coupling formula needs a contiguous run of orders at a
//! single argument, so the primary entry point is [`bessel_j_batch`], which
//! returns `J_0(x) ..= J_M(x)` in one pass. For `|x| < 2` the ascending power
//! series is summed directly; otherwise Miller's downward recurrence is
//! started well above `max(M, |x|)` and normalised with
//!
//! ```text
//! 1 = J_0(x) + 2 Σ_{k≥1} J_{2k}(x).
//! ```
//!
//! Negative orders come from `J_{-m}(x) = (-1)^m J_m(x)` and negative
//! arguments from `J_m(-x) = (-1)^m J_m(x)`.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest supported `|x|`.
pub const MAX_ARGUMENT: f64 = 1.0e4;

/// Extra orders added past `|κ|` when truncating Jacobi-Anger style sums.
pub const DEFAULT_TRUNCATION_MARGIN: usize = 40;

const SERIES_CUTOFF: f64 = 2.0;
const RESCALE_ABOVE: f64 = 1.0e200;

/// Integer Bessel order. Any integer is accepted; negative orders are
/// resolved through the reflection identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BesselOrder(pub i64);

impl BesselOrder {
    /// Sign picked up when reflecting `J_{-m}` onto `J_m`.
    fn reflection_sign(self) -> f64 {
        if self.0.rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

impl From<i64> for BesselOrder {
    fn from(m: i64) -> Self {
        BesselOrder(m)
    }
}

impl From<i32> for BesselOrder {
    fn from(m: i32) -> Self {
        BesselOrder(m as i64)
    }
}

fn check_argument(x: f64) -> Result<()> {
    if !x.is_finite() {
        return Err(Error::domain(format!("Bessel argument must be finite, got {x}")));
    }
    if x.abs() > MAX_ARGUMENT {
        return Err(Error::domain(format!(
            "Bessel argument |x| = {} exceeds the supported range {MAX_ARGUMENT}",
            x.abs()
        )));
    }
    Ok(())
}

/// `J_m(x)` for any integer order `m`.
pub fn bessel_j(m: impl Into<BesselOrder>, x: f64) -> Result<f64> {
    let order = m.into();
    check_argument(x)?;
    let n = order.0.unsigned_abs() as usize;
    let value = batch_unchecked(n, x)[n];
    Ok(if order.0 < 0 {
        order.reflection_sign() * value
    } else {
        value
    })
}

/// `[J_0(x), J_1(x), ..., J_max_order(x)]`.
pub fn bessel_j_batch(max_order: usize, x: f64) -> Result<Vec<f64>> {
    check_argument(x)?;
    Ok(batch_unchecked(max_order, x))
}

fn batch_unchecked(max_order: usize, x: f64) -> Vec<f64> {
    if x == 0.0 {
        let mut out = vec![0.0; max_order + 1];
        out[0] = 1.0;
        return out;
    }
    let ax = x.abs();
    let mut out = if ax < SERIES_CUTOFF {
        (0..=max_order).map(|m| power_series(m, ax)).collect()
    } else {
        miller(max_order, ax)
    };
    if x < 0.0 {
        for (m, v) in out.iter_mut().enumerate() {
            if m % 2 == 1 {
                *v = -*v;
            }
        }
    }
    out
}

/// Ascending series `Σ_k (-1)^k (x/2)^{2k+m} / (k! (k+m)!)` for small `x`.
fn power_series(m: usize, x: f64) -> f64 {
    let half = 0.5 * x;
    // Leading term (x/2)^m / m!, built incrementally so it underflows to zero
    // gracefully for large m.
    let mut term = 1.0;
    for j in 1..=m {
        term *= half / j as f64;
        if term == 0.0 {
            return 0.0;
        }
    }
    let q = -half * half;
    let mut sum = term;
    for k in 1..200 {
        term *= q / (k as f64 * (k + m) as f64);
        sum += term;
        if term.abs() <= f64::EPSILON * 1e-3 * sum.abs() {
            break;
        }
    }
    sum
}

/// Miller's downward recurrence for `x ≥ 2`.
fn miller(max_order: usize, x: f64) -> Vec<f64> {
    let top = max_order.max(x.ceil() as usize);
    let mut start = top + 30 + (160.0 * top as f64).sqrt() as usize;
    if start % 2 == 1 {
        start += 1;
    }

    let mut values = vec![0.0; start + 2];
    values[start] = 1.0e-30;
    let two_over_x = 2.0 / x;
    for k in (1..=start).rev() {
        let next = k as f64 * two_over_x * values[k] - values[k + 1];
        values[k - 1] = next;
        if next.abs() > RESCALE_ABOVE {
            for v in &mut values[k - 1..] {
                *v /= RESCALE_ABOVE;
            }
        }
    }

    let norm = values[0] + 2.0 * values.iter().skip(2).step_by(2).sum::<f64>();
    values.truncate(max_order + 1);
    for v in &mut values {
        *v /= norm;
    }
    values
}

/// Bessel values `J_m(x)` for `|m| ≤ max_order` at one argument.
#[derive(Debug, Clone)]
pub struct BesselTable {
    x: f64,
    values: Vec<f64>,
}

impl BesselTable {
    pub fn new(x: f64, max_order: usize) -> Result<Self> {
        Ok(BesselTable {
            x,
            values: bessel_j_batch(max_order, x)?,
        })
    }

    pub fn argument(&self) -> f64 {
        self.x
    }

    pub fn max_order(&self) -> usize {
        self.values.len() - 1
    }

    /// `J_m(x)`; orders beyond the table are computed on demand.
    pub fn get(&self, m: i64) -> f64 {
        let n = m.unsigned_abs() as usize;
        let value = match self.values.get(n) {
            Some(&v) => v,
            None => batch_unchecked(n, self.x)[n],
        };
        if m < 0 && n % 2 == 1 {
            -value
        } else {
            value
        }
    }
}

/// Default truncation order `ceil(|κ|) + 40` for expansions in `J_m(κ)`.
pub fn default_truncation(kappa: f64) -> usize {
    kappa.abs().ceil() as usize + DEFAULT_TRUNCATION_MARGIN
}

/// `Σ_{m=-m_max}^{m_max} J_m(κ) e^{imθ}`.
pub fn jacobi_anger_partial(kappa: f64, theta: f64, m_max: usize) -> Result<Complex64> {
    if !theta.is_finite() {
        return Err(Error::domain(format!("angle must be finite, got {theta}")));
    }
    let table = BesselTable::new(kappa, m_max)?;
    let mut sum = Complex64::new(table.get(0), 0.0);
    for m in 1..=m_max as i64 {
        let phase = Complex64::from_polar(1.0, m as f64 * theta);
        sum += table.get(m) * phase + table.get(-m) * phase.conj();
    }
    Ok(sum)
}
