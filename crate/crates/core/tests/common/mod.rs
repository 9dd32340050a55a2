//! Independent reference values for integration tests.
//!
//! Bessel values come from the defining power series
//! `J_m(x) = Σ_k (-1)^k (x/2)^{2k+m} / (k! (k+m)!)` summed in exact rational
//! arithmetic, so cancellation at large `x` costs nothing but time.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite argument")
}

/// `J_m(x)` for `m ≥ 0`, exact up to a truncation below `1e-40`.
fn series(m: u32, x: f64) -> f64 {
    let half = rational(x) / BigInt::from(2);
    let half_sq = &half * &half;
    let cutoff = BigRational::new(BigInt::one(), BigInt::from(10).pow(40));
    let mut term = BigRational::one();
    for k in 1..=m {
        term = term * &half / BigInt::from(k);
    }
    let mut sum = BigRational::zero();
    let mut k: u64 = 0;
    loop {
        sum += &term;
        k += 1;
        term = -term * &half_sq / BigInt::from(k * (k + m as u64));
        // Terms shrink monotonically once k(k+m) > (x/2)².
        if (k * (k + m as u64)) as f64 > 2.0 * (x * x / 4.0) + 1.0 && term.abs() < cutoff {
            break;
        }
    }
    sum.to_f64().expect("representable")
}

/// Reference `J_m(x)` for any integer order and real argument.
pub fn bessel(m: i64, x: f64) -> f64 {
    let sign = |odd: bool| if odd { -1.0 } else { 1.0 };
    let order = m.unsigned_abs() as u32;
    let flip = (m < 0 && order % 2 == 1) ^ (x < 0.0 && order % 2 == 1);
    sign(flip) * series(order, x.abs())
}

/// `J_m'(x) = (J_{m-1}(x) - J_{m+1}(x)) / 2`.
pub fn bessel_derivative(m: i64, x: f64) -> f64 {
    0.5 * (bessel(m - 1, x) - bessel(m + 1, x))
}

/// Root of `f` in `[lo, hi]` by bisection; `f(lo)` and `f(hi)` must differ
/// in sign.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    assert!(f_lo * f(hi) < 0.0, "root not bracketed in [{lo}, {hi}]");
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// First positive zero of `J_m` inside the bracket.
pub fn bessel_zero(m: i64, lo: f64, hi: f64) -> f64 {
    bisect(|x| bessel(m, x), lo, hi, 1e-12)
}

/// Location and value of the first maximum of `J_1`.
pub fn bessel_j1_maximum() -> (f64, f64) {
    let x = bisect(|x| bessel_derivative(1, x), 1.5, 2.2, 1e-12);
    (x, bessel(1, x))
}

/// Deterministic generator for randomized draws.
pub fn rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
