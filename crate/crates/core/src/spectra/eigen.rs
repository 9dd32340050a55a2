//! Eigenvalues of general dense complex matrices.
//!
//! Householder reduction to upper Hessenberg form, then single-shift QR
//! sweeps with Givens rotations and Wilkinson shifts on the active
//! unreduced block. Only eigenvalues are accumulated; eigenvectors for
//! residual checks come from inverse iteration.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;

/// Largest supported dimension.
pub const MAX_DIM: usize = 256;

const ITERATIONS_PER_EIGENVALUE: usize = 60;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn abs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// Reduces `a` (row-major, `n×n`) to upper Hessenberg form in place by
/// unitary similarity.
fn hessenberg(a: &mut [Complex64], n: usize) {
    let mut v = vec![zero(); n];
    for k in 0..n.saturating_sub(2) {
        let norm: f64 = (k + 1..n).map(|i| a[i * n + k].norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let x0 = a[(k + 1) * n + k];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        for i in k + 1..n {
            v[i] = a[i * n + k];
        }
        v[k + 1] -= alpha;
        let vnorm: f64 = (k + 1..n).map(|i| v[i].norm_sqr()).sum::<f64>().sqrt();
        if vnorm == 0.0 {
            continue;
        }
        for vi in &mut v[k + 1..n] {
            *vi /= vnorm;
        }
        // A <- (I - 2vv*) A
        for j in k..n {
            let s: Complex64 = (k + 1..n).map(|i| v[i].conj() * a[i * n + j]).sum();
            let s = 2.0 * s;
            for i in k + 1..n {
                a[i * n + j] -= v[i] * s;
            }
        }
        // A <- A (I - 2vv*)
        for i in 0..n {
            let s: Complex64 = (k + 1..n).map(|j| a[i * n + j] * v[j]).sum();
            let s = 2.0 * s;
            for j in k + 1..n {
                a[i * n + j] -= s * v[j].conj();
            }
        }
        for i in k + 2..n {
            a[i * n + k] = zero();
        }
    }
}

/// Givens rotation `[c s; -s* c]` (c real) with `G [x; y] = [r; 0]`.
fn givens(x: Complex64, y: Complex64) -> (f64, Complex64) {
    let ny = y.norm();
    if ny == 0.0 {
        return (1.0, zero());
    }
    let nx = x.norm();
    if nx == 0.0 {
        return (0.0, y.conj() / ny);
    }
    let r = nx.hypot(ny);
    let c = nx / r;
    let s = (x / nx) * y.conj() / r;
    (c, s)
}

/// Eigenvalue of the 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let e1 = d + half + disc;
    let e2 = d + half - disc;
    if (e1 - d).norm() <= (e2 - d).norm() {
        e1
    } else {
        e2
    }
}

/// All eigenvalues of `h`, unordered.
pub fn eigenvalues(h: &ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = h.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n > MAX_DIM {
        return Err(Error::domain(format!("dense eigensolver supports dim ≤ {MAX_DIM}, got {n}")));
    }
    if h.as_slice().iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::domain("matrix has non-finite entries"));
    }
    let mut a = h.as_slice().to_vec();
    hessenberg(&mut a, n);

    let norm = a.iter().map(|z| abs1(*z)).fold(0.0, f64::max);
    let small = f64::MIN_POSITIVE * (n as f64 / f64::EPSILON);
    let mut eig = vec![zero(); n];
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let cap = ITERATIONS_PER_EIGENVALUE * n;

    loop {
        // Find the start of the unreduced block ending at `hi`.
        let mut lo = hi;
        while lo > 0 {
            let sub = a[lo * n + lo - 1];
            let mut scale = abs1(a[lo * n + lo]) + abs1(a[(lo - 1) * n + lo - 1]);
            if scale == 0.0 {
                scale = norm;
            }
            if abs1(sub) <= f64::EPSILON * scale || abs1(sub) <= small {
                a[lo * n + lo - 1] = zero();
                break;
            }
            lo -= 1;
        }

        if lo == hi {
            eig[hi] = a[hi * n + hi];
            if hi == 0 {
                break;
            }
            hi -= 1;
            iter = 0;
            continue;
        }

        iter += 1;
        total += 1;
        if total > cap {
            return Err(Error::NoConvergence { dim: n, iterations: total });
        }

        let shift = if iter % 10 == 0 {
            // Exceptional shift to break cycles.
            a[hi * n + hi] + abs1(a[hi * n + hi - 1]) * Complex64::new(0.75, 0.4)
        } else {
            wilkinson_shift(
                a[(hi - 1) * n + hi - 1],
                a[(hi - 1) * n + hi],
                a[hi * n + hi - 1],
                a[hi * n + hi],
            )
        };

        for k in lo..=hi {
            a[k * n + k] -= shift;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(a[k * n + k], a[(k + 1) * n + k]);
            rotations.push((c, s));
            for j in k..=hi {
                let x = a[k * n + j];
                let y = a[(k + 1) * n + j];
                a[k * n + j] = c * x + s * y;
                a[(k + 1) * n + j] = -s.conj() * x + c * y;
            }
        }
        for (idx, &(c, s)) in rotations.iter().enumerate() {
            let k = lo + idx;
            let top = (k + 2).min(hi);
            for i in lo..=top {
                let x = a[i * n + k];
                let y = a[i * n + k + 1];
                a[i * n + k] = c * x + s.conj() * y;
                a[i * n + k + 1] = -s * x + c * y;
            }
        }
        for k in lo..=hi {
            a[k * n + k] += shift;
        }
    }
    Ok(eig)
}

/// Solves `m x = b` by Gaussian elimination with partial pivoting; exact
/// zero pivots are replaced by a tiny value so singular shifts still return
/// a direction.
fn solve_in_place(m: &mut [Complex64], b: &mut [Complex64], n: usize, tiny: f64) {
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&r, &s| m[r * n + k].norm().total_cmp(&m[s * n + k].norm()))
            .unwrap_or(k);
        if pivot != k {
            for j in 0..n {
                m.swap(k * n + j, pivot * n + j);
            }
            b.swap(k, pivot);
        }
        if m[k * n + k].norm() < tiny {
            m[k * n + k] = Complex64::new(tiny, 0.0);
        }
        let p = m[k * n + k];
        for r in k + 1..n {
            let f = m[r * n + k] / p;
            if f == zero() {
                continue;
            }
            for j in k..n {
                let v = m[k * n + j];
                m[r * n + j] -= f * v;
            }
            let bk = b[k];
            b[r] -= f * bk;
        }
    }
    for k in (0..n).rev() {
        let s: Complex64 = (k + 1..n).map(|j| m[k * n + j] * b[j]).sum();
        b[k] = (b[k] - s) / m[k * n + k];
    }
}

/// Approximate right eigenvector for eigenvalue `e` by inverse iteration.
pub fn eigenvector(h: &ComplexMatrix, e: Complex64) -> Vec<Complex64> {
    let n = h.dim();
    let scale = h.frobenius_norm().max(1.0);
    let tiny = f64::EPSILON * scale;
    let mut x: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0, 0.1 * i as f64))
        .collect();
    for _ in 0..3 {
        let mut m = h.as_slice().to_vec();
        for i in 0..n {
            m[i * n + i] -= e;
        }
        solve_in_place(&mut m, &mut x, n, tiny);
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            break;
        }
        for v in &mut x {
            *v /= norm;
        }
    }
    x
}

/// `‖(H - eI) v‖ / ‖H‖` for a unit vector `v`.
pub fn relative_residual(h: &ComplexMatrix, e: Complex64, v: &[Complex64]) -> f64 {
    let hv = h.mul_vec(v);
    let r: f64 = hv
        .iter()
        .zip(v)
        .map(|(a, b)| (a - e * b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    r / h.frobenius_norm().max(f64::MIN_POSITIVE)
}
