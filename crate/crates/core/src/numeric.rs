//! Small numerical helpers shared across the crate: compensated summation
//! and dense symmetric solves for the low-dimensional normal equations that
//! back the regression routines.

use alloc::vec;
use alloc::vec::Vec;

/// Kahan–Neumaier compensated accumulator.
///
/// Weighted sums are accumulated in input order; the compensation term keeps
/// the result stable under permutations of well-scaled inputs, which the
/// reproducibility tests rely on.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct KahanSum {
    sum: f64,
    compensation: f64,
}

impl KahanSum {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    pub(crate) fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Solve a symmetric positive definite system `a x = b` in place via
/// Cholesky, with diagonal equilibration. `a` is row-major `n x n`.
///
/// Returns `None` when the (equilibrated) matrix is numerically singular,
/// i.e. a pivot falls below `pivot_floor` relative to the unit diagonal.
pub(crate) fn solve_spd(a: &[f64], b: &[f64], n: usize, pivot_floor: f64) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(b.len(), n);

    let mut scale = vec![1.0; n];
    for j in 0..n {
        let d = a[j * n + j];
        if d > 0.0 && d.is_finite() {
            scale[j] = libm::sqrt(d);
        } else {
            return None;
        }
    }

    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = a[i * n + j] / (scale[i] * scale[j]);
        }
    }

    // Cholesky factorization, lower triangle of `m`.
    for i in 0..n {
        for j in 0..=i {
            let mut s = m[i * n + j];
            for k in 0..j {
                s -= m[i * n + k] * m[j * n + k];
            }
            if i == j {
                if s <= pivot_floor || !s.is_finite() {
                    return None;
                }
                m[i * n + j] = libm::sqrt(s);
            } else {
                m[i * n + j] = s / m[j * n + j];
            }
        }
    }

    let mut x = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i] / scale[i];
        for k in 0..i {
            s -= m[i * n + k] * x[k];
        }
        x[i] = s / m[i * n + i];
    }
    for i in (0..n).rev() {
        let mut s = x[i];
        for k in (i + 1)..n {
            s -= m[k * n + i] * x[k];
        }
        x[i] = s / m[i * n + i];
    }
    for i in 0..n {
        x[i] /= scale[i];
    }
    Some(x)
}

/// Diagonal of the inverse of a symmetric positive definite matrix, obtained
/// by solving against unit vectors. Used for conventional standard errors.
pub(crate) fn spd_inverse_diagonal(a: &[f64], n: usize, pivot_floor: f64) -> Option<Vec<f64>> {
    let mut out = vec![0.0; n];
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        let col = solve_spd(a, &e, n, pivot_floor)?;
        out[j] = col[j];
    }
    Some(out)
}
