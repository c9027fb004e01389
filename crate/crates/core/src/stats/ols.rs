//! Ordinary least squares with conventional standard errors.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use thiserror::Error;

use crate::numeric::{solve_spd, spd_inverse_diagonal};

const PIVOT_FLOOR: f64 = 1e-10;

/// A fitted linear model. The intercept is always the first coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub standard_errors: Vec<f64>,
    /// Centered R-squared.
    pub r_squared: f64,
    pub n: usize,
}

impl RegressionFit {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.coefficients[i])
    }

    pub fn standard_error(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.standard_errors[i])
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum OlsError {
    #[error("design needs at least one column")]
    EmptyDesign,
    #[error("design columns and response must share one length >= columns + 2")]
    TooFewRows,
    #[error("column lengths are inconsistent")]
    LengthMismatch,
    #[error("design columns contain non-finite values")]
    NonFiniteValue,
    #[error("design is exactly or numerically collinear")]
    Collinear,
}

/// Least-squares fit of `response` on the named columns plus an intercept.
pub fn ols_fit(columns: &[(&str, &[f64])], response: &[f64]) -> Result<RegressionFit, OlsError> {
    if columns.is_empty() {
        return Err(OlsError::EmptyDesign);
    }
    let n = response.len();
    let k = columns.len() + 1; // intercept
    for (_, col) in columns {
        if col.len() != n {
            return Err(OlsError::LengthMismatch);
        }
    }
    if n < k + 1 {
        return Err(OlsError::TooFewRows);
    }
    for (_, col) in columns {
        if col.iter().any(|v| !v.is_finite()) {
            return Err(OlsError::NonFiniteValue);
        }
    }
    if response.iter().any(|v| !v.is_finite()) {
        return Err(OlsError::NonFiniteValue);
    }

    let design = |row: usize, col: usize| -> f64 {
        if col == 0 {
            1.0
        } else {
            columns[col - 1].1[row]
        }
    };

    // Normal equations X'X and X'y.
    let mut xtx = alloc::vec![0.0; k * k];
    let mut xty = alloc::vec![0.0; k];
    for row in 0..n {
        for i in 0..k {
            let xi = design(row, i);
            xty[i] += xi * response[row];
            for j in i..k {
                xtx[i * k + j] += xi * design(row, j);
            }
        }
    }
    for i in 0..k {
        for j in 0..i {
            xtx[i * k + j] = xtx[j * k + i];
        }
    }

    let beta = solve_spd(&xtx, &xty, k, PIVOT_FLOOR).ok_or(OlsError::Collinear)?;

    let mut rss = 0.0;
    let mut mean_y = 0.0;
    for &y in response {
        mean_y += y;
    }
    mean_y /= n as f64;
    let mut tss = 0.0;
    for row in 0..n {
        let mut fitted = 0.0;
        for i in 0..k {
            fitted += beta[i] * design(row, i);
        }
        let e = response[row] - fitted;
        rss += e * e;
        let c = response[row] - mean_y;
        tss += c * c;
    }
    let sigma2 = rss / (n - k) as f64;
    let inv_diag = spd_inverse_diagonal(&xtx, k, PIVOT_FLOOR).ok_or(OlsError::Collinear)?;
    let standard_errors: Vec<f64> = inv_diag
        .iter()
        .map(|&v| libm::sqrt((sigma2 * v).max(0.0)))
        .collect();
    let r_squared = if tss > 0.0 {
        (1.0 - rss / tss).clamp(0.0, 1.0)
    } else {
        0.0
    };

    let mut names = Vec::with_capacity(k);
    names.push("intercept".to_string());
    for (name, _) in columns {
        names.push((*name).to_string());
    }
    Ok(RegressionFit {
        names,
        coefficients: beta,
        standard_errors,
        r_squared,
        n,
    })
}

/// Percent change implied by a per-mile slope on a log outcome over a
/// 10-mile move: `(exp(10 * slope) - 1) * 100`.
pub fn pct_change_per_10_miles(slope: f64) -> f64 {
    (libm::exp(10.0 * slope) - 1.0) * 100.0
}
