//! Binary logistic regression by iteratively reweighted least squares.
//!
//! The design columns are expected to arrive standardized (mean 0, sample
//! standard deviation 1); that is verified on entry so that reported odds
//! ratios are per standardized unit, comparable across covariates. A
//! raw-mode switch skips the check. The intercept is added internally and
//! exempt from standardization.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use thiserror::Error;

use crate::numeric::{solve_spd, spd_inverse_diagonal};

const PIVOT_FLOOR: f64 = 1e-10;

/// A fitted logistic model. Coefficients are log-odds per unit of the
/// (standardized) covariate; `odds_ratios[k]` is exactly
/// `exp(coefficients[k])`.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub odds_ratios: Vec<f64>,
    pub standard_errors: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Rank-statistic AUC of the fitted probabilities against the labels.
    pub auc: f64,
    pub log_likelihood: f64,
    pub n: usize,
}

impl LogisticFit {
    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.coefficients[i])
    }

    pub fn odds_ratio(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.odds_ratios[i])
    }

    pub fn standard_error(&self, name: &str) -> Option<f64> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.standard_errors[i])
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LogisticError {
    #[error("design needs at least one column")]
    EmptyDesign,
    #[error("design columns and response must share one length")]
    LengthMismatch,
    #[error("need more rows than coefficients")]
    TooFewRows,
    #[error("response must contain both classes")]
    SingleClass,
    #[error("column '{0}' is not standardized to mean 0, sd 1")]
    NotStandardized(String),
    #[error("design columns contain non-finite values")]
    NonFiniteValue,
    #[error("likelihood is unbounded (complete separation)")]
    CompleteSeparation,
    #[error("weighted normal equations became singular")]
    Singular,
}

#[derive(Debug, Clone, Copy)]
pub struct LogisticOptions {
    /// Verify that every column has mean ~0 and sample sd ~1 (within 1e-6).
    pub check_standardized: bool,
    pub max_iterations: usize,
}

impl Default for LogisticOptions {
    fn default() -> Self {
        Self {
            check_standardized: true,
            max_iterations: 100,
        }
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + libm::exp(-z))
    } else {
        let e = libm::exp(z);
        e / (1.0 + e)
    }
}

/// Maximum-likelihood logistic fit of a binary response on the named
/// standardized columns plus an intercept.
pub fn logistic_fit(
    columns: &[(&str, &[f64])],
    response: &[bool],
) -> Result<LogisticFit, LogisticError> {
    logistic_fit_with(columns, response, &LogisticOptions::default())
}

pub fn logistic_fit_with(
    columns: &[(&str, &[f64])],
    response: &[bool],
    options: &LogisticOptions,
) -> Result<LogisticFit, LogisticError> {
    if columns.is_empty() {
        return Err(LogisticError::EmptyDesign);
    }
    let n = response.len();
    let k = columns.len() + 1;
    for (_, col) in columns {
        if col.len() != n {
            return Err(LogisticError::LengthMismatch);
        }
        if col.iter().any(|v| !v.is_finite()) {
            return Err(LogisticError::NonFiniteValue);
        }
    }
    if n <= k {
        return Err(LogisticError::TooFewRows);
    }
    let n_pos = response.iter().filter(|&&y| y).count();
    if n_pos == 0 || n_pos == n {
        return Err(LogisticError::SingleClass);
    }
    if options.check_standardized {
        for (name, col) in columns {
            let mean: f64 = col.iter().sum::<f64>() / n as f64;
            let var: f64 =
                col.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n as f64 - 1.0);
            let sd = libm::sqrt(var);
            if mean.abs() > 1e-6 || (sd - 1.0).abs() > 1e-6 {
                return Err(LogisticError::NotStandardized((*name).to_string()));
            }
        }
    }

    let design = |row: usize, col: usize| -> f64 {
        if col == 0 {
            1.0
        } else {
            columns[col - 1].1[row]
        }
    };
    let y: Vec<f64> = response.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();

    let log_likelihood_at = |beta: &[f64]| -> f64 {
        let mut ll = 0.0;
        for row in 0..n {
            let mut eta = 0.0;
            for j in 0..k {
                eta += beta[j] * design(row, j);
            }
            // y*eta - ln(1 + e^eta), computed stably on both sides.
            ll += y[row] * eta - if eta > 0.0 {
                eta + libm::log(1.0 + libm::exp(-eta))
            } else {
                libm::log(1.0 + libm::exp(eta))
            };
        }
        ll
    };

    let mut beta = alloc::vec![0.0f64; k];
    let mut ll = log_likelihood_at(&beta);
    let mut converged = false;
    let mut iterations = 0usize;
    let mut xtwx = alloc::vec![0.0f64; k * k];
    let mut grad = alloc::vec![0.0f64; k];

    for iter in 1..=options.max_iterations {
        iterations = iter;
        xtwx.iter_mut().for_each(|v| *v = 0.0);
        grad.iter_mut().for_each(|v| *v = 0.0);
        for row in 0..n {
            let mut eta = 0.0;
            for j in 0..k {
                eta += beta[j] * design(row, j);
            }
            let p = sigmoid(eta);
            let w = p * (1.0 - p);
            let r = y[row] - p;
            for i in 0..k {
                let xi = design(row, i);
                grad[i] += xi * r;
                for j in i..k {
                    xtwx[i * k + j] += w * xi * design(row, j);
                }
            }
        }
        for i in 0..k {
            for j in 0..i {
                xtwx[i * k + j] = xtwx[j * k + i];
            }
        }
        let step = solve_spd(&xtwx, &grad, k, PIVOT_FLOOR).ok_or(LogisticError::Singular)?;
        for j in 0..k {
            beta[j] += step[j];
        }
        let new_ll = log_likelihood_at(&beta);
        let improvement = new_ll - ll;
        let max_step = step.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        let max_beta = beta.iter().fold(0.0f64, |m, b| m.max(b.abs()));
        if max_beta > 1e3 && improvement > 1e-10 {
            return Err(LogisticError::CompleteSeparation);
        }
        let done = max_step < 1e-8 || (improvement >= 0.0 && improvement < 1e-10);
        ll = new_ll;
        if done {
            converged = true;
            break;
        }
    }
    // Separable data saturates the likelihood at zero deviance while the
    // coefficients run off; a bounded maximum cannot reach this state.
    if ll > -1e-6 && beta.iter().any(|b| b.abs() > 100.0) {
        return Err(LogisticError::CompleteSeparation);
    }

    // Standard errors from the inverse observed information at the optimum.
    xtwx.iter_mut().for_each(|v| *v = 0.0);
    let mut probs = alloc::vec![0.0f64; n];
    for row in 0..n {
        let mut eta = 0.0;
        for j in 0..k {
            eta += beta[j] * design(row, j);
        }
        let p = sigmoid(eta);
        probs[row] = p;
        let w = p * (1.0 - p);
        for i in 0..k {
            let xi = design(row, i);
            for j in i..k {
                xtwx[i * k + j] += w * xi * design(row, j);
            }
        }
    }
    for i in 0..k {
        for j in 0..i {
            xtwx[i * k + j] = xtwx[j * k + i];
        }
    }
    let inv_diag = spd_inverse_diagonal(&xtwx, k, PIVOT_FLOOR).ok_or(LogisticError::Singular)?;
    let standard_errors: Vec<f64> = inv_diag.iter().map(|&v| libm::sqrt(v.max(0.0))).collect();
    let odds_ratios: Vec<f64> = beta.iter().map(|&b| libm::exp(b)).collect();

    let mut names = Vec::with_capacity(k);
    names.push("intercept".to_string());
    for (name, _) in columns {
        names.push((*name).to_string());
    }
    Ok(LogisticFit {
        names,
        coefficients: beta,
        odds_ratios,
        standard_errors,
        converged,
        iterations,
        auc: rank_auc(&probs, response),
        log_likelihood: ll,
        n,
    })
}

/// AUC as the Mann–Whitney rank statistic of the scores, with average ranks
/// on ties.
fn rank_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let ranks = super::rank::average_ranks(scores);
    let n_pos = labels.iter().filter(|&&l| l).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return 0.5;
    }
    let rank_sum_pos: f64 = ranks
        .iter()
        .zip(labels.iter())
        .filter(|(_, &l)| l)
        .map(|(&r, _)| r)
        .sum();
    let u = rank_sum_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    u / (n_pos as f64 * n_neg as f64)
}
