//! Leave-one-out cross-validation scoring and grid-search bandwidth selection.
//!
//! The criterion for a candidate bandwidth is the mean squared error of
//! predicting each observation from a local linear fit computed with that
//! observation removed. The reference implementation literally refits per
//! observation ([`loo_cv_score_naive`]); the default path
//! ([`loo_cv_score`]) iterates neighbours in sorted order and restricts
//! each accumulation to a window outside of which Gaussian weights are
//! below 1e-31 of the peak. The two must agree to 1e-10 absolute; the test
//! suites enforce this.

use alloc::vec::Vec;
use thiserror::Error;

use crate::estimator::solve_weighted_line;
use crate::kernel::kernel_weight;
use crate::numeric::KahanSum;
use crate::sample::{Bandwidth, SpatialSample};

/// Scaled offsets beyond this contribute relative weight below ~5e-32 and
/// are skipped by the windowed accumulation.
const KERNEL_SUPPORT_RADIUS: f64 = 12.0;

/// Strictly increasing grid of candidate bandwidths.
#[derive(Debug, Clone, PartialEq)]
pub struct BandwidthGrid {
    candidates: Vec<Bandwidth>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CvError {
    #[error("bandwidth grid must be nonempty, positive, and strictly increasing")]
    InvalidGrid,
    #[error("leave-one-out scoring needs at least 3 observations, got {0}")]
    TooFewObservations(usize),
    #[error("no observation yielded a valid leave-one-out prediction")]
    NoValidPredictions,
}

impl BandwidthGrid {
    pub fn new(candidates: &[f64]) -> Result<Self, CvError> {
        if candidates.is_empty() {
            return Err(CvError::InvalidGrid);
        }
        let mut prev = 0.0;
        let mut out = Vec::with_capacity(candidates.len());
        for &h in candidates {
            if !(h > prev) || !h.is_finite() {
                return Err(CvError::InvalidGrid);
            }
            out.push(Bandwidth::new(h).map_err(|_| CvError::InvalidGrid)?);
            prev = h;
        }
        Ok(Self { candidates: out })
    }

    pub fn candidates(&self) -> &[Bandwidth] {
        &self.candidates
    }
}

impl Default for BandwidthGrid {
    /// The default candidate set in miles: {2, 5, 10, 15, 20}.
    fn default() -> Self {
        Self::new(&[2.0, 5.0, 10.0, 15.0, 20.0]).unwrap()
    }
}

/// Score of one candidate bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvScore {
    pub bandwidth: f64,
    /// Mean squared leave-one-out prediction error over the valid
    /// observations; infinite when no observation was predictable.
    pub cv_score: f64,
    pub n_valid: usize,
}

/// Full cross-validation record: every candidate's score plus the winner.
#[derive(Debug, Clone, PartialEq)]
pub struct CvResult {
    pub scores: Vec<CvScore>,
    pub selected: Bandwidth,
}

/// Selection options.
#[derive(Debug, Clone, Copy)]
pub struct CvOptions {
    /// Minimum fraction of observations that must yield valid leave-one-out
    /// predictions for a candidate to be eligible. Guards against selecting
    /// a tiny bandwidth that only scores well by dropping hard points.
    pub min_coverage: f64,
}

impl Default for CvOptions {
    fn default() -> Self {
        Self { min_coverage: 0.95 }
    }
}

/// Leave-one-out cross-validation score for one bandwidth (windowed path).
///
/// Returns the mean squared prediction error and the number of observations
/// whose leave-one-out fit was well-conditioned.
pub fn loo_cv_score(sample: &SpatialSample, bandwidth: Bandwidth) -> Result<(f64, usize), CvError> {
    let n = sample.len();
    if n < 3 {
        return Err(CvError::TooFewObservations(n));
    }
    let h = bandwidth.get();
    let radius = KERNEL_SUPPORT_RADIUS * h;

    // Iterate neighbours in distance order; the window bounds come from a
    // binary search over the sorted distances.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| {
        sample.distances()[a]
            .partial_cmp(&sample.distances()[b])
            .unwrap()
            .then(a.cmp(&b))
    });
    let sorted_d: Vec<f64> = order.iter().map(|&i| sample.distances()[i]).collect();
    let sorted_y: Vec<f64> = order.iter().map(|&i| sample.outcomes()[i]).collect();

    let mut sse = KahanSum::new();
    let mut n_valid = 0usize;
    for (i, (d0, y0)) in sample.pairs().enumerate() {
        let lo = sorted_d.partition_point(|&d| d < d0 - radius);
        let hi = sorted_d.partition_point(|&d| d <= d0 + radius);

        let mut s0 = KahanSum::new();
        let mut s1 = KahanSum::new();
        let mut s2 = KahanSum::new();
        let mut t0 = KahanSum::new();
        let mut t1 = KahanSum::new();
        for k in lo..hi {
            if order[k] == i {
                continue; // hold out the observation being predicted
            }
            let x = sorted_d[k] - d0;
            let w = kernel_weight(x / h) / h;
            s0.add(w);
            s1.add(w * x);
            s2.add(w * x * x);
            t0.add(w * sorted_y[k]);
            t1.add(w * x * sorted_y[k]);
        }
        if let Ok(fit) = solve_weighted_line(s0.value(), s1.value(), s2.value(), t0.value(), t1.value()) {
            let e = y0 - fit.intercept;
            sse.add(e * e);
            n_valid += 1;
        }
    }
    if n_valid == 0 {
        return Err(CvError::NoValidPredictions);
    }
    Ok((sse.value() / n_valid as f64, n_valid))
}

/// Reference leave-one-out implementation: one explicit refit per held-out
/// observation, accumulating in input order over the full sample.
pub fn loo_cv_score_naive(
    sample: &SpatialSample,
    bandwidth: Bandwidth,
) -> Result<(f64, usize), CvError> {
    let n = sample.len();
    if n < 3 {
        return Err(CvError::TooFewObservations(n));
    }
    let h = bandwidth.get();
    let mut sse = KahanSum::new();
    let mut n_valid = 0usize;
    for i in 0..n {
        let d0 = sample.distances()[i];
        let mut s0 = KahanSum::new();
        let mut s1 = KahanSum::new();
        let mut s2 = KahanSum::new();
        let mut t0 = KahanSum::new();
        let mut t1 = KahanSum::new();
        for (j, (d, y)) in sample.pairs().enumerate() {
            if j == i {
                continue;
            }
            let x = d - d0;
            let w = kernel_weight(x / h) / h;
            s0.add(w);
            s1.add(w * x);
            s2.add(w * x * x);
            t0.add(w * y);
            t1.add(w * x * y);
        }
        if let Ok(fit) = solve_weighted_line(s0.value(), s1.value(), s2.value(), t0.value(), t1.value())
        {
            let e = sample.outcomes()[i] - fit.intercept;
            sse.add(e * e);
            n_valid += 1;
        }
    }
    if n_valid == 0 {
        return Err(CvError::NoValidPredictions);
    }
    Ok((sse.value() / n_valid as f64, n_valid))
}

/// Score every candidate and select the minimizer, ties broken toward the
/// smaller bandwidth. Candidates covering fewer observations than the
/// default 95% coverage rule are ineligible.
pub fn select_bandwidth(sample: &SpatialSample, grid: &BandwidthGrid) -> Result<CvResult, CvError> {
    select_bandwidth_with(sample, grid, &CvOptions::default())
}

pub fn select_bandwidth_with(
    sample: &SpatialSample,
    grid: &BandwidthGrid,
    options: &CvOptions,
) -> Result<CvResult, CvError> {
    let n = sample.len();
    if n < 3 {
        return Err(CvError::TooFewObservations(n));
    }
    let required = options.min_coverage * n as f64;

    let mut scores = Vec::with_capacity(grid.candidates().len());
    let mut best: Option<(f64, Bandwidth)> = None;
    for &h in grid.candidates() {
        let (cv_score, n_valid) = match loo_cv_score(sample, h) {
            Ok(pair) => pair,
            Err(CvError::NoValidPredictions) => (f64::INFINITY, 0),
            Err(e) => return Err(e),
        };
        scores.push(CvScore {
            bandwidth: h.get(),
            cv_score,
            n_valid,
        });
        let eligible = (n_valid as f64) + 1e-9 >= required;
        if eligible {
            // Strict `<` keeps the earlier (smaller) candidate on ties.
            let better = match best {
                None => true,
                Some((s, _)) => cv_score < s,
            };
            if better {
                best = Some((cv_score, h));
            }
        }
    }
    match best {
        Some((_, selected)) => Ok(CvResult { scores, selected }),
        None => Err(CvError::NoValidPredictions),
    }
}
