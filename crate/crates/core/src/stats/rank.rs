//! Spearman rank correlation with average-rank tie handling.

use alloc::vec::Vec;
use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum RankError {
    #[error("need at least 3 paired observations, got {0}")]
    TooFewObservations(usize),
    #[error("inputs differ in length")]
    LengthMismatch,
    #[error("inputs contain non-finite values")]
    NonFiniteValue,
    #[error("one of the variables is constant; ranks carry no information")]
    ZeroVariance,
}

/// Average ranks (1-based); tied values share the mean of their positions.
pub(crate) fn average_ranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_unstable_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap().then(a.cmp(&b)));
    let mut ranks = alloc::vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman's rho: the Pearson correlation of the average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, RankError> {
    if x.len() != y.len() {
        return Err(RankError::LengthMismatch);
    }
    if x.len() < 3 {
        return Err(RankError::TooFewObservations(x.len()));
    }
    if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
        return Err(RankError::NonFiniteValue);
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let n = x.len() as f64;
    let mean = (n + 1.0) / 2.0;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (a, b) in rx.iter().zip(ry.iter()) {
        let da = a - mean;
        let db = b - mean;
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return Err(RankError::ZeroVariance);
    }
    Ok(sxy / libm::sqrt(sxx * syy))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monotone_sequences_hit_the_bounds() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let up = [10.0, 20.0, 30.0, 40.0, 50.0];
        let down = [5.0, 4.0, 3.0, 2.0, 1.0];
        assert!((spearman(&x, &up).unwrap() - 1.0).abs() < 1e-15);
        assert!((spearman(&x, &down).unwrap() + 1.0).abs() < 1e-15);
    }

    #[test]
    fn eight_points_with_a_tie_match_the_rank_oracle() {
        // Golden value from an explicit rank-then-Pearson computation with
        // average ranks for the tied pair.
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        let y = [2.0, 1.0, 3.0, 3.0, 5.0, 8.0, 7.0, 9.0];
        let rho = spearman(&x, &y).unwrap();
        assert!((rho - 0.9461247469114746).abs() < 1e-12, "rho = {rho}");
    }

    #[test]
    fn tied_ranks_are_averaged() {
        let r = average_ranks(&[3.0, 1.0, 3.0, 2.0]);
        assert_eq!(r, alloc::vec![3.5, 1.0, 3.5, 2.0]);
    }

    #[test]
    fn constant_input_is_zero_variance() {
        assert_eq!(
            spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).unwrap_err(),
            RankError::ZeroVariance
        );
    }

    #[test]
    fn invariant_under_strictly_monotone_transforms() {
        let x = [0.3, 1.9, 0.7, 4.2, 2.8, 3.3];
        let y = [9.0, 2.0, 7.5, 0.4, 3.1, 1.0];
        let base = spearman(&x, &y).unwrap();
        let xt: Vec<f64> = x.iter().map(|&v| libm::exp(v)).collect();
        let yt: Vec<f64> = y.iter().map(|&v| 3.0 * v + 10.0).collect();
        let transformed = spearman(&xt, &yt).unwrap();
        assert!((base - transformed).abs() < 1e-15);
    }
}
