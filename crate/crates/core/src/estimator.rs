//! Gaussian-kernel local linear regression.
//!
//! At an evaluation point `d0`, the estimator minimizes the kernel-weighted
//! least squares criterion over an intercept and a slope in the centered
//! distance `d - d0`; the fitted intercept is the conditional-mean estimate
//! at `d0` and the slope is a local derivative estimate. Weights are
//! `kernel_weight((d - d0) / h) / h`.
//!
//! Fits that are numerically meaningless are reported as
//! [`FitError::IllConditioned`] rather than silently returning zeros or NaN:
//! either the total weight mass has underflowed (evaluation point far from
//! all data) or the weighted spread of the centered distances is negligible
//! (all usable weight on one distinct distance value).

use alloc::vec::Vec;
use thiserror::Error;

use crate::kernel::kernel_weight;
use crate::numeric::KahanSum;
use crate::sample::{Bandwidth, SpatialSample};

/// Total kernel weight mass below this is treated as underflow.
pub const WEIGHT_MASS_FLOOR: f64 = 1e-12;

/// Minimum weighted variance of centered distances (in squared miles, per
/// unit of weight mass) for the normal equations to be considered solvable.
pub const SECOND_MOMENT_FLOOR: f64 = 1e-12;

/// One pointwise weighted least-squares fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFit {
    /// Conditional-mean estimate at the evaluation point.
    pub intercept: f64,
    /// Local derivative estimate.
    pub slope: f64,
    /// Sum of kernel weights at the evaluation point.
    pub effective_weight_mass: f64,
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum FitError {
    #[error("evaluation point is not finite")]
    NonFiniteEvalPoint,
    #[error("weighted normal equations are ill-conditioned (weight mass {weight_mass:.3e})")]
    IllConditioned { weight_mass: f64 },
}

/// Fit the local linear model at `eval_point`.
pub fn local_linear_fit(
    sample: &SpatialSample,
    eval_point: f64,
    bandwidth: Bandwidth,
) -> Result<LocalFit, FitError> {
    if !eval_point.is_finite() {
        return Err(FitError::NonFiniteEvalPoint);
    }
    let h = bandwidth.get();

    // Weighted sums in input order with compensated accumulation, so that
    // results are reproducible and stable under sample permutations.
    let mut s0 = KahanSum::new();
    let mut s1 = KahanSum::new();
    let mut s2 = KahanSum::new();
    let mut t0 = KahanSum::new();
    let mut t1 = KahanSum::new();
    for (d, y) in sample.pairs() {
        let x = d - eval_point;
        let w = kernel_weight(x / h) / h;
        s0.add(w);
        s1.add(w * x);
        s2.add(w * x * x);
        t0.add(w * y);
        t1.add(w * x * y);
    }
    solve_weighted_line(s0.value(), s1.value(), s2.value(), t0.value(), t1.value())
}

/// Solve the 2x2 weighted normal equations given the five accumulated sums.
pub(crate) fn solve_weighted_line(
    s0: f64,
    s1: f64,
    s2: f64,
    t0: f64,
    t1: f64,
) -> Result<LocalFit, FitError> {
    if !(s0 >= WEIGHT_MASS_FLOOR) {
        return Err(FitError::IllConditioned { weight_mass: s0 });
    }
    let det = s0 * s2 - s1 * s1;
    if !(det >= SECOND_MOMENT_FLOOR * s0 * s0) {
        return Err(FitError::IllConditioned { weight_mass: s0 });
    }
    let slope = (s0 * t1 - s1 * t0) / det;
    let intercept = (t0 - slope * s1) / s0;
    if !intercept.is_finite() || !slope.is_finite() {
        return Err(FitError::IllConditioned { weight_mass: s0 });
    }
    Ok(LocalFit {
        intercept,
        slope,
        effective_weight_mass: s0,
    })
}

/// A fitted conditional-mean curve on an evaluation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveEstimate {
    grid: Vec<f64>,
    values: Vec<f64>,
    bandwidth: Bandwidth,
    valid_mask: Vec<bool>,
}

impl CurveEstimate {
    /// Assemble a curve from raw parts, enforcing the grid/value invariants.
    /// Values at invalid grid points are stored as NaN.
    pub fn from_parts(
        grid: Vec<f64>,
        values: Vec<f64>,
        valid_mask: Vec<bool>,
        bandwidth: Bandwidth,
    ) -> Result<Self, CurveError> {
        validate_grid(&grid)?;
        if values.len() != grid.len() || valid_mask.len() != grid.len() {
            return Err(CurveError::LengthMismatch);
        }
        for (v, &ok) in values.iter().zip(valid_mask.iter()) {
            if ok && !v.is_finite() {
                return Err(CurveError::NonFiniteValue);
            }
        }
        if !valid_mask.iter().any(|&m| m) {
            return Err(CurveError::AllPointsIllConditioned);
        }
        Ok(Self {
            grid,
            values,
            bandwidth,
            valid_mask,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn valid_mask(&self) -> &[bool] {
        &self.valid_mask
    }

    pub fn bandwidth(&self) -> Bandwidth {
        self.bandwidth
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn n_valid(&self) -> usize {
        self.valid_mask.iter().filter(|&&m| m).count()
    }

    /// Iterator over `(distance, value)` at the valid grid points.
    pub fn valid_points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.grid
            .iter()
            .zip(self.values.iter())
            .zip(self.valid_mask.iter())
            .filter(|(_, &ok)| ok)
            .map(|((&g, &v), _)| (g, v))
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum CurveError {
    #[error("evaluation grid is empty")]
    EmptyGrid,
    #[error("evaluation grid must be finite and strictly increasing")]
    InvalidGrid,
    #[error("grid, values, and validity mask must have equal lengths")]
    LengthMismatch,
    #[error("a grid point marked valid has a non-finite value")]
    NonFiniteValue,
    #[error("no grid point yielded a well-conditioned fit")]
    AllPointsIllConditioned,
}

/// Curve evaluation options.
#[derive(Debug, Clone, Copy, Default)]
pub struct CurveOptions {
    /// Permit evaluation outside the observed distance range. Off by
    /// default: boundary identification must not rest on extrapolation, so
    /// out-of-range grid points are marked invalid instead of being fitted.
    pub allow_extrapolation: bool,
}

fn validate_grid(grid: &[f64]) -> Result<(), CurveError> {
    if grid.is_empty() {
        return Err(CurveError::EmptyGrid);
    }
    if !grid[0].is_finite() {
        return Err(CurveError::InvalidGrid);
    }
    for w in grid.windows(2) {
        if !w[1].is_finite() || w[1] <= w[0] {
            return Err(CurveError::InvalidGrid);
        }
    }
    Ok(())
}

/// Default evaluation grid: `size` equally spaced points from zero to the
/// sample's maximum distance, dense enough to localize boundaries to well
/// under a percent of the distance range.
pub fn default_grid(sample: &SpatialSample, size: usize) -> Vec<f64> {
    let size = size.max(2);
    let max = sample.max_distance();
    let step = max / (size - 1) as f64;
    (0..size).map(|k| k as f64 * step).collect()
}

/// Estimate the conditional-mean curve on `grid`.
///
/// Grid points where the local fit is ill-conditioned (or that fall outside
/// the observed distance range while extrapolation is disallowed) are
/// reported through the validity mask; their stored value is NaN.
pub fn estimate_curve(
    sample: &SpatialSample,
    grid: &[f64],
    bandwidth: Bandwidth,
    options: &CurveOptions,
) -> Result<CurveEstimate, CurveError> {
    validate_grid(grid)?;
    let lo = 0.0;
    let hi = sample.max_distance();

    let mut values = Vec::with_capacity(grid.len());
    let mut valid = Vec::with_capacity(grid.len());
    for &d0 in grid {
        if !options.allow_extrapolation && (d0 < lo || d0 > hi) {
            values.push(f64::NAN);
            valid.push(false);
            continue;
        }
        match local_linear_fit(sample, d0, bandwidth) {
            Ok(fit) => {
                values.push(fit.intercept);
                valid.push(true);
            }
            Err(FitError::IllConditioned { .. }) => {
                values.push(f64::NAN);
                valid.push(false);
            }
            Err(FitError::NonFiniteEvalPoint) => return Err(CurveError::InvalidGrid),
        }
    }
    if !valid.iter().any(|&m| m) {
        return Err(CurveError::AllPointsIllConditioned);
    }
    Ok(CurveEstimate {
        grid: grid.to_vec(),
        values,
        bandwidth,
        valid_mask: valid,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(d: &[f64], y: &[f64]) -> SpatialSample {
        SpatialSample::new(d.to_vec(), y.to_vec()).unwrap()
    }

    fn bw(h: f64) -> Bandwidth {
        Bandwidth::new(h).unwrap()
    }

    #[test]
    fn reproduces_affine_data_exactly() {
        // y = 2 + 3 d is recovered for any bandwidth and evaluation point.
        let d = [0.0, 0.7, 1.9, 3.4, 5.0, 8.25];
        let y: Vec<f64> = d.iter().map(|&x| 2.0 + 3.0 * x).collect();
        let s = sample(&d, &y);
        for &h in &[0.5, 1.0, 4.0, 50.0] {
            for &d0 in &[0.0, 1.0, 2.5, 8.25] {
                let fit = local_linear_fit(&s, d0, bw(h)).unwrap();
                let target = 2.0 + 3.0 * d0;
                assert!(
                    (fit.intercept - target).abs() <= 1e-8 * target.abs().max(1.0),
                    "h={h} d0={d0}: {} vs {target}",
                    fit.intercept
                );
                assert!((fit.slope - 3.0).abs() <= 3.0 * 1e-8);
            }
        }
    }

    #[test]
    fn constant_data_gives_flat_fit() {
        let d = [0.0, 1.0, 2.0, 3.0];
        let y = [0.5; 4];
        let fit = local_linear_fit(&sample(&d, &y), 1.3, bw(2.0)).unwrap();
        assert!((fit.intercept - 0.5).abs() < 1e-12);
        assert!(fit.slope.abs() < 1e-12);
    }

    #[test]
    fn five_point_fit_matches_hand_solved_normal_equations() {
        // Golden values from an independent 30-digit solve of the weighted
        // 2x2 normal equations for this sample at d0 = 2, h = 1.
        let s = sample(&[0.0, 1.0, 2.0, 3.0, 4.0], &[1.0, 0.8, 0.7, 0.5, 0.45]);
        let fit = local_linear_fit(&s, 2.0, bw(1.0)).unwrap();
        assert!((fit.intercept - 0.6783043000271588).abs() < 1e-12);
        assert!((fit.slope - (-0.14410494777804828)).abs() < 1e-12);
        assert!((fit.effective_weight_mass - 0.9908656624660955).abs() < 1e-12);
    }

    #[test]
    fn single_distinct_distance_is_ill_conditioned() {
        let s = sample(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]);
        let err = local_linear_fit(&s, 2.0, bw(1.0)).unwrap_err();
        assert!(matches!(err, FitError::IllConditioned { .. }));
    }

    #[test]
    fn far_evaluation_point_underflows_weight_mass() {
        let s = sample(&[0.0, 1.0, 2.0], &[1.0, 2.0, 3.0]);
        let err = local_linear_fit(&s, 2.0 + 10.0, bw(0.1)).unwrap_err();
        match err {
            FitError::IllConditioned { weight_mass } => assert!(weight_mass < 1e-12),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn curve_reproduces_affine_on_grid() {
        // y = 2 + 3d on {0, 5, 10} comes back as {2, 17, 32}.
        let d: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        let y: Vec<f64> = d.iter().map(|&x| 2.0 + 3.0 * x).collect();
        let s = SpatialSample::new(d, y).unwrap();
        let curve = estimate_curve(&s, &[0.0, 5.0, 10.0], bw(2.0), &CurveOptions::default()).unwrap();
        let expect = [2.0, 17.0, 32.0];
        for (v, e) in curve.values().iter().zip(expect.iter()) {
            assert!((v - e).abs() < 1e-8 * e.max(1.0));
        }
        assert!(curve.valid_mask().iter().all(|&m| m));
    }

    #[test]
    fn extrapolation_guard_marks_out_of_range_points_invalid() {
        let s = sample(&[0.0, 1.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]);
        let grid = [0.0, 2.0, 13.0]; // 13 = 10 * h beyond the max distance
        let curve = estimate_curve(&s, &grid, bw(1.0), &CurveOptions::default()).unwrap();
        assert_eq!(curve.valid_mask(), &[true, true, false]);
        assert!(curve.values()[2].is_nan());

        let free = estimate_curve(
            &s,
            &grid,
            bw(1.0),
            &CurveOptions {
                allow_extrapolation: true,
            },
        )
        .unwrap();
        // With the guard off the far point is attempted and still fails on
        // weight underflow.
        assert_eq!(free.valid_mask(), &[true, true, false]);
    }

    #[test]
    fn empty_and_unsorted_grids_are_rejected() {
        let s = sample(&[0.0, 1.0, 2.0], &[1.0, 2.0, 3.0]);
        assert_eq!(
            estimate_curve(&s, &[], bw(1.0), &CurveOptions::default()).unwrap_err(),
            CurveError::EmptyGrid
        );
        assert_eq!(
            estimate_curve(&s, &[1.0, 1.0], bw(1.0), &CurveOptions::default()).unwrap_err(),
            CurveError::InvalidGrid
        );
        assert_eq!(
            estimate_curve(&s, &[2.0, 1.0], bw(1.0), &CurveOptions::default()).unwrap_err(),
            CurveError::InvalidGrid
        );
    }

    #[test]
    fn default_grid_spans_zero_to_max() {
        let s = sample(&[0.5, 7.0, 10.0], &[1.0, 2.0, 3.0]);
        let g = default_grid(&s, 5);
        assert_eq!(g.len(), 5);
        assert_eq!(g[0], 0.0);
        assert!((g[4] - 10.0).abs() < 1e-12);
        assert!((g[1] - 2.5).abs() < 1e-12);
    }

    #[test]
    fn huge_bandwidth_matches_global_ols() {
        // As h grows the local fit converges to the global least-squares
        // line through the sample.
        let d = [0.0, 1.0, 2.0, 4.0, 7.0, 9.0];
        let y = [1.2, 0.8, 1.1, 0.3, -0.2, 0.4];
        let s = sample(&d, &y);
        let n = d.len() as f64;
        let sx: f64 = d.iter().sum();
        let sy: f64 = y.iter().sum();
        let sxx: f64 = d.iter().map(|v| v * v).sum();
        let sxy: f64 = d.iter().zip(y.iter()).map(|(a, b)| a * b).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let intercept = (sy - slope * sx) / n;

        // The deviation from the global line shrinks as the bandwidth
        // grows; by 1000x the data range it is inside 1e-6 relative.
        let mut previous_error = f64::INFINITY;
        for &factor in &[100.0, 1000.0] {
            let h = factor * 9.0;
            let mut worst: f64 = 0.0;
            for &d0 in &[0.0, 3.0, 9.0] {
                let fit = local_linear_fit(&s, d0, bw(h)).unwrap();
                let target = intercept + slope * d0;
                worst = worst.max((fit.intercept - target).abs() / target.abs().max(1.0));
                worst = worst.max((fit.slope - slope).abs() / slope.abs().max(1.0));
            }
            assert!(worst < previous_error, "error must shrink with h");
            previous_error = worst;
        }
        assert!(
            previous_error <= 1e-6,
            "relative deviation {previous_error} at 1000x range"
        );
    }

    #[test]
    fn permutation_leaves_fit_essentially_unchanged() {
        let d = [0.3, 5.1, 2.2, 7.9, 4.4, 1.1, 6.6, 3.3];
        let y = [1.0, 0.2, 0.8, 0.1, 0.5, 0.9, 0.15, 0.6];
        let s = sample(&d, &y);
        let perm = [5usize, 2, 7, 0, 4, 6, 1, 3];
        let dp: Vec<f64> = perm.iter().map(|&i| d[i]).collect();
        let yp: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
        let sp = SpatialSample::new(dp, yp).unwrap();
        let a = local_linear_fit(&s, 3.0, bw(1.5)).unwrap();
        let b = local_linear_fit(&sp, 3.0, bw(1.5)).unwrap();
        assert!((a.intercept - b.intercept).abs() <= 1e-12 * a.intercept.abs().max(1.0));
        assert!((a.slope - b.slope).abs() <= 1e-12 * a.slope.abs().max(1.0));
    }
}
