//! Estimation of spatial decay curves and treatment-effect boundaries.
//!
//! Given paired (distance, outcome) observations, this crate estimates the
//! conditional mean outcome as a function of distance via Gaussian-kernel
//! local linear regression, selects the bandwidth by leave-one-out
//! cross-validation, and locates the distance at which the curve has decayed
//! past a relative threshold — explicitly reporting *no boundary* when the
//! curve never crosses it. A nonlinear least-squares exponential fit is
//! provided as the parametric baseline, together with a seeded Monte Carlo
//! harness that compares the two approaches over repeated draws from a set
//! of reference data-generating processes.
//!
//! The crate also carries the supporting applied-statistics machinery used
//! by the CSV pipelines in the companion CLI crate: planar degree-to-mile
//! distances, nearest-source matching, binned means, OLS, Spearman rank
//! correlation, chi-squared independence tests, and logistic regression.
//!
//! The crate is `no_std`-compatible (requires `alloc`); disable default
//! features to drop `std`. All transcendental math goes through `libm` in
//! both modes so results are bit-identical regardless of feature selection.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod bandwidth;
pub mod boundary;
pub mod dgp;
pub mod estimator;
pub mod kernel;
pub mod monte_carlo;
pub mod nls;
mod numeric;
pub mod sample;
pub mod stats;

pub use bandwidth::{select_bandwidth, BandwidthGrid, CvError, CvResult, CvScore};
pub use boundary::{
    find_amplitude_boundary, find_boundary, find_boundary_on, BoundaryError, BoundaryKind,
    BoundaryResult, ReferenceMode,
};
pub use dgp::{generate_dgp, DgpError, DgpKind, DgpSpec};
pub use estimator::{
    default_grid, estimate_curve, local_linear_fit, CurveError, CurveEstimate, CurveOptions,
    FitError, LocalFit,
};
pub use kernel::kernel_weight;
pub use monte_carlo::{
    run_replication, run_study, summarize_replications, BandwidthMode, HumpBoundaryRule, Method,
    MethodSummary, MonteCarloReport, ReplicationOutcome, ReplicationPair, ReplicationStatus,
    StudyOptions,
};
pub use nls::{
    fit_exponential, fit_power_law, fit_power_law_with, parametric_boundary,
    parametric_boundary_with, NlsError, ParametricBoundaryOptions, ParametricFit, ParametricModel,
};
pub use sample::{Bandwidth, BandwidthError, SampleError, SpatialSample};
pub use stats::{
    binned_means, chi_squared_independence, chi_squared_sf, flat_distance_miles,
    great_circle_distance_miles, logistic_fit, logistic_fit_with, nearest_source_distance,
    nearest_source_distance_with, ols_fit, pct_change_per_10_miles, spearman, Bin, BinError,
    BinnedSeries, ChiSquared, ContingencyError, DistanceMetric, GeoError, GeoPoint, LogisticError,
    LogisticFit, LogisticOptions, OlsError, RankError, RegressionFit,
};
