//! Applied-statistics machinery for the CSV analysis pipelines: planar
//! distances and nearest-source matching, binned means, ordinary least
//! squares, Spearman rank correlation, chi-squared independence tests, and
//! logistic regression with standardized covariates.

pub mod binned;
pub mod contingency;
pub mod geo;
pub mod logistic;
pub mod ols;
pub mod rank;
pub mod special;

pub use binned::{binned_means, Bin, BinError, BinnedSeries};
pub use contingency::{chi_squared_independence, ChiSquared, ContingencyError};
pub use geo::{
    flat_distance_miles, great_circle_distance_miles, nearest_source_distance,
    nearest_source_distance_with, DistanceMetric, GeoError, GeoPoint,
};
pub use logistic::{logistic_fit, logistic_fit_with, LogisticError, LogisticFit, LogisticOptions};
pub use ols::{ols_fit, pct_change_per_10_miles, OlsError, RegressionFit};
pub use rank::{spearman, RankError};
pub use special::chi_squared_sf;
