//! Planar degree-to-mile distances and nearest-source matching.
//!
//! The default metric multiplies the Euclidean distance in decimal degrees
//! by 69 miles per degree, treating longitude degrees the same as latitude
//! degrees. That flat approximation is deliberately reproduced as the
//! reference semantics of the analysis pipelines; a great-circle
//! alternative is available behind [`DistanceMetric`] but is never the
//! default.

use alloc::vec::Vec;
use thiserror::Error;

/// Miles per decimal degree at mid-latitudes.
pub const MILES_PER_DEGREE: f64 = 69.0;

/// Mean Earth radius in miles, for the great-circle alternative.
const EARTH_RADIUS_MILES: f64 = 3958.7613;

/// A latitude/longitude pair in decimal degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoPoint {
    latitude: f64,
    longitude: f64,
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum GeoError {
    #[error("latitude must lie in [-90, 90], got {0}")]
    InvalidLatitude(f64),
    #[error("longitude must lie in [-180, 180], got {0}")]
    InvalidLongitude(f64),
    #[error("the source list is empty")]
    EmptySources,
}

impl GeoPoint {
    pub fn new(latitude: f64, longitude: f64) -> Result<Self, GeoError> {
        if !latitude.is_finite() || !(-90.0..=90.0).contains(&latitude) {
            return Err(GeoError::InvalidLatitude(latitude));
        }
        if !longitude.is_finite() || !(-180.0..=180.0).contains(&longitude) {
            return Err(GeoError::InvalidLongitude(longitude));
        }
        Ok(Self {
            latitude,
            longitude,
        })
    }

    pub fn latitude(&self) -> f64 {
        self.latitude
    }

    pub fn longitude(&self) -> f64 {
        self.longitude
    }
}

/// Flat-approximation distance: `69 * sqrt(dlat^2 + dlon^2)` in miles.
pub fn flat_distance_miles(a: GeoPoint, b: GeoPoint) -> f64 {
    let dlat = a.latitude - b.latitude;
    let dlon = a.longitude - b.longitude;
    MILES_PER_DEGREE * libm::sqrt(dlat * dlat + dlon * dlon)
}

/// Haversine great-circle distance in miles.
pub fn great_circle_distance_miles(a: GeoPoint, b: GeoPoint) -> f64 {
    let to_rad = core::f64::consts::PI / 180.0;
    let (lat1, lat2) = (a.latitude * to_rad, b.latitude * to_rad);
    let dlat = lat2 - lat1;
    let dlon = (b.longitude - a.longitude) * to_rad;
    let s1 = libm::sin(dlat / 2.0);
    let s2 = libm::sin(dlon / 2.0);
    let h = s1 * s1 + libm::cos(lat1) * libm::cos(lat2) * s2 * s2;
    2.0 * EARTH_RADIUS_MILES * libm::asin(libm::sqrt(h.min(1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DistanceMetric {
    /// The flat 69-miles-per-degree approximation (reference semantics).
    #[default]
    FlatDegrees,
    /// Haversine great-circle miles.
    GreatCircle,
}

impl DistanceMetric {
    pub fn distance(&self, a: GeoPoint, b: GeoPoint) -> f64 {
        match self {
            DistanceMetric::FlatDegrees => flat_distance_miles(a, b),
            DistanceMetric::GreatCircle => great_circle_distance_miles(a, b),
        }
    }
}

/// Per target, the minimum distance over all sources, by exhaustive search.
/// Any accelerated index must reproduce these values exactly.
pub fn nearest_source_distance(
    targets: &[GeoPoint],
    sources: &[GeoPoint],
) -> Result<Vec<f64>, GeoError> {
    nearest_source_distance_with(targets, sources, DistanceMetric::FlatDegrees)
}

pub fn nearest_source_distance_with(
    targets: &[GeoPoint],
    sources: &[GeoPoint],
    metric: DistanceMetric,
) -> Result<Vec<f64>, GeoError> {
    if sources.is_empty() {
        return Err(GeoError::EmptySources);
    }
    Ok(targets
        .iter()
        .map(|&t| {
            sources
                .iter()
                .map(|&s| metric.distance(t, s))
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}
