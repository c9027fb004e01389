//! Validated input types: distance/outcome samples and kernel bandwidths.

use alloc::vec::Vec;
use thiserror::Error;

/// Paired (distance, outcome) observations — the universal estimator input.
///
/// Construction enforces the invariants every routine in this crate assumes:
/// equal lengths of at least two, finite non-negative distances, finite
/// outcomes. Once built, a sample is immutable and safe to share across
/// threads.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialSample {
    distances: Vec<f64>,
    outcomes: Vec<f64>,
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error("distances ({distances}) and outcomes ({outcomes}) differ in length")]
    LengthMismatch { distances: usize, outcomes: usize },
    #[error("need at least 2 observations, got {0}")]
    TooFewObservations(usize),
    #[error("distance at index {0} is not finite")]
    NonFiniteDistance(usize),
    #[error("distance at index {0} is negative")]
    NegativeDistance(usize),
    #[error("outcome at index {0} is not finite")]
    NonFiniteOutcome(usize),
}

impl SpatialSample {
    pub fn new(distances: Vec<f64>, outcomes: Vec<f64>) -> Result<Self, SampleError> {
        if distances.len() != outcomes.len() {
            return Err(SampleError::LengthMismatch {
                distances: distances.len(),
                outcomes: outcomes.len(),
            });
        }
        if distances.len() < 2 {
            return Err(SampleError::TooFewObservations(distances.len()));
        }
        for (i, &d) in distances.iter().enumerate() {
            if !d.is_finite() {
                return Err(SampleError::NonFiniteDistance(i));
            }
            if d < 0.0 {
                return Err(SampleError::NegativeDistance(i));
            }
        }
        for (i, &y) in outcomes.iter().enumerate() {
            if !y.is_finite() {
                return Err(SampleError::NonFiniteOutcome(i));
            }
        }
        Ok(Self {
            distances,
            outcomes,
        })
    }

    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires >= 2 observations
    }

    pub fn distances(&self) -> &[f64] {
        &self.distances
    }

    pub fn outcomes(&self) -> &[f64] {
        &self.outcomes
    }

    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.distances
            .iter()
            .copied()
            .zip(self.outcomes.iter().copied())
    }

    pub fn max_distance(&self) -> f64 {
        self.distances.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_distance(&self) -> f64 {
        self.distances.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Sample with observation `index` removed. Used by the leave-one-out
    /// reference path; the result still satisfies all sample invariants as
    /// long as at least two observations remain.
    pub fn leave_out(&self, index: usize) -> Result<Self, SampleError> {
        if self.len() - 1 < 2 {
            return Err(SampleError::TooFewObservations(self.len() - 1));
        }
        let mut d = Vec::with_capacity(self.len() - 1);
        let mut y = Vec::with_capacity(self.len() - 1);
        for i in 0..self.len() {
            if i != index {
                d.push(self.distances[i]);
                y.push(self.outcomes[i]);
            }
        }
        Ok(Self {
            distances: d,
            outcomes: y,
        })
    }
}

/// Positive, finite kernel scale in miles.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Bandwidth(f64);

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum BandwidthError {
    #[error("bandwidth must be positive and finite, got {0}")]
    NotPositive(f64),
}

impl Bandwidth {
    pub fn new(h: f64) -> Result<Self, BandwidthError> {
        if h > 0.0 && h.is_finite() {
            Ok(Self(h))
        } else {
            Err(BandwidthError::NotPositive(h))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}
