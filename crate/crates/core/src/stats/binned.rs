//! Per-distance-bucket outcome means with normal-approximation confidence
//! intervals, the workhorse behind decay visualizations.

use alloc::vec::Vec;
use thiserror::Error;

/// One occupied distance bucket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bin {
    pub lower: f64,
    pub upper: f64,
    pub mean: f64,
    /// Half-width of the 95% confidence interval, `1.96 * sd / sqrt(count)`.
    pub ci_half_width: f64,
    pub count: usize,
}

/// Non-overlapping, ascending bins; empty buckets are omitted.
#[derive(Debug, Clone, PartialEq)]
pub struct BinnedSeries {
    pub bins: Vec<Bin>,
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum BinError {
    #[error("need at least two ascending bin edges")]
    NoBins,
    #[error("bin edges must be finite and strictly ascending")]
    InvalidEdges,
    #[error("distances ({0}) and outcomes ({1}) differ in length")]
    LengthMismatch(usize, usize),
}

/// Bucket `outcomes` by `distances` into `[e_k, e_{k+1})` bins (the last
/// bin includes its upper edge) and compute per-bin means with 95% CIs.
pub fn binned_means(
    distances: &[f64],
    outcomes: &[f64],
    bin_edges: &[f64],
) -> Result<BinnedSeries, BinError> {
    if distances.len() != outcomes.len() {
        return Err(BinError::LengthMismatch(distances.len(), outcomes.len()));
    }
    if bin_edges.len() < 2 {
        return Err(BinError::NoBins);
    }
    for w in bin_edges.windows(2) {
        if !w[0].is_finite() || !w[1].is_finite() || w[1] <= w[0] {
            return Err(BinError::InvalidEdges);
        }
    }
    let k = bin_edges.len() - 1;
    let mut count = alloc::vec![0usize; k];
    let mut sum = alloc::vec![0.0f64; k];
    let mut sumsq = alloc::vec![0.0f64; k];
    let last_upper = bin_edges[k];
    for (&d, &y) in distances.iter().zip(outcomes.iter()) {
        if d < bin_edges[0] || d > last_upper {
            continue;
        }
        // partition_point gives the first edge > d; the bin is the one to
        // its left, with the top edge folded into the final bin.
        let idx = bin_edges.partition_point(|&e| e <= d).min(k) - 1;
        count[idx] += 1;
        sum[idx] += y;
        sumsq[idx] += y * y;
    }
    let mut bins = Vec::new();
    for i in 0..k {
        if count[i] == 0 {
            continue;
        }
        let n = count[i] as f64;
        let mean = sum[i] / n;
        let sd = if count[i] >= 2 {
            let var = (sumsq[i] - n * mean * mean) / (n - 1.0);
            libm::sqrt(var.max(0.0))
        } else {
            0.0
        };
        bins.push(Bin {
            lower: bin_edges[i],
            upper: bin_edges[i + 1],
            mean,
            ci_half_width: 1.96 * sd / libm::sqrt(n),
            count: count[i],
        });
    }
    if bins.is_empty() {
        return Err(BinError::NoBins);
    }
    Ok(BinnedSeries { bins })
}
