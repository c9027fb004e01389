//! The Gaussian kernel used for all local weighting.

/// `1 / sqrt(2 * pi)`.
const INV_SQRT_2PI: f64 = 0.3989422804014327;

/// Gaussian kernel weight at the scaled offset `u`.
///
/// Strictly positive and symmetric for every finite input; integrates to one
/// over the real line.
#[inline]
pub fn kernel_weight(u: f64) -> f64 {
    INV_SQRT_2PI * libm::exp(-0.5 * u * u)
}
