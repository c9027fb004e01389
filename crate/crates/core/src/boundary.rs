//! Boundary identification on estimated decay curves.
//!
//! A boundary is the first distance, scanning rightward from a reference
//! point, at which the curve has decayed to the threshold level
//! `(1 - decay_threshold) * reference_level`. The crossing is localized by
//! linear interpolation between the bracketing valid grid points. When the
//! curve never reaches the threshold on the valid grid the result is an
//! explicit [`BoundaryKind::NoBoundary`] — never a fabricated finite
//! distance.

use thiserror::Error;

use crate::estimator::CurveEstimate;

/// Where the reference level is read.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReferenceMode {
    /// Reference at the start of the grid.
    AtOrigin,
    /// Reference at the maximum of the fitted curve; the scan starts at the
    /// location of the maximum.
    AtMaximum,
    /// Reference at the valid grid point nearest to the given distance.
    /// Parametric power-law boundaries use this mode, since their level at
    /// zero distance is unbounded.
    AtDistance(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryKind {
    /// The curve crosses the threshold at this distance (miles).
    Finite(f64),
    /// The curve never decays past the threshold within the valid grid.
    NoBoundary,
}

impl BoundaryKind {
    pub fn distance(&self) -> Option<f64> {
        match self {
            BoundaryKind::Finite(d) => Some(*d),
            BoundaryKind::NoBoundary => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, BoundaryKind::Finite(_))
    }
}

/// A boundary verdict together with the levels that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryResult {
    pub kind: BoundaryKind,
    /// Curve level at the reference point.
    pub reference_level: f64,
    /// `(1 - decay_threshold) * reference_level`.
    pub threshold_level: f64,
    pub reference_mode: ReferenceMode,
    /// Relative decay fraction in (0, 1).
    pub decay_threshold: f64,
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum BoundaryError {
    #[error("need at least 2 valid grid points to scan for a boundary")]
    InsufficientCurve,
    #[error("decay threshold must lie strictly between 0 and 1, got {0}")]
    InvalidThreshold(f64),
    #[error("the reference grid point is not a valid fit")]
    ReferencePointInvalid,
    #[error("parametric fit did not converge")]
    UnconvergedFit,
    #[error("power-law boundaries require a positive reference distance")]
    InvalidReferenceDistance,
}

/// Locate the decay boundary of a fitted curve.
///
/// The reference level is the curve value at the reference point; scanning
/// rightward from there, the boundary is the first crossing of
/// `(1 - decay_threshold) * reference_level`, interpolated between the
/// bracketing grid points. Invalid grid points are skipped during the scan.
pub fn find_boundary(
    curve: &CurveEstimate,
    decay_threshold: f64,
    reference_mode: ReferenceMode,
) -> Result<BoundaryResult, BoundaryError> {
    find_boundary_on(
        curve.grid(),
        curve.values(),
        curve.valid_mask(),
        decay_threshold,
        reference_mode,
    )
}

/// [`find_boundary`] over raw curve slices (for curves loaded from files
/// rather than produced by the estimator). The slices must be equal-length
/// with a strictly increasing grid.
pub fn find_boundary_on(
    grid: &[f64],
    values: &[f64],
    valid_mask: &[bool],
    decay_threshold: f64,
    reference_mode: ReferenceMode,
) -> Result<BoundaryResult, BoundaryError> {
    let view = CurveView {
        grid,
        values,
        valid_mask,
    };
    if !(decay_threshold > 0.0 && decay_threshold < 1.0) {
        return Err(BoundaryError::InvalidThreshold(decay_threshold));
    }
    if view.n_valid() < 2 {
        return Err(BoundaryError::InsufficientCurve);
    }
    let reference_index = locate_reference(&view, reference_mode)?;
    let reference_level = values[reference_index];
    let threshold_level = (1.0 - decay_threshold) * reference_level;
    let kind = first_crossing(&view, reference_index, threshold_level);
    Ok(BoundaryResult {
        kind,
        reference_level,
        threshold_level,
        reference_mode,
        decay_threshold,
    })
}

struct CurveView<'a> {
    grid: &'a [f64],
    values: &'a [f64],
    valid_mask: &'a [bool],
}

impl CurveView<'_> {
    fn n_valid(&self) -> usize {
        self.valid_mask.iter().filter(|&&m| m).count()
    }
}

/// Boundary of a hump-shaped curve measured against its own amplitude: the
/// threshold level sits `amplitude_fraction` of the way from the curve's
/// far-field baseline up to its valid maximum, and the scan starts at the
/// maximum.
///
/// The baseline is the mean curve level over the final tenth of the valid
/// grid span. Taking the curve minimum instead would be biased low under
/// noise (it selects the most negative wiggle), which systematically drags
/// the boundary outward. Intended for pronounced peaks that have decayed
/// by the far edge; on a flat curve the amplitude is pure noise and the
/// verdict is no boundary.
pub fn find_amplitude_boundary(
    curve: &CurveEstimate,
    amplitude_fraction: f64,
) -> Result<BoundaryResult, BoundaryError> {
    if !(amplitude_fraction > 0.0 && amplitude_fraction < 1.0) {
        return Err(BoundaryError::InvalidThreshold(amplitude_fraction));
    }
    if curve.n_valid() < 2 {
        return Err(BoundaryError::InsufficientCurve);
    }
    let view = CurveView {
        grid: curve.grid(),
        values: curve.values(),
        valid_mask: curve.valid_mask(),
    };
    let peak_index = locate_reference(&view, ReferenceMode::AtMaximum)?;
    let reference_level = curve.values()[peak_index];
    let first_valid = curve.valid_points().next().map(|(d, _)| d).unwrap();
    let last_valid = curve.valid_points().last().map(|(d, _)| d).unwrap();
    let window_start = last_valid - 0.1 * (last_valid - first_valid);
    let mut tail_sum = 0.0;
    let mut tail_count = 0usize;
    for (d, v) in curve.valid_points() {
        if d >= window_start {
            tail_sum += v;
            tail_count += 1;
        }
    }
    let baseline = tail_sum / tail_count as f64;
    let amplitude = reference_level - baseline;

    let degenerate = amplitude <= 1e-12 * reference_level.abs().max(1.0);
    let threshold_level = baseline + amplitude_fraction * amplitude;
    let implied = 1.0 - threshold_level / reference_level;
    if !degenerate && !(implied > 0.0 && implied < 1.0) {
        return Err(BoundaryError::InvalidThreshold(implied));
    }
    let kind = if degenerate {
        BoundaryKind::NoBoundary
    } else {
        first_crossing(&view, peak_index, threshold_level)
    };
    Ok(BoundaryResult {
        kind,
        reference_level,
        threshold_level,
        reference_mode: ReferenceMode::AtMaximum,
        decay_threshold: if degenerate { amplitude_fraction } else { implied },
    })
}

fn locate_reference(curve: &CurveView<'_>, mode: ReferenceMode) -> Result<usize, BoundaryError> {
    let valid = curve.valid_mask;
    match mode {
        ReferenceMode::AtOrigin => {
            if valid[0] {
                Ok(0)
            } else {
                Err(BoundaryError::ReferencePointInvalid)
            }
        }
        ReferenceMode::AtMaximum => {
            let mut best: Option<(usize, f64)> = None;
            for (k, (&v, &ok)) in curve.values.iter().zip(valid.iter()).enumerate() {
                if ok {
                    let replace = match best {
                        None => true,
                        Some((_, bv)) => v > bv,
                    };
                    if replace {
                        best = Some((k, v));
                    }
                }
            }
            best.map(|(k, _)| k).ok_or(BoundaryError::ReferencePointInvalid)
        }
        ReferenceMode::AtDistance(d) => {
            if !d.is_finite() {
                return Err(BoundaryError::InvalidReferenceDistance);
            }
            let mut best: Option<(usize, f64)> = None;
            for (k, (&g, &ok)) in curve.grid.iter().zip(valid.iter()).enumerate() {
                if ok {
                    let gap = (g - d).abs();
                    let replace = match best {
                        None => true,
                        Some((_, bg)) => gap < bg,
                    };
                    if replace {
                        best = Some((k, gap));
                    }
                }
            }
            best.map(|(k, _)| k).ok_or(BoundaryError::ReferencePointInvalid)
        }
    }
}

/// First downward crossing of `threshold` at or after `start`, linearly
/// interpolated between the bracketing valid grid points.
fn first_crossing(curve: &CurveView<'_>, start: usize, threshold: f64) -> BoundaryKind {
    let grid = curve.grid;
    let values = curve.values;
    let valid = curve.valid_mask;

    let mut prev: Option<(f64, f64)> = None;
    for k in start..grid.len() {
        if !valid[k] {
            continue;
        }
        let v = values[k];
        if v <= threshold {
            let d_star = match prev {
                // The reference point itself already sits at or below the
                // threshold; the infimum is its own distance.
                None => grid[k],
                Some((pd, pv)) => pd + (pv - threshold) / (pv - v) * (grid[k] - pd),
            };
            return BoundaryKind::Finite(d_star);
        }
        prev = Some((grid[k], v));
    }
    BoundaryKind::NoBoundary
}
