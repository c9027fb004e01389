//! Simulation harness: repeated draws from a data-generating process,
//! parametric-versus-nonparametric boundary estimation on each draw, and
//! bias/RMSE/false-positive summaries across replications.
//!
//! Replication `r` of a study uses seed `base_seed + r`, so replications
//! are independent given their seeds and can be executed in any order (or
//! in parallel) as long as the outcomes are aggregated by replication
//! index; [`summarize_replications`] is order-sensitive only through the
//! slice it receives.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

use crate::bandwidth::{select_bandwidth_with, BandwidthGrid, CvOptions};
use crate::boundary::{find_amplitude_boundary, find_boundary, BoundaryResult, ReferenceMode};
use crate::dgp::{generate_dgp, DgpError, DgpKind, DgpSpec};
use crate::estimator::{default_grid, estimate_curve, CurveOptions};
use crate::nls::{fit_exponential, parametric_boundary_with, ParametricBoundaryOptions};
use crate::sample::Bandwidth;

/// Estimation approach under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Parametric,
    Nonparametric,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Parametric => "parametric",
            Method::Nonparametric => "nonparametric",
        }
    }
}

/// What one method produced on one replication. Failures are first-class
/// records, never silently dropped.
#[derive(Debug, Clone, PartialEq)]
pub enum ReplicationStatus {
    Boundary(BoundaryResult),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationOutcome {
    pub method: Method,
    pub seed: u64,
    pub status: ReplicationStatus,
    /// Bandwidth used by the nonparametric path; `None` for parametric
    /// outcomes.
    pub selected_bandwidth: Option<f64>,
}

/// Both methods' outcomes on the same generated sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationPair {
    pub parametric: ReplicationOutcome,
    pub nonparametric: ReplicationOutcome,
}

/// How the nonparametric path obtains its bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandwidthMode {
    /// Full leave-one-out cross-validation per replication.
    CrossValidated,
    /// A fixed bandwidth, for fast studies at reduced replication counts.
    Fixed(Bandwidth),
}

/// Threshold convention for hump-shaped processes, whose reference point is
/// the curve maximum rather than the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HumpBoundaryRule {
    /// Boundary where the curve drops below `(1 - decay_threshold)` of its
    /// maximum.
    RelativeToMax,
    /// Boundary where the peak-over-baseline amplitude has decayed to this
    /// fraction of itself.
    AmplitudeFraction(f64),
}

#[derive(Debug, Clone)]
pub struct StudyOptions {
    pub decay_threshold: f64,
    pub bandwidth_grid: BandwidthGrid,
    pub bandwidth_mode: BandwidthMode,
    pub eval_grid_size: usize,
    /// Run the parametric path the way the comparison is usually run in
    /// practice: accept the fitted rate as-is (no degeneracy floor, no
    /// convergence requirement) so that flat data produces spurious finite
    /// boundaries. Disable to get the library-default guarded behavior.
    pub unguarded_parametric: bool,
    pub hump_rule: HumpBoundaryRule,
}

impl Default for StudyOptions {
    fn default() -> Self {
        Self {
            decay_threshold: 0.10,
            bandwidth_grid: BandwidthGrid::default(),
            bandwidth_mode: BandwidthMode::CrossValidated,
            eval_grid_size: 200,
            unguarded_parametric: true,
            hump_rule: HumpBoundaryRule::AmplitudeFraction(0.2),
        }
    }
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum McError {
    #[error(transparent)]
    Dgp(#[from] DgpError),
    #[error("a study needs at least one replication")]
    NoReplications,
    #[error("decay threshold must lie strictly between 0 and 1")]
    InvalidThreshold,
}

/// Generate one sample and run both estimation paths on it.
pub fn run_replication(
    spec: &DgpSpec,
    n: usize,
    seed: u64,
    options: &StudyOptions,
) -> Result<ReplicationPair, McError> {
    if !(options.decay_threshold > 0.0 && options.decay_threshold < 1.0) {
        return Err(McError::InvalidThreshold);
    }
    let sample = generate_dgp(spec, n, seed)?;

    let parametric_status = match fit_exponential(&sample) {
        Err(e) => ReplicationStatus::Failed(format!("exponential fit: {e}")),
        Ok(fit) => {
            let boundary_options = ParametricBoundaryOptions {
                degeneracy_floor: if options.unguarded_parametric {
                    None
                } else {
                    Some(crate::nls::DEGENERACY_FLOOR)
                },
                require_convergence: !options.unguarded_parametric,
                ..Default::default()
            };
            match parametric_boundary_with(&fit, options.decay_threshold, &boundary_options) {
                Ok(b) => ReplicationStatus::Boundary(b),
                Err(e) => ReplicationStatus::Failed(format!("parametric boundary: {e}")),
            }
        }
    };

    let mut selected_bandwidth = None;
    let nonparametric_status = (|| {
        let h = match options.bandwidth_mode {
            BandwidthMode::Fixed(h) => h,
            BandwidthMode::CrossValidated => {
                select_bandwidth_with(&sample, &options.bandwidth_grid, &CvOptions::default())
                    .map_err(|e| format!("bandwidth selection: {e}"))?
                    .selected
            }
        };
        selected_bandwidth = Some(h.get());
        let grid = default_grid(&sample, options.eval_grid_size);
        let curve = estimate_curve(&sample, &grid, h, &CurveOptions::default())
            .map_err(|e| format!("curve estimation: {e}"))?;
        let boundary = match spec.kind {
            DgpKind::Hump => match options.hump_rule {
                HumpBoundaryRule::AmplitudeFraction(f) => find_amplitude_boundary(&curve, f),
                HumpBoundaryRule::RelativeToMax => {
                    find_boundary(&curve, options.decay_threshold, ReferenceMode::AtMaximum)
                }
            },
            _ => find_boundary(&curve, options.decay_threshold, ReferenceMode::AtOrigin),
        }
        .map_err(|e| format!("boundary search: {e}"))?;
        Ok(boundary)
    })();

    let nonparametric_status = match nonparametric_status {
        Ok(b) => ReplicationStatus::Boundary(b),
        Err(msg) => ReplicationStatus::Failed(msg),
    };

    Ok(ReplicationPair {
        parametric: ReplicationOutcome {
            method: Method::Parametric,
            seed,
            status: parametric_status,
            selected_bandwidth: None,
        },
        nonparametric: ReplicationOutcome {
            method: Method::Nonparametric,
            seed,
            status: nonparametric_status,
            selected_bandwidth,
        },
    })
}

/// Per-method aggregate over a study's replications.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: Method,
    /// Mean of (estimate - truth) over finite estimates; `None` when the
    /// process has no true boundary or no estimate was finite.
    pub bias: Option<f64>,
    /// Root mean squared error over the same finite estimates.
    pub rmse: Option<f64>,
    /// Fraction of replications reporting an explicit no-boundary verdict.
    pub no_boundary_rate: f64,
    /// Fraction of replications reporting a finite boundary although the
    /// process has none; `None` when the process has a true boundary.
    pub false_positive_rate: Option<f64>,
    /// Mean finite estimate on a process with no true boundary.
    pub mean_false_boundary: Option<f64>,
    pub mean_estimate: Option<f64>,
    pub n_finite: usize,
    pub n_no_boundary: usize,
    pub n_failed: usize,
    /// Mean selected bandwidth over replications that carry one.
    pub mean_selected_bandwidth: Option<f64>,
}

/// Study-level report: both methods summarized over R replications.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloReport {
    pub spec: DgpSpec,
    pub n_replications: usize,
    pub n_obs: usize,
    pub base_seed: u64,
    pub parametric: MethodSummary,
    pub nonparametric: MethodSummary,
}

fn summarize_method<'a, I>(method: Method, truth: Option<f64>, outcomes: I, total: usize) -> MethodSummary
where
    I: Iterator<Item = &'a ReplicationOutcome>,
{
    let mut finite = Vec::new();
    let mut n_no_boundary = 0usize;
    let mut n_failed = 0usize;
    let mut bw_sum = 0.0;
    let mut bw_count = 0usize;
    for outcome in outcomes {
        match &outcome.status {
            ReplicationStatus::Boundary(b) => match b.kind.distance() {
                Some(d) => finite.push(d),
                None => n_no_boundary += 1,
            },
            ReplicationStatus::Failed(_) => n_failed += 1,
        }
        if let Some(h) = outcome.selected_bandwidth {
            bw_sum += h;
            bw_count += 1;
        }
    }
    let n_finite = finite.len();
    let mean_estimate = if n_finite > 0 {
        Some(finite.iter().sum::<f64>() / n_finite as f64)
    } else {
        None
    };
    let (bias, rmse) = match truth {
        Some(t) if n_finite > 0 => {
            let bias = finite.iter().map(|d| d - t).sum::<f64>() / n_finite as f64;
            let mse = finite.iter().map(|d| (d - t) * (d - t)).sum::<f64>() / n_finite as f64;
            (Some(bias), Some(libm::sqrt(mse)))
        }
        _ => (None, None),
    };
    MethodSummary {
        method,
        bias,
        rmse,
        no_boundary_rate: n_no_boundary as f64 / total as f64,
        false_positive_rate: if truth.is_none() {
            Some(n_finite as f64 / total as f64)
        } else {
            None
        },
        mean_false_boundary: if truth.is_none() { mean_estimate } else { None },
        mean_estimate,
        n_finite,
        n_no_boundary,
        n_failed,
        mean_selected_bandwidth: if bw_count > 0 {
            Some(bw_sum / bw_count as f64)
        } else {
            None
        },
    }
}

/// Aggregate replication outcomes into a report. The pairs must be in
/// replication order for the report to be reproducible.
pub fn summarize_replications(
    spec: &DgpSpec,
    n_obs: usize,
    base_seed: u64,
    pairs: &[ReplicationPair],
) -> MonteCarloReport {
    let total = pairs.len();
    let truth = spec.true_boundary;
    MonteCarloReport {
        spec: *spec,
        n_replications: total,
        n_obs,
        base_seed,
        parametric: summarize_method(
            Method::Parametric,
            truth,
            pairs.iter().map(|p| &p.parametric),
            total,
        ),
        nonparametric: summarize_method(
            Method::Nonparametric,
            truth,
            pairs.iter().map(|p| &p.nonparametric),
            total,
        ),
    }
}

/// Run a full study sequentially: replication `r` uses seed
/// `base_seed + r`.
pub fn run_study(
    spec: &DgpSpec,
    n_replications: usize,
    n: usize,
    base_seed: u64,
    options: &StudyOptions,
) -> Result<MonteCarloReport, McError> {
    if n_replications == 0 {
        return Err(McError::NoReplications);
    }
    let mut pairs = Vec::with_capacity(n_replications);
    for r in 0..n_replications {
        let seed = base_seed.wrapping_add(r as u64);
        pairs.push(run_replication(spec, n, seed, options)?);
    }
    Ok(summarize_replications(spec, n, base_seed, &pairs))
}
