//! Parallel Monte Carlo execution. Replications are independent given
//! their seeds, so they are distributed over a thread pool and collected
//! back in replication order; the aggregated report is identical to the
//! sequential [`spatial_decay_core::run_study`] result, which the tests
//! enforce.

use rayon::prelude::*;

use spatial_decay_core::{
    run_replication, summarize_replications, DgpSpec, MonteCarloReport, ReplicationPair,
    StudyOptions,
};

use crate::error::CliError;

/// Number of worker threads: an explicit request wins, then the
/// `SPATIAL_DECAY_THREADS` environment variable, then the machine default.
pub fn resolve_threads(requested: Option<usize>) -> usize {
    if let Some(t) = requested {
        return t.max(1);
    }
    if let Ok(v) = std::env::var("SPATIAL_DECAY_THREADS") {
        if let Ok(t) = v.parse::<usize>() {
            return t.max(1);
        }
    }
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

pub fn run_study_parallel(
    spec: &DgpSpec,
    n_replications: usize,
    n: usize,
    base_seed: u64,
    options: &StudyOptions,
    threads: usize,
) -> Result<MonteCarloReport, CliError> {
    if n_replications == 0 {
        return Err(CliError::Config("need at least one replication".to_string()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let pairs: Result<Vec<ReplicationPair>, CliError> = pool.install(|| {
        (0..n_replications)
            .into_par_iter()
            .map(|r| {
                run_replication(spec, n, base_seed.wrapping_add(r as u64), options)
                    .map_err(|e| CliError::Numeric(e.to_string()))
            })
            .collect()
    });
    Ok(summarize_replications(spec, n, base_seed, &pairs?))
}
