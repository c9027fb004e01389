//! Seeded synthetic fixtures for the analysis pipelines.
//!
//! These generators produce CSV inputs whose population parameters are
//! known, so the pipeline tests can check recovery rather than compare
//! against unavailable source data:
//!
//! * a loan-volume decay fixture with a log-linear distance gradient;
//! * a flat approval-rate fixture with no spatial structure;
//! * a branch-survival fixture whose income-quartile survival rates are
//!   hit exactly by construction, with plausible covariate margins.
//!
//! Everything is a pure function of `(n, seed)`.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::CliError;

/// Log-scale intercept of the volume fixture.
pub const VOLUME_LOG_INTERCEPT: f64 = 4.81;
/// Log-scale slope per mile of the volume fixture.
pub const VOLUME_LOG_SLOPE: f64 = -0.0089;
/// Log-scale noise standard deviation of the volume fixture.
pub const VOLUME_LOG_NOISE_SD: f64 = 0.3;

/// Mean approval rate of the flat fixture.
pub const APPROVAL_MEAN: f64 = 0.523;
/// Noise standard deviation of the flat fixture.
pub const APPROVAL_NOISE_SD: f64 = 0.092;

/// Survival rates by income quartile (poorest to richest) that the
/// survival fixture reproduces exactly.
pub const SURVIVAL_QUARTILE_RATES: [f64; 4] = [0.769, 0.788, 0.773, 0.739];
/// Mean income (thousands) by quartile.
pub const SURVIVAL_QUARTILE_INCOMES: [f64; 4] = [33.9, 50.3, 66.0, 110.1];

const INCOME_SDS: [f64; 4] = [8.4, 4.9, 5.6, 28.3];
// Disjoint clamps keep generated quartile membership identical to the
// rank-based quartiles recomputed by the analysis.
const INCOME_BOUNDS: [(f64, f64); 4] = [
    (10.0, 44.9),
    (45.0, 57.9),
    (58.0, 79.9),
    (80.1, 250.0),
];
/// Survival rates by branch-count category (1, 2, 3-5, 6+).
const DENSITY_CATEGORY_RATES: [f64; 4] = [0.735, 0.760, 0.781, 0.774];
const BRANCH_MEANS: [f64; 4] = [3.82, 3.97, 4.03, 4.15];
const POP_DENSITY_MEANS: [f64; 4] = [3842.0, 4567.0, 5234.0, 6892.0];

/// Fixture source location; tracts are laid out due east of it so the
/// flat-degree distance equals the generated distance exactly.
const SOURCE_LAT: f64 = 36.0;
const SOURCE_LON: f64 = -100.0;

fn uniform01(rng: &mut ChaCha12Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn normal(rng: &mut ChaCha12Rng) -> f64 {
    let u1 = 1.0 - uniform01(rng);
    let u2 = uniform01(rng);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn write_file(path: &Path, content: &str) -> Result<(), CliError> {
    fs::write(path, content).map_err(|e| CliError::io(path, e))
}

fn write_sources_file(path: &Path) -> Result<(), CliError> {
    write_file(path, &format!("lat,lon\n{SOURCE_LAT},{SOURCE_LON}\n"))
}

fn write_tract_fixture<F>(
    tracts_path: &Path,
    sources_path: &Path,
    n: usize,
    seed: u64,
    mut outcome: F,
) -> Result<(), CliError>
where
    F: FnMut(f64, &mut ChaCha12Rng) -> f64,
{
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut out = String::from("id,lat,lon,outcome\n");
    for i in 0..n {
        let d = 100.0 * uniform01(&mut rng);
        let lon = SOURCE_LON + d / 69.0;
        let y = outcome(d, &mut rng);
        let _ = writeln!(out, "T{i:05},{SOURCE_LAT},{lon},{y}");
    }
    write_file(tracts_path, &out)?;
    write_sources_file(sources_path)
}

/// Loan-volume fixture: outcomes are `exp(intercept + slope * d + noise)`,
/// so a log-outcome regression recovers the slope.
pub fn write_decay_volume_fixture(
    tracts_path: &Path,
    sources_path: &Path,
    n: usize,
    seed: u64,
) -> Result<(), CliError> {
    write_tract_fixture(tracts_path, sources_path, n, seed, |d, rng| {
        (VOLUME_LOG_INTERCEPT + VOLUME_LOG_SLOPE * d + VOLUME_LOG_NOISE_SD * normal(rng)).exp()
    })
}

/// Approval-rate fixture with no distance structure at all.
pub fn write_flat_approval_fixture(
    tracts_path: &Path,
    sources_path: &Path,
    n: usize,
    seed: u64,
) -> Result<(), CliError> {
    write_tract_fixture(tracts_path, sources_path, n, seed, |_, rng| {
        (APPROVAL_MEAN + APPROVAL_NOISE_SD * normal(rng)).clamp(0.02, 0.98)
    })
}

struct BranchRow {
    quartile: usize,
    density_category: usize,
    income: f64,
    branches_in_tract: u32,
    pop_density: f64,
    n_banks: u32,
    survived: bool,
}

fn density_category(branches: u32) -> usize {
    match branches {
        1 => 0,
        2 => 1,
        3..=5 => 2,
        _ => 3,
    }
}

/// Branch-survival fixture: exactly `round(rate_q * n_per_quartile)`
/// survivors per income quartile, allocated across branch-density cells by
/// additive raking so the density margins have the right shape too.
pub fn write_survival_fixture(
    branches_path: &Path,
    n_per_quartile: usize,
    seed: u64,
) -> Result<(), CliError> {
    if n_per_quartile < 10 {
        return Err(CliError::Config(
            "survival fixture needs at least 10 rows per quartile".to_string(),
        ));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut rows: Vec<BranchRow> = Vec::with_capacity(4 * n_per_quartile);
    for q in 0..4 {
        for _ in 0..n_per_quartile {
            let income = (SURVIVAL_QUARTILE_INCOMES[q] + INCOME_SDS[q] * normal(&mut rng))
                .clamp(INCOME_BOUNDS[q].0, INCOME_BOUNDS[q].1);
            let branches = (BRANCH_MEANS[q] + 3.3 * normal(&mut rng)).round().clamp(1.0, 20.0) as u32;
            let pop_density =
                (POP_DENSITY_MEANS[q].ln() - 0.32 + 0.8 * normal(&mut rng)).exp();
            let n_banks = (0.6 * branches as f64 + 1.0 + 0.8 * normal(&mut rng))
                .round()
                .clamp(1.0, 12.0) as u32;
            rows.push(BranchRow {
                quartile: q,
                density_category: density_category(branches),
                income,
                branches_in_tract: branches,
                pop_density,
                n_banks,
                survived: false,
            });
        }
    }

    let overall: f64 = SURVIVAL_QUARTILE_RATES.iter().sum::<f64>() / 4.0;
    for q in 0..4 {
        let target = (SURVIVAL_QUARTILE_RATES[q] * n_per_quartile as f64).round() as usize;
        // Cell sizes and raked probabilities for this quartile.
        let mut cell_rows: [Vec<usize>; 4] = Default::default();
        for (idx, row) in rows.iter().enumerate() {
            if row.quartile == q {
                cell_rows[row.density_category].push(idx);
            }
        }
        let mut allocation = [0usize; 4];
        let mut remainders: Vec<(f64, usize)> = Vec::new();
        let mut allocated = 0usize;
        for c in 0..4 {
            let p = (SURVIVAL_QUARTILE_RATES[q] + DENSITY_CATEGORY_RATES[c] - overall)
                .clamp(0.05, 0.99);
            let ideal = p * cell_rows[c].len() as f64;
            allocation[c] = (ideal.floor() as usize).min(cell_rows[c].len());
            allocated += allocation[c];
            remainders.push((ideal - allocation[c] as f64, c));
        }
        // Largest-remainder top-up, then force the quartile total exactly.
        remainders.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        let mut cursor = 0;
        while allocated < target {
            let c = remainders[cursor % 4].1;
            if allocation[c] < cell_rows[c].len() {
                allocation[c] += 1;
                allocated += 1;
            }
            cursor += 1;
        }
        while allocated > target {
            let c = remainders[cursor % 4].1;
            if allocation[c] > 0 {
                allocation[c] -= 1;
                allocated -= 1;
            }
            cursor += 1;
        }
        for c in 0..4 {
            for &idx in cell_rows[c].iter().take(allocation[c]) {
                rows[idx].survived = true;
            }
        }
    }

    // Seeded Fisher-Yates so the file is not blocked by quartile.
    for i in (1..rows.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        rows.swap(i, j);
    }

    let mut out = String::from("survived,income,branches_in_tract,pop_density,n_banks\n");
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.survived as u8, r.income, r.branches_in_tract, r.pop_density, r.n_banks
        );
    }
    write_file(branches_path, &out)
}
