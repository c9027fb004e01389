//! Pearson chi-squared test of independence on a two-way count table.

use alloc::vec::Vec;
use thiserror::Error;

use super::special::chi_squared_sf;

/// Test outcome: the statistic, its degrees of freedom, and the upper-tail
/// p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquared {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum ContingencyError {
    #[error("the table must be at least 2x2 with rows of equal length")]
    InvalidTable,
    #[error("every row and column total must be positive")]
    DegenerateMarginal,
}

/// Chi-squared independence test with expected counts from the marginal
/// products. No continuity correction is applied.
pub fn chi_squared_independence(table: &[Vec<u64>]) -> Result<ChiSquared, ContingencyError> {
    let rows = table.len();
    if rows < 2 {
        return Err(ContingencyError::InvalidTable);
    }
    let cols = table[0].len();
    if cols < 2 || table.iter().any(|r| r.len() != cols) {
        return Err(ContingencyError::InvalidTable);
    }

    let mut row_sum = alloc::vec![0.0f64; rows];
    let mut col_sum = alloc::vec![0.0f64; cols];
    let mut total = 0.0f64;
    for (i, row) in table.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            let c = c as f64;
            row_sum[i] += c;
            col_sum[j] += c;
            total += c;
        }
    }
    if row_sum.iter().any(|&s| s <= 0.0) || col_sum.iter().any(|&s| s <= 0.0) {
        return Err(ContingencyError::DegenerateMarginal);
    }

    let mut statistic = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            let expected = row_sum[i] * col_sum[j] / total;
            let diff = c as f64 - expected;
            statistic += diff * diff / expected;
        }
    }
    let dof = (rows - 1) * (cols - 1);
    Ok(ChiSquared {
        statistic,
        dof,
        p_value: chi_squared_sf(statistic, dof),
    })
}
