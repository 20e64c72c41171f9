//! Regression evaluation metrics: MAE, RMSE, and R².
//!
//! Accumulation uses pairwise summation above a block size so quarter-million
//! row evaluations do not lose digits to naive left-to-right addition.

use alloc::string::String;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("length mismatch: {left} true values vs {right} predictions")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("zero variance: all true values are equal")]
    ZeroVariance,
}

/// One metrics row as written to report CSVs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub property: String,
    pub split: String,
    pub n: usize,
    pub mae: f64,
    pub rmse: f64,
    pub r2: f64,
}

const PAIRWISE_BLOCK: usize = 4096;

/// Pairwise (cascade) sum of `f(x)` over a slice.
fn pairwise_sum<T, F: Fn(&T) -> f64 + Copy>(xs: &[T], f: F) -> f64 {
    if xs.len() <= PAIRWISE_BLOCK {
        return xs.iter().map(f).sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid], f) + pairwise_sum(&xs[mid..], f)
}

fn check(y: &[f64], y_hat: &[f64]) -> Result<(), MetricsError> {
    if y.len() != y_hat.len() {
        return Err(MetricsError::LengthMismatch {
            left: y.len(),
            right: y_hat.len(),
        });
    }
    if y.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    Ok(())
}

fn paired<'a>(y: &'a [f64], y_hat: &'a [f64]) -> impl Iterator<Item = (f64, f64)> + 'a {
    y.iter().copied().zip(y_hat.iter().copied())
}

/// Mean absolute error: (1/n) Σ |yᵢ − ŷᵢ|.
pub fn mae(y: &[f64], y_hat: &[f64]) -> Result<f64, MetricsError> {
    check(y, y_hat)?;
    let pairs: alloc::vec::Vec<(f64, f64)> = paired(y, y_hat).collect();
    Ok(pairwise_sum(&pairs, |&(a, b)| libm::fabs(a - b)) / y.len() as f64)
}

/// Root mean squared error: sqrt((1/n) Σ (yᵢ − ŷᵢ)²).
pub fn rmse(y: &[f64], y_hat: &[f64]) -> Result<f64, MetricsError> {
    check(y, y_hat)?;
    let pairs: alloc::vec::Vec<(f64, f64)> = paired(y, y_hat).collect();
    let mean_sq = pairwise_sum(&pairs, |&(a, b)| (a - b) * (a - b)) / y.len() as f64;
    Ok(libm::sqrt(mean_sq))
}

/// Coefficient of determination: 1 − Σ(yᵢ−ŷᵢ)² / Σ(yᵢ−ȳ)². Negative for
/// predictors worse than the mean; errors when all yᵢ are equal.
pub fn r2(y: &[f64], y_hat: &[f64]) -> Result<f64, MetricsError> {
    check(y, y_hat)?;
    let n = y.len() as f64;
    let y_mean = pairwise_sum(y, |&v| v) / n;
    let ss_tot = pairwise_sum(y, |&v| (v - y_mean) * (v - y_mean));
    if ss_tot == 0.0 {
        return Err(MetricsError::ZeroVariance);
    }
    let pairs: alloc::vec::Vec<(f64, f64)> = paired(y, y_hat).collect();
    let ss_res = pairwise_sum(&pairs, |&(a, b)| (a - b) * (a - b));
    Ok(1.0 - ss_res / ss_tot)
}

/// Convenience bundle of all three metrics.
pub fn report(
    property: &str,
    split: &str,
    y: &[f64],
    y_hat: &[f64],
) -> Result<MetricsReport, MetricsError> {
    Ok(MetricsReport {
        property: String::from(property),
        split: String::from(split),
        n: y.len(),
        mae: mae(y, y_hat)?,
        rmse: rmse(y, y_hat)?,
        r2: r2(y, y_hat)?,
    })
}
