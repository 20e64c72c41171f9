//! Batch and target-scaling primitives shared by training and the dataset
//! pipeline.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

/// Dataset partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        }
    }
}

/// One mini-batch: a row-major `rows × max_len` id matrix, the true
/// (pre-padding) length of each row, and one target per row.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub ids: Vec<u32>,
    pub rows: usize,
    pub max_len: usize,
    pub lengths: Vec<usize>,
    pub targets: Vec<f64>,
}

impl Batch {
    pub fn row(&self, r: usize) -> &[u32] {
        &self.ids[r * self.max_len..(r + 1) * self.max_len]
    }
}

/// Supplies batches to a training loop. Train batches may be reshuffled per
/// epoch (deterministically); validation and test order is fixed.
pub trait BatchSource {
    fn train_epoch(&self, epoch: usize) -> Vec<Batch>;
    fn valid(&self) -> Vec<Batch>;
    fn test(&self) -> Vec<Batch>;
}

/// Z-score normalization of a target property. Statistics must come from
/// training rows only; `enabled = false` makes both transforms the identity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetScaler {
    pub mean: f64,
    pub std: f64,
    pub enabled: bool,
}

impl Default for TargetScaler {
    fn default() -> Self {
        TargetScaler::identity()
    }
}

impl TargetScaler {
    pub fn identity() -> Self {
        TargetScaler {
            mean: 0.0,
            std: 1.0,
            enabled: false,
        }
    }

    /// Fits mean and standard deviation on `values` (the training rows).
    pub fn fit(values: &[f64]) -> Self {
        assert!(!values.is_empty(), "cannot fit a scaler on no values");
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let std = libm::sqrt(var);
        TargetScaler {
            mean,
            // degenerate spread would make the transform non-invertible
            std: if std < 1e-12 { 1.0 } else { std },
            enabled: true,
        }
    }

    pub fn transform(&self, y: f64) -> f64 {
        if self.enabled {
            (y - self.mean) / self.std
        } else {
            y
        }
    }

    pub fn inverse(&self, z: f64) -> f64 {
        if self.enabled {
            z * self.std + self.mean
        } else {
            z
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_undoes_transform() {
        let s = TargetScaler::fit(&[200.0, 350.0, 500.0, 410.0]);
        for y in [200.0, 333.3, 499.99] {
            assert!((s.inverse(s.transform(y)) - y).abs() < 1e-12);
        }
    }

    #[test]
    fn disabled_scaler_is_identity() {
        let s = TargetScaler::identity();
        assert_eq!(s.transform(42.0), 42.0);
        assert_eq!(s.inverse(42.0), 42.0);
    }

    #[test]
    fn constant_values_do_not_divide_by_zero() {
        let s = TargetScaler::fit(&[5.0, 5.0, 5.0]);
        assert_eq!(s.transform(5.0), 0.0);
        assert_eq!(s.inverse(0.0), 5.0);
    }
}
