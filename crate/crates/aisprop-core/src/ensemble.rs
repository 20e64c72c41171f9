//! Stacked ensemble: K base sequence regressors trained on the train split,
//! a bagging meta-regressor fit on their held-out validation predictions,
//! and a final prediction that averages the bagged meta outputs.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{Batch, BatchSource, TargetScaler};
use crate::nn::{self, Model, ModelConfig, NnError, ParameterStore, TrainReport};
use crate::rng::{derive_seed, DetRng};

/// Seed stream offsets: base model k draws from (seed, k); bootstrap b from
/// (seed, META_STREAM + b). Keeping them disjoint makes parallel and serial
/// training interchangeable.
const META_STREAM: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnsembleError {
    #[error(transparent)]
    Nn(#[from] NnError),
    #[error("empty input: {0}")]
    EmptyInput(String),
    #[error("ensemble configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetaLearnerKind {
    /// Bagged linear regressions over the K stacked predictions.
    MeanLinear,
    /// Bagged depth-1 regression trees.
    RegressionStump,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StackingSource {
    ValidationHoldout,
}

fn default_bagging() -> usize {
    10
}
fn default_meta() -> MetaLearnerKind {
    MetaLearnerKind::MeanLinear
}
fn default_stacking() -> StackingSource {
    StackingSource::ValidationHoldout
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub base_configs: Vec<ModelConfig>,
    #[serde(default = "default_bagging")]
    pub bagging_size: usize,
    #[serde(default = "default_meta")]
    pub meta_learner: MetaLearnerKind,
    #[serde(default = "default_stacking")]
    pub stacking_source: StackingSource,
    #[serde(default)]
    pub seed: u64,
}

impl EnsembleConfig {
    pub fn validate(&self) -> Vec<String> {
        let mut issues = Vec::new();
        if self.base_configs.is_empty() {
            issues.push(String::from("at least one base model is required"));
        }
        if self.bagging_size == 0 {
            issues.push(String::from("bagging_size must be at least 1"));
        }
        for (k, cfg) in self.base_configs.iter().enumerate() {
            for issue in cfg.validate() {
                issues.push(alloc::format!("base {k}: {issue}"));
            }
        }
        issues
    }
}

/// One fitted meta-learner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MetaFit {
    Linear {
        weights: Vec<f64>,
        intercept: f64,
    },
    Stump {
        feature: usize,
        threshold: f64,
        left: f64,
        right: f64,
    },
}

impl MetaFit {
    pub fn predict(&self, x: &[f64]) -> f64 {
        match self {
            MetaFit::Linear { weights, intercept } => {
                intercept + weights.iter().zip(x).map(|(&w, &v)| w * v).sum::<f64>()
            }
            MetaFit::Stump {
                feature,
                threshold,
                left,
                right,
            } => {
                if x[*feature] <= *threshold {
                    *left
                } else {
                    *right
                }
            }
        }
    }
}

/// Trained ensemble: base models with their parameters, the B bagged meta
/// fits, and the target scaler shared with the bases.
#[derive(Debug, Clone)]
pub struct EnsembleModel {
    pub config: EnsembleConfig,
    pub bases: Vec<(Model, ParameterStore)>,
    pub metas: Vec<MetaFit>,
    pub scaler: TargetScaler,
}

/// Trains the K bases on the train split, stacks their validation
/// predictions, and fits `bagging_size` meta-learners on seeded bootstrap
/// resamples of the stacked rows. Returns the per-base train reports too.
pub fn train_ensemble(
    cfg: &EnsembleConfig,
    vocab_size: usize,
    source: &dyn BatchSource,
    scaler: &TargetScaler,
    timer: Option<&dyn Fn() -> f64>,
) -> Result<(EnsembleModel, Vec<TrainReport>), EnsembleError> {
    let issues = cfg.validate();
    if !issues.is_empty() {
        return Err(EnsembleError::Config(issues.join("; ")));
    }
    let valid_batches = source.valid();
    if valid_batches.is_empty() {
        return Err(EnsembleError::EmptyInput(String::from(
            "validation split is empty; holdout stacking needs validation rows",
        )));
    }

    let mut bases = Vec::with_capacity(cfg.base_configs.len());
    let mut reports = Vec::with_capacity(cfg.base_configs.len());
    let mut stacked: Vec<Vec<f64>> = Vec::new(); // row-major n_valid × K
    let y_valid: Vec<f64> = valid_batches
        .iter()
        .flat_map(|b| b.targets.iter().map(|&t| scaler.inverse(t)))
        .collect();
    stacked.resize(y_valid.len(), Vec::new());

    for (k, base_cfg) in cfg.base_configs.iter().enumerate() {
        let mut eff = base_cfg.clone();
        eff.seed = derive_seed(cfg.seed, k as u64);
        let (model, store, report) = nn::train(&eff, vocab_size, source, scaler, timer)?;
        let preds = model.predict(&store, &valid_batches)?;
        for (row, &p) in stacked.iter_mut().zip(&preds) {
            row.push(scaler.inverse(p));
        }
        bases.push((model, store));
        reports.push(report);
    }

    let metas = fit_bagged_meta(
        &stacked,
        &y_valid,
        cfg.bagging_size,
        cfg.meta_learner,
        cfg.seed,
    )?;

    Ok((
        EnsembleModel {
            config: cfg.clone(),
            bases,
            metas,
            scaler: *scaler,
        },
        reports,
    ))
}

/// Fits B meta-learners, each on an independent seeded bootstrap resample
/// (with replacement, same cardinality) of the stacked rows.
pub fn fit_bagged_meta(
    stacked: &[Vec<f64>],
    y: &[f64],
    bagging_size: usize,
    kind: MetaLearnerKind,
    seed: u64,
) -> Result<Vec<MetaFit>, EnsembleError> {
    if stacked.is_empty() || y.len() != stacked.len() {
        return Err(EnsembleError::EmptyInput(String::from(
            "stacked rows and targets must be non-empty and aligned",
        )));
    }
    let mut metas = Vec::with_capacity(bagging_size);
    for b in 0..bagging_size {
        let idx = bootstrap_indices(stacked.len(), derive_seed(seed, META_STREAM + b as u64));
        let xs: Vec<&[f64]> = idx.iter().map(|&i| stacked[i].as_slice()).collect();
        let ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
        metas.push(match kind {
            MetaLearnerKind::MeanLinear => fit_linear(&xs, &ys),
            MetaLearnerKind::RegressionStump => fit_stump(&xs, &ys),
        });
    }
    Ok(metas)
}

/// Mean over the bagged meta outputs for each stacked row.
pub fn predict_meta(metas: &[MetaFit], stacked: &[Vec<f64>]) -> Vec<f64> {
    stacked
        .iter()
        .map(|row| metas.iter().map(|m| m.predict(row)).sum::<f64>() / metas.len() as f64)
        .collect()
}

/// Ensemble prediction over batches: stack the K base predictions (original
/// units) and average the bagged meta outputs.
pub fn predict_ensemble(
    model: &EnsembleModel,
    batches: &[Batch],
) -> Result<Vec<f64>, EnsembleError> {
    let mut stacked: Vec<Vec<f64>> = Vec::new();
    for (k, (base, store)) in model.bases.iter().enumerate() {
        let preds = base.predict(store, batches)?;
        if k == 0 {
            stacked.resize(preds.len(), Vec::new());
        }
        for (row, &p) in stacked.iter_mut().zip(&preds) {
            row.push(model.scaler.inverse(p));
        }
    }
    Ok(predict_meta(&model.metas, &stacked))
}

/// Sampling with replacement at unchanged cardinality, deterministic per
/// seed.
pub fn bootstrap_indices(n: usize, seed: u64) -> Vec<usize> {
    assert!(n > 0, "bootstrap over an empty set");
    let mut rng = DetRng::new(seed);
    (0..n).map(|_| rng.below(n)).collect()
}

/// Bootstrap resample of arbitrary rows; errors on empty input.
pub fn bootstrap_resample<T: Clone>(rows: &[T], seed: u64) -> Result<Vec<T>, EnsembleError> {
    if rows.is_empty() {
        return Err(EnsembleError::EmptyInput(String::from(
            "cannot resample zero rows",
        )));
    }
    Ok(bootstrap_indices(rows.len(), seed)
        .into_iter()
        .map(|i| rows[i].clone())
        .collect())
}

/// Ordinary least squares with intercept over the stacked features, via
/// normal equations; falls back to a small ridge penalty when the system is
/// singular (such as constant base predictions).
fn fit_linear(xs: &[&[f64]], ys: &[f64]) -> MetaFit {
    let k = xs[0].len();
    let dim = k + 1;
    let mut gram = vec![0.0; dim * dim];
    let mut rhs = vec![0.0; dim];
    for (x, &y) in xs.iter().zip(ys) {
        for i in 0..dim {
            let xi = if i < k { x[i] } else { 1.0 };
            rhs[i] += xi * y;
            for j in 0..dim {
                let xj = if j < k { x[j] } else { 1.0 };
                gram[i * dim + j] += xi * xj;
            }
        }
    }
    let beta = match solve(gram.clone(), rhs.clone(), dim) {
        Some(beta) => beta,
        None => {
            // ridge on the non-intercept diagonal
            for i in 0..k {
                gram[i * dim + i] += 1e-8;
            }
            solve(gram, rhs, dim).unwrap_or_else(|| vec![0.0; dim])
        }
    };
    MetaFit::Linear {
        weights: beta[..k].to_vec(),
        intercept: beta[k],
    }
}

/// Gaussian elimination with partial pivoting; `None` on a singular pivot.
fn solve(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    let scale = a
        .iter()
        .fold(0.0f64, |acc, &v| if libm::fabs(v) > acc { libm::fabs(v) } else { acc })
        .max(1.0);
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if libm::fabs(a[row * n + col]) > libm::fabs(a[pivot * n + col]) {
                pivot = row;
            }
        }
        if libm::fabs(a[pivot * n + col]) < 1e-12 * scale {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            b.swap(col, pivot);
        }
        let p = a[col * n + col];
        for row in col + 1..n {
            let factor = a[row * n + col] / p;
            if factor == 0.0 {
                continue;
            }
            for j in col..n {
                a[row * n + j] -= factor * a[col * n + j];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for j in col + 1..n {
            acc -= a[col * n + j] * x[j];
        }
        x[col] = acc / a[col * n + col];
    }
    Some(x)
}

/// Depth-1 regression tree: best (feature, midpoint threshold) by sum of
/// squared errors, leaves are side means.
fn fit_stump(xs: &[&[f64]], ys: &[f64]) -> MetaFit {
    let k = xs[0].len();
    let n = xs.len();
    let mean = ys.iter().sum::<f64>() / n as f64;
    let mut best = MetaFit::Stump {
        feature: 0,
        threshold: f64::NEG_INFINITY,
        left: mean,
        right: mean,
    };
    let mut best_sse = f64::INFINITY;
    for feature in 0..k {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            xs[a][feature]
                .partial_cmp(&xs[b][feature])
                .unwrap_or(core::cmp::Ordering::Equal)
        });
        let sorted_x: Vec<f64> = order.iter().map(|&i| xs[i][feature]).collect();
        let sorted_y: Vec<f64> = order.iter().map(|&i| ys[i]).collect();
        let total: f64 = sorted_y.iter().sum();
        let total_sq: f64 = sorted_y.iter().map(|&v| v * v).sum();
        let mut left_sum = 0.0;
        let mut left_sq = 0.0;
        for split in 1..n {
            left_sum += sorted_y[split - 1];
            left_sq += sorted_y[split - 1] * sorted_y[split - 1];
            if sorted_x[split] == sorted_x[split - 1] {
                continue;
            }
            let nl = split as f64;
            let nr = (n - split) as f64;
            let right_sum = total - left_sum;
            let right_sq = total_sq - left_sq;
            let sse = (left_sq - left_sum * left_sum / nl) + (right_sq - right_sum * right_sum / nr);
            if sse < best_sse {
                best_sse = sse;
                best = MetaFit::Stump {
                    feature,
                    threshold: 0.5 * (sorted_x[split] + sorted_x[split - 1]),
                    left: left_sum / nl,
                    right: right_sum / nr,
                };
            }
        }
    }
    best
}
