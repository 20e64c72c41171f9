//! Training loop: MAE objective, Adam updates, per-epoch validation, and
//! best-validation checkpointing.

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{mae_loss, Mode, Model, ModelConfig, NnError, ParameterStore};
use crate::data::{Batch, BatchSource, TargetScaler};
use crate::metrics::{self, MetricsError};
use crate::rng::{derive_seed, DetRng};

/// One epoch of the training record. Validation metrics are in original
/// (inverse-scaled) target units and absent when no validation rows exist;
/// R² is additionally absent when the validation targets have no variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRow {
    pub epoch: usize,
    pub train_loss: f64,
    pub valid_mae: Option<f64>,
    pub valid_rmse: Option<f64>,
    pub valid_r2: Option<f64>,
    /// Measured wall time; excluded from serialization so that reports are
    /// byte-identical across reruns.
    #[serde(skip)]
    pub wall_time_s: f64,
}

/// Full record of one training run. Serializes deterministically: wall times
/// are carried in memory but never written.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainReport {
    pub epochs: Vec<EpochRow>,
    /// Epoch whose parameters were kept (lowest validation MAE).
    pub best_epoch: Option<usize>,
    /// Predictions of the kept parameters on the test split, original units.
    pub test_predictions: Vec<f64>,
    #[serde(skip)]
    pub wall_time_s: f64,
}

/// Trains a model from `config` over the batch source. Runs exactly
/// `config.epochs` epochs, records validation metrics each epoch, and
/// returns the parameters of the best validation epoch (the last state when
/// no validation rows exist). Fully reproducible from `config.seed`.
pub fn train(
    config: &ModelConfig,
    vocab_size: usize,
    source: &dyn BatchSource,
    scaler: &TargetScaler,
    timer: Option<&dyn Fn() -> f64>,
) -> Result<(Model, ParameterStore, TrainReport), NnError> {
    let now = || timer.map(|f| f()).unwrap_or(0.0);
    let t_start = now();
    let (model, mut store) = Model::init(config.clone(), vocab_size)?;
    let mut dropout_rng = DetRng::new(derive_seed(config.seed, 1));

    let valid_batches = source.valid();
    let mut report = TrainReport::default();
    let mut best: Option<(f64, usize, ParameterStore)> = None;

    for epoch in 0..config.epochs {
        let t_epoch = now();
        let batches = source.train_epoch(epoch);
        if batches.is_empty() {
            return Err(NnError::EmptyBatch);
        }
        let mut loss_sum = 0.0;
        let mut rows = 0usize;
        for batch in &batches {
            let (preds, tape) = model.forward(&store, batch, Mode::Train, Some(&mut dropout_rng))?;
            let (loss, dpred) = mae_loss(&preds, &batch.targets)?;
            if !loss.is_finite() {
                return Err(NnError::Diverged { epoch });
            }
            loss_sum += loss * batch.rows as f64;
            rows += batch.rows;
            store.zero_grads();
            model.backward(&mut store, &tape, &dpred)?;
            store.adam_step(config.learning_rate)?;
        }
        let train_loss = loss_sum / rows as f64;

        let (valid_mae, valid_rmse, valid_r2) = if valid_batches.is_empty() {
            (None, None, None)
        } else {
            let preds = model.predict(&store, &valid_batches)?;
            let (y, y_hat) = unscaled(&valid_batches, &preds, scaler);
            let mae = metrics::mae(&y, &y_hat).ok();
            let rmse = metrics::rmse(&y, &y_hat).ok();
            let r2 = match metrics::r2(&y, &y_hat) {
                Ok(v) => Some(v),
                Err(MetricsError::ZeroVariance) => None,
                Err(_) => None,
            };
            (mae, rmse, r2)
        };

        if let Some(mae) = valid_mae {
            let better = match &best {
                Some((best_mae, _, _)) => mae < *best_mae,
                None => true,
            };
            if better {
                best = Some((mae, epoch, store.clone()));
            }
        }

        report.epochs.push(EpochRow {
            epoch,
            train_loss,
            valid_mae,
            valid_rmse,
            valid_r2,
            wall_time_s: now() - t_epoch,
        });
    }

    let final_store = match best {
        Some((_, epoch, s)) => {
            report.best_epoch = Some(epoch);
            s
        }
        None => store,
    };

    let test_batches = source.test();
    if !test_batches.is_empty() {
        let preds = model.predict(&final_store, &test_batches)?;
        report.test_predictions = preds.iter().map(|&p| scaler.inverse(p)).collect();
    }
    report.wall_time_s = now() - t_start;
    Ok((model, final_store, report))
}

/// Pairs of (true, predicted) values in original units.
pub fn unscaled(batches: &[Batch], preds: &[f64], scaler: &TargetScaler) -> (Vec<f64>, Vec<f64>) {
    let y: Vec<f64> = batches
        .iter()
        .flat_map(|b| b.targets.iter().map(|&t| scaler.inverse(t)))
        .collect();
    let y_hat: Vec<f64> = preds.iter().map(|&p| scaler.inverse(p)).collect();
    (y, y_hat)
}
