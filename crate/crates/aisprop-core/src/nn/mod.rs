//! From-scratch differentiable sequence regressors.
//!
//! Three encoder variants fill the feature-extractor role: a bidirectional
//! LSTM, a pre-norm self-attention encoder (sinusoidal or learned
//! positions), and a bag-of-tokens baseline. Token embeddings feed the
//! encoder, a masked mean (or first-token) pooling collapses positions, and
//! a linear head emits one real prediction per sequence. Gradients are
//! hand-written reverse mode over per-example tapes; everything runs in
//! double precision so finite-difference checks can be tight.
//!
//! Padded positions never enter the computation: each example is sliced to
//! its true length before the encoder runs, which is what makes pad
//! invariance exact rather than approximate.

pub mod math;
mod attention;
mod params;
mod recurrent;
mod train;

pub use params::ParameterStore;
pub use train::{train, EpochRow, TrainReport};

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::Batch;
use crate::rng::{derive_seed, DetRng};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NnError {
    #[error("invalid model configuration: {}", issues.join("; "))]
    Config { issues: Vec<String> },
    #[error("shape mismatch: {msg}")]
    ShapeMismatch { msg: String },
    #[error("empty batch")]
    EmptyBatch,
    #[error("non-finite gradient in parameter '{param}'")]
    NonFiniteGradient { param: String },
    #[error("stale activation cache: parameters changed since forward")]
    StaleCache,
    #[error("training diverged at epoch {epoch}: non-finite loss")]
    Diverged { epoch: usize },
    #[error("bad checkpoint: {msg}")]
    Checkpoint { msg: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncoderKind {
    BiRecurrent,
    SelfAttention,
    BagOfTokens,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositionKind {
    Sinusoidal,
    Learned,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PoolKind {
    MaskedMean,
    FirstToken,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Mae,
}

fn default_learning_rate() -> f64 {
    1e-3
}
fn default_batch_size() -> usize {
    16
}
fn default_dropout() -> f64 {
    0.1
}
fn default_hidden_size() -> usize {
    64
}
fn default_heads() -> usize {
    4
}
fn default_epochs() -> usize {
    10
}
fn default_loss() -> LossKind {
    LossKind::Mae
}
fn default_max_len() -> usize {
    96
}
fn default_embed_dim() -> usize {
    32
}
fn default_num_layers() -> usize {
    1
}
fn default_positions() -> PositionKind {
    PositionKind::Sinusoidal
}
fn default_pooling() -> PoolKind {
    PoolKind::MaskedMean
}

/// Hyperparameters of one base model. Field names mirror the JSON config
/// format; unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub encoder: EncoderKind,
    #[serde(default = "default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_dropout")]
    pub dropout: f64,
    #[serde(default = "default_hidden_size")]
    pub hidden_size: usize,
    #[serde(default = "default_heads")]
    pub attention_heads: usize,
    #[serde(default = "default_epochs")]
    pub epochs: usize,
    #[serde(default = "default_loss")]
    pub loss: LossKind,
    #[serde(default = "default_max_len")]
    pub max_len: usize,
    #[serde(default = "default_embed_dim")]
    pub embed_dim: usize,
    #[serde(default = "default_num_layers")]
    pub num_layers: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_positions")]
    pub positions: PositionKind,
    #[serde(default = "default_pooling")]
    pub pooling: PoolKind,
    /// Feed-forward width of the attention blocks; twice the hidden size
    /// when absent.
    #[serde(default)]
    pub ffn_size: Option<usize>,
}

impl ModelConfig {
    pub fn new(encoder: EncoderKind) -> Self {
        ModelConfig {
            encoder,
            learning_rate: default_learning_rate(),
            batch_size: default_batch_size(),
            dropout: default_dropout(),
            hidden_size: default_hidden_size(),
            attention_heads: default_heads(),
            epochs: default_epochs(),
            loss: default_loss(),
            max_len: default_max_len(),
            embed_dim: default_embed_dim(),
            num_layers: default_num_layers(),
            seed: 0,
            positions: default_positions(),
            pooling: default_pooling(),
            ffn_size: None,
        }
    }

    pub fn ffn_dim(&self) -> usize {
        self.ffn_size.unwrap_or(2 * self.hidden_size)
    }

    /// All invariant violations at once; empty when the config is valid.
    pub fn validate(&self) -> Vec<String> {
        let mut issues = Vec::new();
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            issues.push(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            ));
        }
        if self.batch_size == 0 {
            issues.push(String::from("batch_size must be at least 1"));
        }
        if !(0.0..1.0).contains(&self.dropout) {
            issues.push(format!("dropout must lie in [0, 1), got {}", self.dropout));
        }
        if self.hidden_size == 0 {
            issues.push(String::from("hidden_size must be at least 1"));
        }
        if self.embed_dim == 0 {
            issues.push(String::from("embed_dim must be at least 1"));
        }
        if self.max_len < 2 {
            issues.push(String::from("max_len must be at least 2"));
        }
        if self.num_layers == 0 {
            issues.push(String::from("num_layers must be at least 1"));
        }
        if self.encoder == EncoderKind::SelfAttention {
            if self.attention_heads == 0 {
                issues.push(String::from("attention_heads must be at least 1"));
            } else if self.hidden_size % self.attention_heads != 0 {
                issues.push(format!(
                    "hidden_size {} must be divisible by attention_heads {}",
                    self.hidden_size, self.attention_heads
                ));
            }
            if self.ffn_dim() == 0 {
                issues.push(String::from("ffn_size must be at least 1"));
            }
        }
        issues
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

#[derive(Debug, Clone)]
pub(crate) struct AttnLayerIx {
    pub ln1_g: usize,
    pub ln1_b: usize,
    pub wq: usize,
    pub bq: usize,
    pub wk: usize,
    pub bk: usize,
    pub wv: usize,
    pub bv: usize,
    pub wo: usize,
    pub bo: usize,
    pub ln2_g: usize,
    pub ln2_b: usize,
    pub w1: usize,
    pub b1: usize,
    pub w2: usize,
    pub b2: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct AttnLayout {
    pub proj_w: usize,
    pub proj_b: usize,
    pub pos: Option<usize>,
    pub layers: Vec<AttnLayerIx>,
    pub final_g: usize,
    pub final_b: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LstmIx {
    pub wx: usize,
    pub wh: usize,
    pub b: usize,
}

#[derive(Debug, Clone)]
struct Layout {
    embed: usize,
    head_w: usize,
    head_b: usize,
    attn: Option<AttnLayout>,
    rec: Vec<[LstmIx; 2]>,
}

/// A configured model: parameter layout plus hyperparameters. Parameters
/// live in a separate [`ParameterStore`] so the best-epoch snapshot is a
/// plain clone.
#[derive(Debug, Clone)]
pub struct Model {
    pub config: ModelConfig,
    pub vocab_size: usize,
    ix: Layout,
}

impl Model {
    /// Builds the parameter store for `config` with seeded initialization:
    /// uniform(-0.1, 0.1) embeddings, Xavier-uniform projections, zero
    /// biases, forget-gate bias 1.
    pub fn init(
        config: ModelConfig,
        vocab_size: usize,
    ) -> Result<(Model, ParameterStore), NnError> {
        let issues = config.validate();
        if !issues.is_empty() {
            return Err(NnError::Config { issues });
        }
        if vocab_size == 0 {
            return Err(NnError::Config {
                issues: vec![String::from("vocabulary must be non-empty")],
            });
        }
        let mut rng = DetRng::new(derive_seed(config.seed, 0));
        let mut store = ParameterStore::new();
        let e = config.embed_dim;
        let d = config.hidden_size;
        let embed = store.add(
            "embed",
            vocab_size,
            e,
            params::init_embedding(&mut rng, vocab_size, e),
        );

        let mut attn = None;
        let mut rec = Vec::new();
        let pooled_dim;
        match config.encoder {
            EncoderKind::BagOfTokens => {
                pooled_dim = e;
            }
            EncoderKind::SelfAttention => {
                let f = config.ffn_dim();
                let proj_w = store.add("proj.w", e, d, params::init_xavier(&mut rng, e, d, e * d));
                let proj_b = store.add("proj.b", 1, d, vec![0.0; d]);
                let pos = match config.positions {
                    PositionKind::Sinusoidal => None,
                    PositionKind::Learned => Some(store.add(
                        "pos.learned",
                        config.max_len,
                        d,
                        params::init_embedding(&mut rng, config.max_len, d),
                    )),
                };
                let mut layers = Vec::new();
                for l in 0..config.num_layers {
                    let p = |s: &str| format!("attn{l}.{s}");
                    layers.push(AttnLayerIx {
                        ln1_g: store.add(&p("ln1.g"), 1, d, vec![1.0; d]),
                        ln1_b: store.add(&p("ln1.b"), 1, d, vec![0.0; d]),
                        wq: store.add(&p("wq"), d, d, params::init_xavier(&mut rng, d, d, d * d)),
                        bq: store.add(&p("bq"), 1, d, vec![0.0; d]),
                        wk: store.add(&p("wk"), d, d, params::init_xavier(&mut rng, d, d, d * d)),
                        bk: store.add(&p("bk"), 1, d, vec![0.0; d]),
                        wv: store.add(&p("wv"), d, d, params::init_xavier(&mut rng, d, d, d * d)),
                        bv: store.add(&p("bv"), 1, d, vec![0.0; d]),
                        wo: store.add(&p("wo"), d, d, params::init_xavier(&mut rng, d, d, d * d)),
                        bo: store.add(&p("bo"), 1, d, vec![0.0; d]),
                        ln2_g: store.add(&p("ln2.g"), 1, d, vec![1.0; d]),
                        ln2_b: store.add(&p("ln2.b"), 1, d, vec![0.0; d]),
                        w1: store.add(&p("ffn.w1"), d, f, params::init_xavier(&mut rng, d, f, d * f)),
                        b1: store.add(&p("ffn.b1"), 1, f, vec![0.0; f]),
                        w2: store.add(&p("ffn.w2"), f, d, params::init_xavier(&mut rng, f, d, d * f)),
                        b2: store.add(&p("ffn.b2"), 1, d, vec![0.0; d]),
                    });
                }
                let final_g = store.add("final_ln.g", 1, d, vec![1.0; d]);
                let final_b = store.add("final_ln.b", 1, d, vec![0.0; d]);
                attn = Some(AttnLayout {
                    proj_w,
                    proj_b,
                    pos,
                    layers,
                    final_g,
                    final_b,
                });
                pooled_dim = d;
            }
            EncoderKind::BiRecurrent => {
                let h = d;
                for l in 0..config.num_layers {
                    let din = if l == 0 { e } else { 2 * h };
                    let mut dirs = [LstmIx { wx: 0, wh: 0, b: 0 }; 2];
                    for (di, dir) in ["fwd", "bwd"].iter().enumerate() {
                        let mut bias = vec![0.0; 4 * h];
                        bias[h..2 * h].iter_mut().for_each(|v| *v = 1.0);
                        dirs[di] = LstmIx {
                            wx: store.add(
                                &format!("lstm{l}.{dir}.wx"),
                                4 * h,
                                din,
                                params::init_xavier(&mut rng, din, h, 4 * h * din),
                            ),
                            wh: store.add(
                                &format!("lstm{l}.{dir}.wh"),
                                4 * h,
                                h,
                                params::init_xavier(&mut rng, h, h, 4 * h * h),
                            ),
                            b: store.add(&format!("lstm{l}.{dir}.b"), 1, 4 * h, bias),
                        };
                    }
                    rec.push(dirs);
                }
                pooled_dim = 2 * h;
            }
        }

        let head_w = store.add(
            "head.w",
            1,
            pooled_dim,
            params::init_xavier(&mut rng, pooled_dim, 1, pooled_dim),
        );
        let head_b = store.add("head.b", 1, 1, vec![0.0]);

        Ok((
            Model {
                config,
                vocab_size,
                ix: Layout {
                    embed,
                    head_w,
                    head_b,
                    attn,
                    rec,
                },
            },
            store,
        ))
    }

    fn pooled_dim(&self) -> usize {
        match self.config.encoder {
            EncoderKind::BagOfTokens => self.config.embed_dim,
            EncoderKind::SelfAttention => self.config.hidden_size,
            EncoderKind::BiRecurrent => 2 * self.config.hidden_size,
        }
    }

    fn check_batch(&self, batch: &Batch) -> Result<(), NnError> {
        if batch.rows == 0 {
            return Err(NnError::EmptyBatch);
        }
        let fail = |msg: String| Err(NnError::ShapeMismatch { msg });
        if batch.ids.len() != batch.rows * batch.max_len {
            return fail(format!(
                "id matrix holds {} entries for {} rows of width {}",
                batch.ids.len(),
                batch.rows,
                batch.max_len
            ));
        }
        if batch.lengths.len() != batch.rows || batch.targets.len() != batch.rows {
            return fail(String::from("lengths/targets do not match row count"));
        }
        for (row, &len) in batch.lengths.iter().enumerate() {
            if len == 0 || len > batch.max_len {
                return fail(format!("row {row} has invalid length {len}"));
            }
        }
        if let Some(&id) = batch.ids.iter().find(|&&id| id as usize >= self.vocab_size) {
            return fail(format!(
                "token id {id} outside vocabulary of {}",
                self.vocab_size
            ));
        }
        if self.config.encoder == EncoderKind::SelfAttention
            && self.config.positions == PositionKind::Learned
        {
            if let Some((row, &len)) = batch
                .lengths
                .iter()
                .enumerate()
                .find(|&(_, &len)| len > self.config.max_len)
            {
                return fail(format!(
                    "row {row} length {len} exceeds learned position table {}",
                    self.config.max_len
                ));
            }
        }
        Ok(())
    }

    /// Runs the network over one batch. Returns one prediction per row plus
    /// the activation tape for [`Model::backward`]. Dropout is active only
    /// in training mode and draws from `rng`.
    pub fn forward(
        &self,
        store: &ParameterStore,
        batch: &Batch,
        mode: Mode,
        mut rng: Option<&mut DetRng>,
    ) -> Result<(Vec<f64>, Tape), NnError> {
        self.check_batch(batch)?;
        let dropping = mode == Mode::Train && self.config.dropout > 0.0;
        if dropping && rng.is_none() {
            return Err(NnError::ShapeMismatch {
                msg: String::from("training-mode forward with dropout requires an rng"),
            });
        }
        let mut preds = Vec::with_capacity(batch.rows);
        let mut examples = Vec::with_capacity(batch.rows);
        for r in 0..batch.rows {
            let len = batch.lengths[r];
            let ids = &batch.row(r)[..len];
            let drop_rng = if dropping { rng.as_deref_mut() } else { None };
            let (pred, ex) = self.forward_example(store, ids, drop_rng)?;
            preds.push(pred);
            examples.push(ex);
        }
        Ok((
            preds,
            Tape {
                version: store.version(),
                examples,
            },
        ))
    }

    fn forward_example(
        &self,
        store: &ParameterStore,
        ids: &[u32],
        mut rng: Option<&mut DetRng>,
    ) -> Result<(f64, ExTape), NnError> {
        let t = ids.len();
        let e = self.config.embed_dim;
        let p = self.config.dropout;
        let embed = store.value(self.ix.embed);
        let mut x0 = vec![0.0; t * e];
        for (pos, &id) in ids.iter().enumerate() {
            x0[pos * e..(pos + 1) * e]
                .copy_from_slice(&embed[id as usize * e..(id as usize + 1) * e]);
        }

        let (outs, enc) = match self.config.encoder {
            EncoderKind::BagOfTokens => {
                let drop0 = rng.as_deref_mut().map(|r| make_mask(r, t * e, p));
                if let Some(m) = &drop0 {
                    apply_mask(&mut x0, m);
                }
                (x0, EncTape::Bag { drop0 })
            }
            EncoderKind::BiRecurrent => {
                let drop0 = rng.as_deref_mut().map(|r| make_mask(r, t * e, p));
                if let Some(m) = &drop0 {
                    apply_mask(&mut x0, m);
                }
                let (outs, tape) =
                    recurrent::forward(self, store, &self.ix.rec, x0, t, rng.as_deref_mut());
                (outs, EncTape::Rec { tape, drop0 })
            }
            EncoderKind::SelfAttention => {
                let layout = self.ix.attn.as_ref().expect("attention layout");
                let (outs, tape) =
                    attention::forward(self, store, layout, &x0, t, rng.as_deref_mut());
                (outs, EncTape::Attn { x_embed: x0, tape })
            }
        };

        let pd = self.pooled_dim();
        let pooled = match self.config.pooling {
            PoolKind::MaskedMean => {
                let mut acc = vec![0.0; pd];
                for row in outs.chunks_exact(pd) {
                    for (a, &v) in acc.iter_mut().zip(row) {
                        *a += v;
                    }
                }
                acc.iter_mut().for_each(|v| *v /= t as f64);
                acc
            }
            PoolKind::FirstToken => outs[..pd].to_vec(),
        };
        let head_w = store.value(self.ix.head_w);
        let head_b = store.value(self.ix.head_b)[0];
        let pred = math::dot(head_w, &pooled) + head_b;
        Ok((
            pred,
            ExTape {
                ids: ids.to_vec(),
                enc,
                pooled,
            },
        ))
    }

    /// Accumulates parameter gradients for one batch given dL/dpred.
    /// Gradients add up across calls; call [`ParameterStore::zero_grads`]
    /// between optimizer steps.
    pub fn backward(
        &self,
        store: &mut ParameterStore,
        tape: &Tape,
        dpred: &[f64],
    ) -> Result<(), NnError> {
        if tape.version != store.version() {
            return Err(NnError::StaleCache);
        }
        if dpred.len() != tape.examples.len() {
            return Err(NnError::ShapeMismatch {
                msg: format!(
                    "{} loss gradients for {} cached examples",
                    dpred.len(),
                    tape.examples.len()
                ),
            });
        }
        let pd = self.pooled_dim();
        let e = self.config.embed_dim;
        for (ex, &dp) in tape.examples.iter().zip(dpred) {
            let t = ex.ids.len();
            let head_w_val = store.value(self.ix.head_w).to_vec();
            {
                let (_, grads) = store.values_and_grads_mut();
                for (g, &pv) in grads[self.ix.head_w].iter_mut().zip(&ex.pooled) {
                    *g += dp * pv;
                }
                grads[self.ix.head_b][0] += dp;
            }
            let dpooled: Vec<f64> = head_w_val.iter().map(|&w| w * dp).collect();

            let mut douts = vec![0.0; t * pd];
            match self.config.pooling {
                PoolKind::MaskedMean => {
                    let scale = 1.0 / t as f64;
                    for row in douts.chunks_exact_mut(pd) {
                        for (d, &dv) in row.iter_mut().zip(&dpooled) {
                            *d += dv * scale;
                        }
                    }
                }
                PoolKind::FirstToken => {
                    douts[..pd].copy_from_slice(&dpooled);
                }
            }

            let dx0 = match &ex.enc {
                EncTape::Bag { drop0 } => {
                    let mut dx0 = douts;
                    if let Some(m) = drop0 {
                        apply_mask(&mut dx0, m);
                    }
                    dx0
                }
                EncTape::Rec { tape, drop0 } => {
                    let mut dx0 = recurrent::backward(self, store, &self.ix.rec, tape, douts, t);
                    if let Some(m) = drop0 {
                        apply_mask(&mut dx0, m);
                    }
                    dx0
                }
                EncTape::Attn { x_embed, tape } => {
                    let layout = self.ix.attn.as_ref().expect("attention layout").clone();
                    attention::backward(self, store, &layout, tape, x_embed, douts, t)
                }
            };
            let (_, grads) = store.values_and_grads_mut();
            let ge = &mut grads[self.ix.embed];
            for (pos, &id) in ex.ids.iter().enumerate() {
                let row = &mut ge[id as usize * e..(id as usize + 1) * e];
                for (g, &d) in row.iter_mut().zip(&dx0[pos * e..(pos + 1) * e]) {
                    *g += d;
                }
            }
        }
        Ok(())
    }

    /// Predictions in evaluation mode over a batch list, in order.
    pub fn predict(&self, store: &ParameterStore, batches: &[Batch]) -> Result<Vec<f64>, NnError> {
        let mut out = Vec::new();
        for b in batches {
            let (preds, _) = self.forward(store, b, Mode::Eval, None)?;
            out.extend(preds);
        }
        Ok(out)
    }
}

/// Activation cache of one forward batch.
#[derive(Debug)]
pub struct Tape {
    version: u64,
    examples: Vec<ExTape>,
}

#[derive(Debug)]
struct ExTape {
    ids: Vec<u32>,
    enc: EncTape,
    pooled: Vec<f64>,
}

#[derive(Debug)]
enum EncTape {
    Bag {
        drop0: Option<Vec<f64>>,
    },
    Rec {
        tape: recurrent::RecTape,
        drop0: Option<Vec<f64>>,
    },
    Attn {
        /// Raw embedding gather, before the input projection.
        x_embed: Vec<f64>,
        tape: attention::AttnTape,
    },
}

/// Inverted dropout mask: entries are 0 with probability `p`, else 1/(1-p).
fn make_mask(rng: &mut DetRng, len: usize, p: f64) -> Vec<f64> {
    let keep = 1.0 / (1.0 - p);
    (0..len)
        .map(|_| if rng.bernoulli(p) { 0.0 } else { keep })
        .collect()
}

fn apply_mask(x: &mut [f64], mask: &[f64]) {
    for (v, &m) in x.iter_mut().zip(mask) {
        *v *= m;
    }
}

/// Mean absolute error and its gradient with respect to the predictions:
/// loss = (1/n) Σ |yᵢ − ŷᵢ|, dL/dŷᵢ = −sign(yᵢ − ŷᵢ)/n with subgradient 0
/// at exact ties.
pub fn mae_loss(pred: &[f64], target: &[f64]) -> Result<(f64, Vec<f64>), NnError> {
    if pred.is_empty() {
        return Err(NnError::EmptyBatch);
    }
    if pred.len() != target.len() {
        return Err(NnError::ShapeMismatch {
            msg: format!("{} predictions vs {} targets", pred.len(), target.len()),
        });
    }
    let n = pred.len() as f64;
    let mut loss = 0.0;
    let mut grad = Vec::with_capacity(pred.len());
    for (&p, &y) in pred.iter().zip(target) {
        let r = y - p;
        loss += libm::fabs(r);
        grad.push(if r > 0.0 {
            -1.0 / n
        } else if r < 0.0 {
            1.0 / n
        } else {
            0.0
        });
    }
    Ok((loss / n, grad))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mae_loss_worked_examples() {
        let (loss, grad) = mae_loss(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(loss, 0.0);
        assert!(grad.iter().all(|&g| g == 0.0));

        let (loss, grad) = mae_loss(&[0.0, 0.0], &[1.0, -1.0]).unwrap();
        assert_eq!(loss, 1.0);
        assert_eq!(grad, vec![-0.5, 0.5]);

        let (loss, _) = mae_loss(&[2.0], &[5.0]).unwrap();
        assert_eq!(loss, 3.0);
    }

    #[test]
    fn mae_loss_rejects_bad_shapes() {
        assert!(matches!(mae_loss(&[], &[]), Err(NnError::EmptyBatch)));
        assert!(matches!(
            mae_loss(&[1.0], &[1.0, 2.0]),
            Err(NnError::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn config_validation_collects_all_issues() {
        let mut cfg = ModelConfig::new(EncoderKind::SelfAttention);
        cfg.learning_rate = -1.0;
        cfg.dropout = 1.5;
        cfg.hidden_size = 10;
        cfg.attention_heads = 4;
        let issues = cfg.validate();
        assert_eq!(issues.len(), 3);
    }

    #[test]
    fn config_json_rejects_unknown_keys() {
        let err = serde_json::from_str::<ModelConfig>(
            r#"{"encoder":"bag_of_tokens","learning_rte":0.1}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("learning_rte"));
    }
}
