//! Ensemble properties: bootstrap statistics, stacking pass-through,
//! bagging-mean composition, noise reduction, hygiene, and determinism.

use aisprop_core::data::{Batch, BatchSource, TargetScaler};
use aisprop_core::ensemble::{
    bootstrap_indices, bootstrap_resample, fit_bagged_meta, predict_ensemble, predict_meta,
    train_ensemble, EnsembleConfig, MetaLearnerKind, StackingSource,
};
use aisprop_core::metrics::mae;
use aisprop_core::nn::{EncoderKind, ModelConfig};
use aisprop_core::rng::DetRng;

#[test]
fn bootstrap_distinct_fraction_matches_theory() {
    // expected distinct fraction approaches 1 − 1/e ≈ 0.632
    let n = 1000;
    let mut total = 0.0;
    for seed in 0..50u64 {
        let idx = bootstrap_indices(n, seed);
        let mut seen = vec![false; n];
        idx.iter().for_each(|&i| seen[i] = true);
        total += seen.iter().filter(|&&s| s).count() as f64 / n as f64;
    }
    let fraction = total / 50.0;
    assert!(
        (fraction - 0.632).abs() < 0.03,
        "distinct fraction {fraction} outside 0.632 ± 0.03"
    );
}

#[test]
fn resample_preserves_cardinality_and_multiset_membership() {
    let rows: Vec<i32> = (0..37).collect();
    let out = bootstrap_resample(&rows, 4).unwrap();
    assert_eq!(out.len(), 37);
    assert!(out.iter().all(|v| rows.contains(v)));
}

#[test]
fn perfect_single_base_passes_through_the_meta() {
    // K=1, B=1: base predictions equal the targets, so the linear meta must
    // reproduce them and the ensemble MAE equals the base MAE within 1e-9
    let y: Vec<f64> = (0..50).map(|i| 0.3 + 0.01 * i as f64).collect();
    let stacked: Vec<Vec<f64>> = y.iter().map(|&v| vec![v]).collect();
    let metas = fit_bagged_meta(&stacked, &y, 1, MetaLearnerKind::MeanLinear, 0).unwrap();
    let preds = predict_meta(&metas, &stacked);
    let base_mae = mae(&y, &y).unwrap();
    let ens_mae = mae(&y, &preds).unwrap();
    assert!((ens_mae - base_mae).abs() <= 1e-9, "ensemble MAE {ens_mae}");
}

#[test]
fn constant_bases_with_constant_target_predict_the_target() {
    let stacked = vec![vec![2.5, 2.5, 2.5]; 30];
    let y = vec![7.0; 30];
    for kind in [MetaLearnerKind::MeanLinear, MetaLearnerKind::RegressionStump] {
        let metas = fit_bagged_meta(&stacked, &y, 5, kind, 3).unwrap();
        let preds = predict_meta(&metas, &[vec![2.5, 2.5, 2.5]]);
        assert!(
            (preds[0] - 7.0).abs() < 1e-6,
            "{kind:?} predicted {} for constant target 7",
            preds[0]
        );
    }
}

#[test]
fn duplicated_bootstrap_seeds_average_to_the_same_prediction() {
    let y: Vec<f64> = (0..40).map(|i| (i as f64 * 0.37).sin()).collect();
    let stacked: Vec<Vec<f64>> = y.iter().map(|&v| vec![v + 0.05, v - 0.02]).collect();
    let one = fit_bagged_meta(&stacked, &y, 1, MetaLearnerKind::MeanLinear, 9).unwrap();
    // mean of three identical fits equals the single fit
    let tripled = vec![one[0].clone(), one[0].clone(), one[0].clone()];
    let p1 = predict_meta(&one, &stacked);
    let p3 = predict_meta(&tripled, &stacked);
    for (a, b) in p1.iter().zip(&p3) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn averaging_iid_noise_beats_the_best_single_base() {
    // K=3 bases with i.i.d. zero-mean noise; ensemble validation MAE should
    // beat the best base in at least 18 of 20 seeds
    let mut failures = 0;
    for seed in 0..20u64 {
        let mut rng = DetRng::new(1000 + seed);
        let n = 400;
        let y: Vec<f64> = (0..n).map(|i| (i as f64 * 0.05).sin() * 2.0).collect();
        let noise = 0.3;
        let stacked: Vec<Vec<f64>> = y
            .iter()
            .map(|&v| {
                (0..3)
                    .map(|_| v + noise * (rng.uniform() * 2.0 - 1.0))
                    .collect()
            })
            .collect();
        let metas = fit_bagged_meta(&stacked, &y, 10, MetaLearnerKind::MeanLinear, seed).unwrap();
        let ens = mae(&y, &predict_meta(&metas, &stacked)).unwrap();
        let best_base = (0..3)
            .map(|k| {
                let preds: Vec<f64> = stacked.iter().map(|r| r[k]).collect();
                mae(&y, &preds).unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        if ens > best_base {
            failures += 1;
        }
    }
    assert!(failures <= 2, "{failures} of 20 seeds saw no improvement");
}

// --- end-to-end ensemble over real base models -----------------------------

const VOCAB: usize = 10;
const SEQ_LEN: usize = 16;

/// Same linear counting task as the training tests, shared across splits.
struct CountTask {
    rows: Vec<(Vec<u32>, f64)>,
    train_end: usize,
    valid_end: usize,
}

impl CountTask {
    fn new(n: usize, seed: u64) -> Self {
        let mut rng = DetRng::new(seed);
        let rows = (0..n)
            .map(|_| {
                let mut ids = vec![2u32];
                let count = rng.below(8);
                for _ in 0..count {
                    ids.push(4);
                }
                while ids.len() < SEQ_LEN - 1 {
                    ids.push([5u32, 6, 7, 8, 9][rng.below(5)]);
                }
                ids.push(3);
                rng.shuffle(&mut ids[1..SEQ_LEN - 1]);
                (ids, 0.1 * count as f64)
            })
            .collect();
        CountTask {
            rows,
            train_end: n * 7 / 10,
            valid_end: n * 85 / 100,
        }
    }

    fn slice(&self, lo: usize, hi: usize) -> Vec<Batch> {
        (lo..hi)
            .collect::<Vec<_>>()
            .chunks(25)
            .map(|chunk| {
                let mut ids = Vec::new();
                let mut targets = Vec::new();
                for &i in chunk {
                    ids.extend_from_slice(&self.rows[i].0);
                    targets.push(self.rows[i].1);
                }
                Batch {
                    ids,
                    rows: chunk.len(),
                    max_len: SEQ_LEN,
                    lengths: vec![SEQ_LEN; chunk.len()],
                    targets,
                }
            })
            .collect()
    }
}

impl BatchSource for CountTask {
    fn train_epoch(&self, _epoch: usize) -> Vec<Batch> {
        self.slice(0, self.train_end)
    }
    fn valid(&self) -> Vec<Batch> {
        self.slice(self.train_end, self.valid_end)
    }
    fn test(&self) -> Vec<Batch> {
        self.slice(self.valid_end, self.rows.len())
    }
}

fn small_base(encoder: EncoderKind) -> ModelConfig {
    let mut cfg = ModelConfig::new(encoder);
    cfg.embed_dim = 8;
    cfg.hidden_size = 8;
    cfg.attention_heads = 2;
    cfg.dropout = 0.0;
    cfg.learning_rate = 0.02;
    cfg.epochs = 30;
    cfg.max_len = SEQ_LEN;
    cfg
}

#[test]
fn single_perfect_base_makes_the_ensemble_match_it() {
    let task = CountTask::new(200, 77);
    let cfg = EnsembleConfig {
        base_configs: vec![small_base(EncoderKind::BagOfTokens)],
        bagging_size: 1,
        meta_learner: MetaLearnerKind::MeanLinear,
        stacking_source: StackingSource::ValidationHoldout,
        seed: 5,
    };
    let scaler = TargetScaler::identity();
    let (model, _) = train_ensemble(&cfg, VOCAB, &task, &scaler, None).unwrap();
    let test_batches = task.test();
    let ens = predict_ensemble(&model, &test_batches).unwrap();
    let (base_model, base_store) = &model.bases[0];
    let base: Vec<f64> = base_model.predict(base_store, &test_batches).unwrap();
    let y: Vec<f64> = test_batches
        .iter()
        .flat_map(|b| b.targets.iter().copied())
        .collect();
    let ens_mae = mae(&y, &ens).unwrap();
    let base_mae = mae(&y, &base).unwrap();
    // the base is near-perfect on this exactly-linear task; the linear meta
    // may correct residual bias but must not degrade it
    assert!(base_mae < 0.02);
    assert!(
        ens_mae <= base_mae * 1.1 + 1e-6,
        "{ens_mae} vs {base_mae}"
    );
}

#[test]
fn ensemble_training_is_deterministic_from_the_seed() {
    let task = CountTask::new(120, 78);
    let cfg = EnsembleConfig {
        base_configs: vec![
            small_base(EncoderKind::BagOfTokens),
            small_base(EncoderKind::BiRecurrent),
        ],
        bagging_size: 5,
        meta_learner: MetaLearnerKind::MeanLinear,
        stacking_source: StackingSource::ValidationHoldout,
        seed: 11,
    };
    let scaler = TargetScaler::identity();
    let run = || {
        let (model, _) = train_ensemble(&cfg, VOCAB, &task, &scaler, None).unwrap();
        let bases: Vec<Vec<u8>> = model.bases.iter().map(|(_, s)| s.to_bytes()).collect();
        (bases, model.metas)
    };
    let (bases_a, metas_a) = run();
    let (bases_b, metas_b) = run();
    assert_eq!(bases_a, bases_b);
    assert_eq!(metas_a, metas_b);
}

#[test]
fn meta_learners_never_see_test_rows() {
    let base = CountTask::new(120, 79);
    let mut poisoned = CountTask::new(120, 79);
    for i in poisoned.valid_end..poisoned.rows.len() {
        poisoned.rows[i].1 = 1000.0; // scrambled test targets
    }
    let cfg = EnsembleConfig {
        base_configs: vec![small_base(EncoderKind::BagOfTokens)],
        bagging_size: 4,
        meta_learner: MetaLearnerKind::MeanLinear,
        stacking_source: StackingSource::ValidationHoldout,
        seed: 2,
    };
    let scaler = TargetScaler::identity();
    let (model_a, _) = train_ensemble(&cfg, VOCAB, &base, &scaler, None).unwrap();
    let (model_b, _) = train_ensemble(&cfg, VOCAB, &poisoned, &scaler, None).unwrap();
    assert_eq!(model_a.metas, model_b.metas);
    assert_eq!(
        model_a.bases[0].1.to_bytes(),
        model_b.bases[0].1.to_bytes()
    );
}

#[test]
fn ensemble_prediction_permutes_with_its_input() {
    let task = CountTask::new(80, 80);
    let cfg = EnsembleConfig {
        base_configs: vec![small_base(EncoderKind::BagOfTokens)],
        bagging_size: 2,
        meta_learner: MetaLearnerKind::MeanLinear,
        stacking_source: StackingSource::ValidationHoldout,
        seed: 21,
    };
    let scaler = TargetScaler::identity();
    let (model, _) = train_ensemble(&cfg, VOCAB, &task, &scaler, None).unwrap();
    let batches = task.test();
    let preds = predict_ensemble(&model, &batches).unwrap();
    let mut reversed_batches: Vec<Batch> = batches.clone();
    reversed_batches.reverse();
    let reversed = predict_ensemble(&model, &reversed_batches).unwrap();
    let flat: Vec<f64> = batches.iter().flat_map(|b| b.targets.iter()).copied().collect();
    assert_eq!(preds.len(), flat.len());
    let mut expect: Vec<Vec<f64>> = Vec::new();
    let mut offset = 0;
    for b in &batches {
        expect.push(preds[offset..offset + b.rows].to_vec());
        offset += b.rows;
    }
    expect.reverse();
    let expect: Vec<f64> = expect.into_iter().flatten().collect();
    for (a, b) in expect.iter().zip(&reversed) {
        assert!((a - b).abs() < 1e-12);
    }
}
