//! Metrics against an independent oracle implementation (separate code
//! path with Neumaier-compensated accumulation) plus the algebraic
//! invariants: Jensen ordering, permutation and translation invariance.

use aisprop_core::metrics::{mae, r2, rmse};
use aisprop_core::rng::DetRng;
use proptest::prelude::*;

/// Compensated (Neumaier) summation; independent of the pairwise path used
/// by the implementation.
fn neumaier_sum<I: Iterator<Item = f64>>(xs: I) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn oracle_mae(y: &[f64], y_hat: &[f64]) -> f64 {
    neumaier_sum(y.iter().zip(y_hat).map(|(&a, &b)| (a - b).abs())) / y.len() as f64
}

fn oracle_rmse(y: &[f64], y_hat: &[f64]) -> f64 {
    (neumaier_sum(y.iter().zip(y_hat).map(|(&a, &b)| (a - b) * (a - b))) / y.len() as f64).sqrt()
}

fn oracle_r2(y: &[f64], y_hat: &[f64]) -> f64 {
    let mean = neumaier_sum(y.iter().copied()) / y.len() as f64;
    let ss_res = neumaier_sum(y.iter().zip(y_hat).map(|(&a, &b)| (a - b) * (a - b)));
    let ss_tot = neumaier_sum(y.iter().map(|&a| (a - mean) * (a - mean)));
    1.0 - ss_res / ss_tot
}

fn random_vectors(seed: u64, n: usize, scale: f64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = DetRng::new(seed);
    let y: Vec<f64> = (0..n).map(|_| rng.uniform_in(-scale, scale)).collect();
    let y_hat: Vec<f64> = y
        .iter()
        .map(|&v| v + rng.uniform_in(-0.3 * scale, 0.3 * scale))
        .collect();
    (y, y_hat)
}

#[test]
fn metrics_match_the_oracle_to_1e12_on_a_thousand_vectors() {
    for seed in 0..1000u64 {
        let n = 2 + (seed as usize % 300);
        let scale = [0.5, 1.0, 100.0, 5000.0][seed as usize % 4];
        let (y, y_hat) = random_vectors(seed, n, scale);
        let tol = 1e-12 * scale.max(1.0);
        assert!((mae(&y, &y_hat).unwrap() - oracle_mae(&y, &y_hat)).abs() < tol);
        assert!((rmse(&y, &y_hat).unwrap() - oracle_rmse(&y, &y_hat)).abs() < tol);
        assert!((r2(&y, &y_hat).unwrap() - oracle_r2(&y, &y_hat)).abs() < 1e-12);
    }
}

#[test]
fn pairwise_summation_engages_on_large_inputs() {
    let (y, y_hat) = random_vectors(99, 20_000, 10.0);
    assert!((mae(&y, &y_hat).unwrap() - oracle_mae(&y, &y_hat)).abs() < 1e-11);
    assert!((rmse(&y, &y_hat).unwrap() - oracle_rmse(&y, &y_hat)).abs() < 1e-11);
}

proptest! {
    #[test]
    fn mae_never_exceeds_rmse(
        pairs in prop::collection::vec((-1e6f64..1e6, -1e6f64..1e6), 1..200)
    ) {
        let y: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let y_hat: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let mae_v = mae(&y, &y_hat).unwrap();
        let rmse_v = rmse(&y, &y_hat).unwrap();
        prop_assert!(mae_v <= rmse_v * (1.0 + 1e-12) + 1e-12);
    }

    #[test]
    fn identical_permutation_leaves_metrics_unchanged(
        pairs in prop::collection::vec((-100f64..100.0, -100f64..100.0), 3..60),
        seed in 0u64..1000
    ) {
        let y: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let y_hat: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let mut order: Vec<usize> = (0..y.len()).collect();
        DetRng::new(seed).shuffle(&mut order);
        let yp: Vec<f64> = order.iter().map(|&i| y[i]).collect();
        let yhp: Vec<f64> = order.iter().map(|&i| y_hat[i]).collect();
        prop_assert!((mae(&y, &y_hat).unwrap() - mae(&yp, &yhp).unwrap()).abs() < 1e-9);
        prop_assert!((rmse(&y, &y_hat).unwrap() - rmse(&yp, &yhp).unwrap()).abs() < 1e-9);
        if r2(&y, &y_hat).is_ok() {
            prop_assert!((r2(&y, &y_hat).unwrap() - r2(&yp, &yhp).unwrap()).abs() < 1e-9);
        }
    }

    #[test]
    fn translation_leaves_mae_and_rmse_unchanged(
        pairs in prop::collection::vec((-100f64..100.0, -100f64..100.0), 1..60),
        c in -1000f64..1000.0
    ) {
        let y: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let y_hat: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let yt: Vec<f64> = y.iter().map(|&v| v + c).collect();
        let yht: Vec<f64> = y_hat.iter().map(|&v| v + c).collect();
        prop_assert!((mae(&y, &y_hat).unwrap() - mae(&yt, &yht).unwrap()).abs() < 1e-9);
        prop_assert!((rmse(&y, &y_hat).unwrap() - rmse(&yt, &yht).unwrap()).abs() < 1e-9);
    }
}
