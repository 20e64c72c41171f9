//! Scalar activations and the small dense-matrix kernels behind the
//! encoders. All matrices are row-major `Vec<f64>` slices; `libm` supplies
//! the transcendentals so std and no_std builds agree bit for bit.

use alloc::vec;
use alloc::vec::Vec;

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + libm::exp(-x))
}

pub fn tanh(x: f64) -> f64 {
    libm::tanh(x)
}

/// Exact GELU: x · Φ(x).
pub fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + libm::erf(x * core::f64::consts::FRAC_1_SQRT_2))
}

/// dGELU/dx = Φ(x) + x·φ(x).
pub fn gelu_grad(x: f64) -> f64 {
    let phi_cdf = 0.5 * (1.0 + libm::erf(x * core::f64::consts::FRAC_1_SQRT_2));
    let phi_pdf = libm::exp(-0.5 * x * x) / libm::sqrt(2.0 * core::f64::consts::PI);
    phi_cdf + x * phi_pdf
}

/// out[m×n] += a[m×k] · b[k×n]
pub fn gemm_nn(out: &mut [f64], a: &[f64], b: &[f64], m: usize, k: usize, n: usize) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(out.len(), m * n);
    for i in 0..m {
        let out_row = &mut out[i * n..(i + 1) * n];
        for p in 0..k {
            let a_ip = a[i * k + p];
            if a_ip == 0.0 {
                continue;
            }
            let b_row = &b[p * n..(p + 1) * n];
            for (o, &bv) in out_row.iter_mut().zip(b_row) {
                *o += a_ip * bv;
            }
        }
    }
}

/// out[m×n] += a[m×k] · b[n×k]ᵀ
pub fn gemm_nt(out: &mut [f64], a: &[f64], b: &[f64], m: usize, k: usize, n: usize) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), n * k);
    debug_assert_eq!(out.len(), m * n);
    for i in 0..m {
        let a_row = &a[i * k..(i + 1) * k];
        for j in 0..n {
            let b_row = &b[j * k..(j + 1) * k];
            out[i * n + j] += dot(a_row, b_row);
        }
    }
}

/// out[m×n] += a[k×m]ᵀ · b[k×n]
pub fn gemm_tn(out: &mut [f64], a: &[f64], b: &[f64], m: usize, k: usize, n: usize) {
    debug_assert_eq!(a.len(), k * m);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(out.len(), m * n);
    for p in 0..k {
        let a_row = &a[p * m..(p + 1) * m];
        let b_row = &b[p * n..(p + 1) * n];
        for i in 0..m {
            let a_pi = a_row[i];
            if a_pi == 0.0 {
                continue;
            }
            let out_row = &mut out[i * n..(i + 1) * n];
            for (o, &bv) in out_row.iter_mut().zip(b_row) {
                *o += a_pi * bv;
            }
        }
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

/// y[t] = x[t] + bias for every row t.
pub fn add_bias(x: &mut [f64], bias: &[f64]) {
    let n = bias.len();
    for row in x.chunks_exact_mut(n) {
        for (v, &b) in row.iter_mut().zip(bias) {
            *v += b;
        }
    }
}

/// grad[j] += Σ_rows d[row][j]
pub fn bias_grad(grad: &mut [f64], d: &[f64]) {
    let n = grad.len();
    for row in d.chunks_exact(n) {
        for (g, &dv) in grad.iter_mut().zip(row) {
            *g += dv;
        }
    }
}

/// In-place row-wise softmax over an m×n matrix.
pub fn softmax_rows(x: &mut [f64], n: usize) {
    for row in x.chunks_exact_mut(n) {
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = libm::exp(*v - max);
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
}

/// Row-wise softmax Jacobian application: ds = p ∘ (dp − ⟨dp, p⟩).
pub fn softmax_backward_rows(p: &[f64], dp: &[f64], ds: &mut [f64], n: usize) {
    for ((p_row, dp_row), ds_row) in p
        .chunks_exact(n)
        .zip(dp.chunks_exact(n))
        .zip(ds.chunks_exact_mut(n))
    {
        let inner = dot(p_row, dp_row);
        for ((d, &pv), &dpv) in ds_row.iter_mut().zip(p_row).zip(dp_row) {
            *d = pv * (dpv - inner);
        }
    }
}

/// Layer-norm forward caches: normalized rows and reciprocal std per row.
#[derive(Debug)]
pub struct LnCache {
    pub xhat: Vec<f64>,
    pub rstd: Vec<f64>,
}

const LN_EPS: f64 = 1e-5;

/// y = gain ∘ x̂ + bias row-wise; returns caches for the backward pass.
pub fn layer_norm(x: &[f64], gain: &[f64], bias: &[f64], n: usize) -> (Vec<f64>, LnCache) {
    let rows = x.len() / n;
    let mut y = vec![0.0; x.len()];
    let mut xhat = vec![0.0; x.len()];
    let mut rstd = vec![0.0; rows];
    for (t, row) in x.chunks_exact(n).enumerate() {
        let mean = row.iter().sum::<f64>() / n as f64;
        let var = row.iter().map(|&v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
        let r = 1.0 / libm::sqrt(var + LN_EPS);
        rstd[t] = r;
        for (j, &v) in row.iter().enumerate() {
            let h = (v - mean) * r;
            xhat[t * n + j] = h;
            y[t * n + j] = gain[j] * h + bias[j];
        }
    }
    (y, LnCache { xhat, rstd })
}

/// Backward of `layer_norm`; accumulates into dgain/dbias, returns dx.
pub fn layer_norm_backward(
    dy: &[f64],
    cache: &LnCache,
    gain: &[f64],
    dgain: &mut [f64],
    dbias: &mut [f64],
    n: usize,
) -> Vec<f64> {
    let mut dx = vec![0.0; dy.len()];
    for (t, dy_row) in dy.chunks_exact(n).enumerate() {
        let xhat_row = &cache.xhat[t * n..(t + 1) * n];
        let mut mean_dxhat = 0.0;
        let mut mean_dxhat_xhat = 0.0;
        for j in 0..n {
            dgain[j] += dy_row[j] * xhat_row[j];
            dbias[j] += dy_row[j];
            let dxh = dy_row[j] * gain[j];
            mean_dxhat += dxh;
            mean_dxhat_xhat += dxh * xhat_row[j];
        }
        mean_dxhat /= n as f64;
        mean_dxhat_xhat /= n as f64;
        let r = cache.rstd[t];
        for j in 0..n {
            let dxh = dy_row[j] * gain[j];
            dx[t * n + j] = r * (dxh - mean_dxhat - xhat_row[j] * mean_dxhat_xhat);
        }
    }
    dx
}
