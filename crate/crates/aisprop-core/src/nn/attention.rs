//! Pre-norm self-attention encoder: input projection, positional encoding
//! (sinusoidal constants or a learned table), multi-head scaled dot-product
//! attention blocks with GELU feed-forward sublayers, and a final layer
//! norm. Each example is processed at its true length, so no attention
//! masking is needed.

use alloc::vec;
use alloc::vec::Vec;

use super::math::{
    add_bias, bias_grad, dot, gelu, gelu_grad, gemm_nn, gemm_nt, gemm_tn, layer_norm,
    layer_norm_backward, softmax_backward_rows, softmax_rows, LnCache,
};
use super::{apply_mask, make_mask, AttnLayerIx, AttnLayout, Model, ParameterStore, PositionKind};
use crate::rng::DetRng;

#[derive(Debug)]
struct BlockCache {
    ln1: LnCache,
    a: Vec<f64>,
    q: Vec<f64>,
    k: Vec<f64>,
    v: Vec<f64>,
    /// heads × t × t attention weights, concatenated per head.
    p: Vec<f64>,
    ctx: Vec<f64>,
    attn_drop: Option<Vec<f64>>,
    ln2: LnCache,
    f: Vec<f64>,
    u: Vec<f64>,
    g: Vec<f64>,
    ffn_drop: Option<Vec<f64>>,
}

#[derive(Debug)]
pub(super) struct AttnTape {
    drop0: Option<Vec<f64>>,
    layers: Vec<BlockCache>,
    final_ln: LnCache,
}

fn sinusoidal(pos: usize, j: usize, d: usize) -> f64 {
    let pair = (j / 2) * 2;
    let freq = libm::exp(-(pair as f64 / d as f64) * libm::log(10_000.0));
    let angle = pos as f64 * freq;
    if j % 2 == 0 {
        libm::sin(angle)
    } else {
        libm::cos(angle)
    }
}

pub(super) fn forward(
    model: &Model,
    store: &ParameterStore,
    layout: &AttnLayout,
    x_embed: &[f64],
    t: usize,
    mut rng: Option<&mut DetRng>,
) -> (Vec<f64>, AttnTape) {
    let d = model.config.hidden_size;
    let e = model.config.embed_dim;
    let p_drop = model.config.dropout;

    let mut x = vec![0.0; t * d];
    gemm_nn(&mut x, x_embed, store.value(layout.proj_w), t, e, d);
    add_bias(&mut x, store.value(layout.proj_b));
    match model.config.positions {
        PositionKind::Sinusoidal => {
            for pos in 0..t {
                for j in 0..d {
                    x[pos * d + j] += sinusoidal(pos, j, d);
                }
            }
        }
        PositionKind::Learned => {
            let table = store.value(layout.pos.expect("learned positions"));
            for pos in 0..t {
                for j in 0..d {
                    x[pos * d + j] += table[pos * d + j];
                }
            }
        }
    }
    let drop0 = rng.as_deref_mut().map(|r| make_mask(r, t * d, p_drop));
    if let Some(m) = &drop0 {
        apply_mask(&mut x, m);
    }

    let mut layers = Vec::with_capacity(layout.layers.len());
    for ix in &layout.layers {
        let (x_out, cache) = forward_block(model, store, ix, x, t, rng.as_deref_mut());
        layers.push(cache);
        x = x_out;
    }

    let (outs, final_ln) = layer_norm(
        &x,
        store.value(layout.final_g),
        store.value(layout.final_b),
        d,
    );
    (
        outs,
        AttnTape {
            drop0,
            layers,
            final_ln,
        },
    )
}

fn forward_block(
    model: &Model,
    store: &ParameterStore,
    ix: &AttnLayerIx,
    x_in: Vec<f64>,
    t: usize,
    mut rng: Option<&mut DetRng>,
) -> (Vec<f64>, BlockCache) {
    let d = model.config.hidden_size;
    let f_dim = model.config.ffn_dim();
    let heads = model.config.attention_heads;
    let dh = d / heads;
    let scale = 1.0 / libm::sqrt(dh as f64);
    let p_drop = model.config.dropout;

    let (a, ln1) = layer_norm(&x_in, store.value(ix.ln1_g), store.value(ix.ln1_b), d);
    let mut q = vec![0.0; t * d];
    gemm_nn(&mut q, &a, store.value(ix.wq), t, d, d);
    add_bias(&mut q, store.value(ix.bq));
    let mut k = vec![0.0; t * d];
    gemm_nn(&mut k, &a, store.value(ix.wk), t, d, d);
    add_bias(&mut k, store.value(ix.bk));
    let mut v = vec![0.0; t * d];
    gemm_nn(&mut v, &a, store.value(ix.wv), t, d, d);
    add_bias(&mut v, store.value(ix.bv));

    let mut p = vec![0.0; heads * t * t];
    let mut ctx = vec![0.0; t * d];
    for hd in 0..heads {
        let off = hd * dh;
        let scores = &mut p[hd * t * t..(hd + 1) * t * t];
        for t1 in 0..t {
            for t2 in 0..t {
                scores[t1 * t + t2] =
                    scale * dot(&q[t1 * d + off..t1 * d + off + dh], &k[t2 * d + off..t2 * d + off + dh]);
            }
        }
        softmax_rows(scores, t);
        for t1 in 0..t {
            let ctx_row = &mut ctx[t1 * d + off..t1 * d + off + dh];
            for t2 in 0..t {
                let w = scores[t1 * t + t2];
                if w == 0.0 {
                    continue;
                }
                for (c, &vv) in ctx_row.iter_mut().zip(&v[t2 * d + off..t2 * d + off + dh]) {
                    *c += w * vv;
                }
            }
        }
    }

    let mut o = vec![0.0; t * d];
    gemm_nn(&mut o, &ctx, store.value(ix.wo), t, d, d);
    add_bias(&mut o, store.value(ix.bo));
    let attn_drop = rng.as_deref_mut().map(|r| make_mask(r, t * d, p_drop));
    if let Some(m) = &attn_drop {
        apply_mask(&mut o, m);
    }
    let mut x_mid = x_in;
    for (xm, &ov) in x_mid.iter_mut().zip(&o) {
        *xm += ov;
    }

    let (f, ln2) = layer_norm(&x_mid, store.value(ix.ln2_g), store.value(ix.ln2_b), d);
    let mut u = vec![0.0; t * f_dim];
    gemm_nn(&mut u, &f, store.value(ix.w1), t, d, f_dim);
    add_bias(&mut u, store.value(ix.b1));
    let g: Vec<f64> = u.iter().map(|&x| gelu(x)).collect();
    let mut y2 = vec![0.0; t * d];
    gemm_nn(&mut y2, &g, store.value(ix.w2), t, f_dim, d);
    add_bias(&mut y2, store.value(ix.b2));
    let ffn_drop = rng.as_deref_mut().map(|r| make_mask(r, t * d, p_drop));
    if let Some(m) = &ffn_drop {
        apply_mask(&mut y2, m);
    }
    let mut x_out = x_mid;
    for (xo, &yv) in x_out.iter_mut().zip(&y2) {
        *xo += yv;
    }

    (
        x_out,
        BlockCache {
            ln1,
            a,
            q,
            k,
            v,
            p,
            ctx,
            attn_drop,
            ln2,
            f,
            u,
            g,
            ffn_drop,
        },
    )
}

/// Backpropagates `douts` through the encoder; accumulates parameter
/// gradients and returns the gradient on the raw embedding gather.
pub(super) fn backward(
    model: &Model,
    store: &mut ParameterStore,
    layout: &AttnLayout,
    tape: &AttnTape,
    x_embed: &[f64],
    douts: Vec<f64>,
    t: usize,
) -> Vec<f64> {
    let d = model.config.hidden_size;
    let e = model.config.embed_dim;

    // final layer norm
    let final_g = store.value(layout.final_g).to_vec();
    let mut dx = {
        let (_, grads) = store.values_and_grads_mut();
        let (dg_slot, db_slot) = (layout.final_g, layout.final_b);
        let mut dgain = core::mem::take(&mut grads[dg_slot]);
        let mut dbias = core::mem::take(&mut grads[db_slot]);
        let dx = layer_norm_backward(&douts, &tape.final_ln, &final_g, &mut dgain, &mut dbias, d);
        grads[dg_slot] = dgain;
        grads[db_slot] = dbias;
        dx
    };

    for (ix, cache) in layout.layers.iter().zip(&tape.layers).rev() {
        dx = backward_block(model, store, ix, cache, dx, t);
    }

    // positions, dropout, projection
    if let Some(m) = &tape.drop0 {
        apply_mask(&mut dx, m);
    }
    if let (PositionKind::Learned, Some(pos_ix)) = (model.config.positions, layout.pos) {
        let (_, grads) = store.values_and_grads_mut();
        let gp = &mut grads[pos_ix];
        for pos in 0..t {
            for j in 0..d {
                gp[pos * d + j] += dx[pos * d + j];
            }
        }
    }
    let proj_w = store.value(layout.proj_w).to_vec();
    {
        let (_, grads) = store.values_and_grads_mut();
        gemm_tn(&mut grads[layout.proj_w], x_embed, &dx, e, t, d);
        bias_grad(&mut grads[layout.proj_b], &dx);
    }
    let mut dx_embed = vec![0.0; t * e];
    gemm_nt(&mut dx_embed, &dx, &proj_w, t, d, e);
    dx_embed
}

fn backward_block(
    model: &Model,
    store: &mut ParameterStore,
    ix: &AttnLayerIx,
    cache: &BlockCache,
    dx_out: Vec<f64>,
    t: usize,
) -> Vec<f64> {
    let d = model.config.hidden_size;
    let f_dim = model.config.ffn_dim();
    let heads = model.config.attention_heads;
    let dh = d / heads;
    let scale = 1.0 / libm::sqrt(dh as f64);

    // FFN sublayer: x_out = x_mid + drop(y2)
    let mut dy2 = dx_out.clone();
    if let Some(m) = &cache.ffn_drop {
        apply_mask(&mut dy2, m);
    }
    let w2 = store.value(ix.w2).to_vec();
    let w1 = store.value(ix.w1).to_vec();
    let mut dg = vec![0.0; t * f_dim];
    gemm_nt(&mut dg, &dy2, &w2, t, d, f_dim);
    {
        let (_, grads) = store.values_and_grads_mut();
        gemm_tn(&mut grads[ix.w2], &cache.g, &dy2, f_dim, t, d);
        bias_grad(&mut grads[ix.b2], &dy2);
    }
    let mut du = dg;
    for (duv, &uv) in du.iter_mut().zip(&cache.u) {
        *duv *= gelu_grad(uv);
    }
    let mut df = vec![0.0; t * d];
    gemm_nt(&mut df, &du, &w1, t, f_dim, d);
    {
        let (_, grads) = store.values_and_grads_mut();
        gemm_tn(&mut grads[ix.w1], &cache.f, &du, d, t, f_dim);
        bias_grad(&mut grads[ix.b1], &du);
    }

    // LN2: gradient flows into x_mid both directly and through the norm
    let ln2_g = store.value(ix.ln2_g).to_vec();
    let mut dx_mid = dx_out;
    {
        let (_, grads) = store.values_and_grads_mut();
        let mut dgain = core::mem::take(&mut grads[ix.ln2_g]);
        let mut dbias = core::mem::take(&mut grads[ix.ln2_b]);
        let from_ln = layer_norm_backward(&df, &cache.ln2, &ln2_g, &mut dgain, &mut dbias, d);
        grads[ix.ln2_g] = dgain;
        grads[ix.ln2_b] = dbias;
        for (xm, &lv) in dx_mid.iter_mut().zip(&from_ln) {
            *xm += lv;
        }
    }

    // attention sublayer: x_mid = x_in + drop(o)
    let mut do_raw = dx_mid.clone();
    if let Some(m) = &cache.attn_drop {
        apply_mask(&mut do_raw, m);
    }
    let wo = store.value(ix.wo).to_vec();
    let mut dctx = vec![0.0; t * d];
    gemm_nt(&mut dctx, &do_raw, &wo, t, d, d);
    {
        let (_, grads) = store.values_and_grads_mut();
        gemm_tn(&mut grads[ix.wo], &cache.ctx, &do_raw, d, t, d);
        bias_grad(&mut grads[ix.bo], &do_raw);
    }

    let mut dq = vec![0.0; t * d];
    let mut dk = vec![0.0; t * d];
    let mut dv = vec![0.0; t * d];
    let mut dp = vec![0.0; t * t];
    let mut ds = vec![0.0; t * t];
    for hd in 0..heads {
        let off = hd * dh;
        let p_h = &cache.p[hd * t * t..(hd + 1) * t * t];
        for t1 in 0..t {
            let dctx_row = &dctx[t1 * d + off..t1 * d + off + dh];
            for t2 in 0..t {
                dp[t1 * t + t2] = dot(dctx_row, &cache.v[t2 * d + off..t2 * d + off + dh]);
                let w = p_h[t1 * t + t2];
                if w != 0.0 {
                    for (dvv, &dcv) in dv[t2 * d + off..t2 * d + off + dh]
                        .iter_mut()
                        .zip(dctx_row)
                    {
                        *dvv += w * dcv;
                    }
                }
            }
        }
        softmax_backward_rows(p_h, &dp, &mut ds, t);
        for t1 in 0..t {
            for t2 in 0..t {
                let s = scale * ds[t1 * t + t2];
                if s == 0.0 {
                    continue;
                }
                for j in 0..dh {
                    dq[t1 * d + off + j] += s * cache.k[t2 * d + off + j];
                    dk[t2 * d + off + j] += s * cache.q[t1 * d + off + j];
                }
            }
        }
    }

    let wq = store.value(ix.wq).to_vec();
    let wk = store.value(ix.wk).to_vec();
    let wv = store.value(ix.wv).to_vec();
    let mut da = vec![0.0; t * d];
    gemm_nt(&mut da, &dq, &wq, t, d, d);
    gemm_nt(&mut da, &dk, &wk, t, d, d);
    gemm_nt(&mut da, &dv, &wv, t, d, d);
    {
        let (_, grads) = store.values_and_grads_mut();
        gemm_tn(&mut grads[ix.wq], &cache.a, &dq, d, t, d);
        bias_grad(&mut grads[ix.bq], &dq);
        gemm_tn(&mut grads[ix.wk], &cache.a, &dk, d, t, d);
        bias_grad(&mut grads[ix.bk], &dk);
        gemm_tn(&mut grads[ix.wv], &cache.a, &dv, d, t, d);
        bias_grad(&mut grads[ix.bv], &dv);
    }

    // LN1: into x_in directly and through the norm
    let ln1_g = store.value(ix.ln1_g).to_vec();
    let mut dx_in = dx_mid;
    {
        let (_, grads) = store.values_and_grads_mut();
        let mut dgain = core::mem::take(&mut grads[ix.ln1_g]);
        let mut dbias = core::mem::take(&mut grads[ix.ln1_b]);
        let from_ln = layer_norm_backward(&da, &cache.ln1, &ln1_g, &mut dgain, &mut dbias, d);
        grads[ix.ln1_g] = dgain;
        grads[ix.ln1_b] = dbias;
        for (xi, &lv) in dx_in.iter_mut().zip(&from_ln) {
            *xi += lv;
        }
    }
    dx_in
}
