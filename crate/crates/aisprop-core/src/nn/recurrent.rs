//! Bidirectional LSTM encoder: standard four-gate cell per direction, with
//! per-position forward/backward hidden states concatenated into the layer
//! output. Layers stack; dropout sits between layers and after the last.

use alloc::vec;
use alloc::vec::Vec;

use super::math::{dot, gemm_nn, gemm_nt, gemm_tn, sigmoid, tanh};
use super::{make_mask, apply_mask, LstmIx, Model, ParameterStore};
use crate::rng::DetRng;

/// Per-direction cache, all arrays in processing-step order.
#[derive(Debug)]
pub(super) struct LstmCache {
    /// t × 4h post-activation gates (i, f, g, o).
    gates: Vec<f64>,
    /// t × h cell states.
    c: Vec<f64>,
    /// t × h tanh(c).
    tanh_c: Vec<f64>,
    /// t × h hidden states.
    h: Vec<f64>,
}

#[derive(Debug)]
pub(super) struct RecTape {
    /// Input to each layer (post-dropout), layer 0 is the embedded sequence.
    layer_inputs: Vec<Vec<f64>>,
    caches: Vec<[LstmCache; 2]>,
    /// Dropout mask applied to each layer's output.
    layer_drop: Vec<Option<Vec<f64>>>,
}

/// Position of processing step `s` in the sequence for direction `dir`.
fn step_pos(s: usize, t: usize, dir: usize) -> usize {
    if dir == 0 {
        s
    } else {
        t - 1 - s
    }
}

pub(super) fn forward(
    model: &Model,
    store: &ParameterStore,
    layers: &[[LstmIx; 2]],
    x0: Vec<f64>,
    t: usize,
    mut rng: Option<&mut DetRng>,
) -> (Vec<f64>, RecTape) {
    let h = model.config.hidden_size;
    let p = model.config.dropout;
    let mut tape = RecTape {
        layer_inputs: Vec::with_capacity(layers.len()),
        caches: Vec::with_capacity(layers.len()),
        layer_drop: Vec::with_capacity(layers.len()),
    };
    let mut input = x0;
    for (l, dirs) in layers.iter().enumerate() {
        let din = if l == 0 { model.config.embed_dim } else { 2 * h };
        let mut outs = vec![0.0; t * 2 * h];
        let caches = [
            run_dir(store, &dirs[0], &input, &mut outs, t, din, h, 0),
            run_dir(store, &dirs[1], &input, &mut outs, t, din, h, 1),
        ];
        let mask = rng.as_deref_mut().map(|r| make_mask(r, t * 2 * h, p));
        if let Some(m) = &mask {
            apply_mask(&mut outs, m);
        }
        tape.layer_inputs.push(input);
        tape.caches.push(caches);
        tape.layer_drop.push(mask);
        input = outs;
    }
    (input, tape)
}

#[allow(clippy::too_many_arguments)]
fn run_dir(
    store: &ParameterStore,
    ix: &LstmIx,
    input: &[f64],
    outs: &mut [f64],
    t: usize,
    din: usize,
    h: usize,
    dir: usize,
) -> LstmCache {
    let wx = store.value(ix.wx);
    let wh = store.value(ix.wh);
    let bias = store.value(ix.b);

    // pre-activations from the input for all positions at once: input · Wxᵀ
    let mut zx = vec![0.0; t * 4 * h];
    gemm_nt(&mut zx, input, wx, t, din, 4 * h);

    let mut gates = vec![0.0; t * 4 * h];
    let mut c = vec![0.0; t * h];
    let mut tanh_c = vec![0.0; t * h];
    let mut hs = vec![0.0; t * h];
    let mut z = vec![0.0; 4 * h];
    for s in 0..t {
        let pos = step_pos(s, t, dir);
        z.copy_from_slice(&zx[pos * 4 * h..(pos + 1) * 4 * h]);
        for (zv, &b) in z.iter_mut().zip(bias) {
            *zv += b;
        }
        if s > 0 {
            let h_prev = &hs[(s - 1) * h..s * h];
            for (r, zv) in z.iter_mut().enumerate() {
                *zv += dot(&wh[r * h..(r + 1) * h], h_prev);
            }
        }
        let g_row = &mut gates[s * 4 * h..(s + 1) * 4 * h];
        for j in 0..h {
            g_row[j] = sigmoid(z[j]);
            g_row[h + j] = sigmoid(z[h + j]);
            g_row[2 * h + j] = tanh(z[2 * h + j]);
            g_row[3 * h + j] = sigmoid(z[3 * h + j]);
        }
        for j in 0..h {
            let c_prev = if s > 0 { c[(s - 1) * h + j] } else { 0.0 };
            let cv = g_row[h + j] * c_prev + g_row[j] * g_row[2 * h + j];
            c[s * h + j] = cv;
            let tc = tanh(cv);
            tanh_c[s * h + j] = tc;
            let hv = g_row[3 * h + j] * tc;
            hs[s * h + j] = hv;
            outs[pos * 2 * h + dir * h + j] = hv;
        }
    }
    LstmCache {
        gates,
        c,
        tanh_c,
        h: hs,
    }
}

/// Propagates `douts` (gradient on the last layer's output) back through the
/// stack, accumulating parameter gradients; returns the gradient on the
/// embedded input.
pub(super) fn backward(
    model: &Model,
    store: &mut ParameterStore,
    layers: &[[LstmIx; 2]],
    tape: &RecTape,
    mut douts: Vec<f64>,
    t: usize,
) -> Vec<f64> {
    let h = model.config.hidden_size;
    for l in (0..layers.len()).rev() {
        let din = if l == 0 { model.config.embed_dim } else { 2 * h };
        if let Some(m) = &tape.layer_drop[l] {
            apply_mask(&mut douts, m);
        }
        let mut dinput = vec![0.0; t * din];
        for dir in 0..2 {
            backward_dir(
                store,
                &layers[l][dir],
                &tape.caches[l][dir],
                &tape.layer_inputs[l],
                &douts,
                &mut dinput,
                t,
                din,
                h,
                dir,
            );
        }
        douts = dinput;
    }
    douts
}

#[allow(clippy::too_many_arguments)]
fn backward_dir(
    store: &mut ParameterStore,
    ix: &LstmIx,
    cache: &LstmCache,
    input: &[f64],
    douts: &[f64],
    dinput: &mut [f64],
    t: usize,
    din: usize,
    h: usize,
    dir: usize,
) {
    let wh_val = store.value(ix.wh).to_vec();
    // dz per position (not step), for the input-side gemms afterwards
    let mut dz_pos = vec![0.0; t * 4 * h];

    {
        let (_, grads) = store.values_and_grads_mut();
        // split disjoint gradient slots out of the store one at a time
        let mut dh_rec = vec![0.0; h];
        let mut dc_rec = vec![0.0; h];
        let mut dz = vec![0.0; 4 * h];
        for s in (0..t).rev() {
            let pos = step_pos(s, t, dir);
            let g_row = &cache.gates[s * 4 * h..(s + 1) * 4 * h];
            for j in 0..h {
                let dh = douts[pos * 2 * h + dir * h + j] + dh_rec[j];
                let o = g_row[3 * h + j];
                let tc = cache.tanh_c[s * h + j];
                let d_o = dh * tc;
                let dc = dc_rec[j] + dh * o * (1.0 - tc * tc);
                let i = g_row[j];
                let f = g_row[h + j];
                let g = g_row[2 * h + j];
                let c_prev = if s > 0 { cache.c[(s - 1) * h + j] } else { 0.0 };
                let di = dc * g;
                let dg = dc * i;
                let df = dc * c_prev;
                dc_rec[j] = dc * f;
                dz[j] = di * i * (1.0 - i);
                dz[h + j] = df * f * (1.0 - f);
                dz[2 * h + j] = dg * (1.0 - g * g);
                dz[3 * h + j] = d_o * o * (1.0 - o);
            }
            dz_pos[pos * 4 * h..(pos + 1) * 4 * h].copy_from_slice(&dz);

            for (gb, &dzv) in grads[ix.b].iter_mut().zip(&dz) {
                *gb += dzv;
            }
            if s > 0 {
                let h_prev = &cache.h[(s - 1) * h..s * h];
                let gwh = &mut grads[ix.wh];
                for (r, &dzv) in dz.iter().enumerate() {
                    if dzv != 0.0 {
                        for (gw, &hp) in gwh[r * h..(r + 1) * h].iter_mut().zip(h_prev) {
                            *gw += dzv * hp;
                        }
                    }
                }
                // recurrent gradient: Whᵀ · dz
                for j in 0..h {
                    let mut acc = 0.0;
                    for (r, &dzv) in dz.iter().enumerate() {
                        acc += wh_val[r * h + j] * dzv;
                    }
                    dh_rec[j] = acc;
                }
            }
        }
    }

    // dWx += dzᵀ · input ; dinput += dz · Wx
    let wx_val = store.value(ix.wx).to_vec();
    {
        let (_, grads) = store.values_and_grads_mut();
        gemm_tn(&mut grads[ix.wx], &dz_pos, input, 4 * h, t, din);
    }
    gemm_nn(dinput, &dz_pos, &wx_val, t, 4 * h, din);
}
