//! Named parameter arrays with matching gradient and Adam moment slots, plus
//! the checkpoint byte format (shape header + little-endian f64 payloads).

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::NnError;
use crate::rng::DetRng;

const ADAM_BETA1: f64 = 0.9;
const ADAM_BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

const CKPT_MAGIC: &[u8; 8] = b"AISCKPT1";

#[derive(Debug, Clone, PartialEq)]
struct Shape {
    rows: usize,
    cols: usize,
}

/// Insertion-ordered store of named parameter matrices. Every mutation of
/// values bumps `version`, which forward tapes capture so a stale backward
/// pass is detected instead of silently producing wrong gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterStore {
    names: Vec<String>,
    shapes: Vec<Shape>,
    values: Vec<Vec<f64>>,
    grads: Vec<Vec<f64>>,
    moment1: Vec<Vec<f64>>,
    moment2: Vec<Vec<f64>>,
    index: BTreeMap<String, usize>,
    adam_steps: u64,
    version: u64,
}

impl Default for ParameterStore {
    fn default() -> Self {
        Self::new()
    }
}

impl ParameterStore {
    pub fn new() -> Self {
        ParameterStore {
            names: Vec::new(),
            shapes: Vec::new(),
            values: Vec::new(),
            grads: Vec::new(),
            moment1: Vec::new(),
            moment2: Vec::new(),
            index: BTreeMap::new(),
            adam_steps: 0,
            version: 0,
        }
    }

    /// Registers a parameter and returns its index. Names must be unique.
    pub fn add(&mut self, name: &str, rows: usize, cols: usize, values: Vec<f64>) -> usize {
        assert_eq!(values.len(), rows * cols, "shape mismatch for {name}");
        assert!(
            !self.index.contains_key(name),
            "duplicate parameter '{name}'"
        );
        let ix = self.names.len();
        self.index.insert(name.to_string(), ix);
        self.names.push(name.to_string());
        self.shapes.push(Shape { rows, cols });
        let len = values.len();
        self.values.push(values);
        self.grads.push(vec![0.0; len]);
        self.moment1.push(vec![0.0; len]);
        self.moment2.push(vec![0.0; len]);
        ix
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(String::as_str)
    }

    pub fn shape(&self, name: &str) -> Option<(usize, usize)> {
        let ix = *self.index.get(name)?;
        Some((self.shapes[ix].rows, self.shapes[ix].cols))
    }

    pub fn index_of(&self, name: &str) -> usize {
        *self
            .index
            .get(name)
            .unwrap_or_else(|| panic!("unknown parameter '{name}'"))
    }

    pub fn value(&self, ix: usize) -> &[f64] {
        &self.values[ix]
    }

    pub fn value_by_name(&self, name: &str) -> &[f64] {
        self.value(self.index_of(name))
    }

    /// Mutable access to values; invalidates outstanding tapes.
    pub fn value_mut_by_name(&mut self, name: &str) -> &mut [f64] {
        let ix = self.index_of(name);
        self.version += 1;
        &mut self.values[ix]
    }

    pub fn grad(&self, ix: usize) -> &[f64] {
        &self.grads[ix]
    }

    pub fn grad_by_name(&self, name: &str) -> &[f64] {
        self.grad(self.index_of(name))
    }

    /// Split borrow for backward passes: read-only values alongside mutable
    /// gradients.
    pub fn values_and_grads_mut(&mut self) -> (&[Vec<f64>], &mut [Vec<f64>]) {
        (&self.values, &mut self.grads)
    }

    pub fn zero_grads(&mut self) {
        for g in &mut self.grads {
            g.iter_mut().for_each(|v| *v = 0.0);
        }
    }

    /// Number of scalar parameters.
    pub fn scalar_count(&self) -> usize {
        self.values.iter().map(Vec::len).sum()
    }

    /// One Adam update over all parameters: β = (0.9, 0.999), ε = 1e-8, with
    /// bias correction. Rejects non-finite gradients before touching state.
    pub fn adam_step(&mut self, learning_rate: f64) -> Result<(), NnError> {
        for (ix, g) in self.grads.iter().enumerate() {
            if g.iter().any(|v| !v.is_finite()) {
                return Err(NnError::NonFiniteGradient {
                    param: self.names[ix].clone(),
                });
            }
        }
        self.adam_steps += 1;
        let t = self.adam_steps as i32;
        let bc1 = 1.0 - libm::pow(ADAM_BETA1, f64::from(t));
        let bc2 = 1.0 - libm::pow(ADAM_BETA2, f64::from(t));
        for ix in 0..self.values.len() {
            let g = &self.grads[ix];
            let m = &mut self.moment1[ix];
            let v = &mut self.moment2[ix];
            let w = &mut self.values[ix];
            for j in 0..g.len() {
                m[j] = ADAM_BETA1 * m[j] + (1.0 - ADAM_BETA1) * g[j];
                v[j] = ADAM_BETA2 * v[j] + (1.0 - ADAM_BETA2) * g[j] * g[j];
                let m_hat = m[j] / bc1;
                let v_hat = v[j] / bc2;
                w[j] -= learning_rate * m_hat / (libm::sqrt(v_hat) + ADAM_EPS);
            }
        }
        self.version += 1;
        Ok(())
    }

    /// Checkpoint bytes: magic, count, then per array a name, shape, and the
    /// values as little-endian f64.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(CKPT_MAGIC);
        out.extend_from_slice(&(self.names.len() as u32).to_le_bytes());
        for ix in 0..self.names.len() {
            let name = self.names[ix].as_bytes();
            out.extend_from_slice(&(name.len() as u16).to_le_bytes());
            out.extend_from_slice(name);
            out.extend_from_slice(&(self.shapes[ix].rows as u32).to_le_bytes());
            out.extend_from_slice(&(self.shapes[ix].cols as u32).to_le_bytes());
            for &v in &self.values[ix] {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, NnError> {
        let bad = |msg: &str| NnError::Checkpoint {
            msg: msg.to_string(),
        };
        let mut pos = 0usize;
        let take = |pos: &mut usize, n: usize| -> Result<&[u8], NnError> {
            if *pos + n > bytes.len() {
                return Err(bad("truncated checkpoint"));
            }
            let s = &bytes[*pos..*pos + n];
            *pos += n;
            Ok(s)
        };
        if take(&mut pos, 8)? != CKPT_MAGIC {
            return Err(bad("bad checkpoint magic"));
        }
        let count = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
        let mut store = ParameterStore::new();
        for _ in 0..count {
            let name_len = u16::from_le_bytes(take(&mut pos, 2)?.try_into().unwrap()) as usize;
            let name = core::str::from_utf8(take(&mut pos, name_len)?)
                .map_err(|_| bad("non-utf8 parameter name"))?
                .to_string();
            let rows = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
            let cols = u32::from_le_bytes(take(&mut pos, 4)?.try_into().unwrap()) as usize;
            let len = rows
                .checked_mul(cols)
                .ok_or_else(|| bad("shape overflow"))?;
            let mut values = Vec::with_capacity(len);
            for _ in 0..len {
                values.push(f64::from_le_bytes(take(&mut pos, 8)?.try_into().unwrap()));
            }
            store.add(&name, rows, cols, values);
        }
        if pos != bytes.len() {
            return Err(bad("trailing bytes after checkpoint payload"));
        }
        Ok(store)
    }
}

/// Uniform(-0.1, 0.1) initialization for embeddings and learned positions.
pub fn init_embedding(rng: &mut DetRng, rows: usize, cols: usize) -> Vec<f64> {
    (0..rows * cols).map(|_| rng.uniform_in(-0.1, 0.1)).collect()
}

/// Xavier-uniform initialization for projections.
pub fn init_xavier(rng: &mut DetRng, fan_in: usize, fan_out: usize, len: usize) -> Vec<f64> {
    let bound = libm::sqrt(6.0 / (fan_in + fan_out) as f64);
    (0..len).map(|_| rng.uniform_in(-bound, bound)).collect()
}
