//! Minimal deterministic neural-network kernels.
//!
//! Everything here is plain `ndarray` math on `f32`, single-threaded and
//! allocation-simple, so that training and sampling are bit-reproducible
//! given a seed. The networks in this crate are small (tens of thousands of
//! parameters), which keeps these kernels fast enough on a CPU.

mod conv;
mod dense;
mod pool;

pub use conv::Conv1d;
pub use dense::Dense;
pub use pool::MaxPool1d;

use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// A learnable tensor with its gradient accumulator and Adam moments.
///
/// Optimizer state lives inside the parameter so layers stay self-contained;
/// moments are not serialized (checkpoints hold weights only).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Param {
    pub w: Array2<f32>,
    #[serde(skip)]
    pub g: Array2<f32>,
    #[serde(skip)]
    m: Array2<f32>,
    #[serde(skip)]
    v: Array2<f32>,
}

impl Param {
    pub fn new(w: Array2<f32>) -> Self {
        let shape = w.raw_dim();
        Param { w, g: Array2::zeros(shape), m: Array2::zeros(shape), v: Array2::zeros(shape) }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Param::new(Array2::zeros((rows, cols)))
    }

    /// Gaussian init with the given standard deviation.
    pub fn randn(rows: usize, cols: usize, std: f32, rng: &mut impl Rng) -> Self {
        let w =
            Array2::from_shape_simple_fn((rows, cols), || rng.sample::<f32, _>(StandardNormal) * std);
        Param::new(w)
    }

    pub fn zero_grad(&mut self) {
        self.g.fill(0.0);
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    /// One Adam update using the accumulated gradient. `t` is the 1-based
    /// global step count used for bias correction.
    pub fn adam_step(&mut self, cfg: &AdamCfg, t: usize) {
        // Deserialized checkpoints have empty moment buffers; re-grow lazily.
        if self.m.raw_dim() != self.w.raw_dim() {
            self.m = Array2::zeros(self.w.raw_dim());
            self.v = Array2::zeros(self.w.raw_dim());
        }
        let b1t = 1.0 - cfg.beta1.powi(t as i32);
        let b2t = 1.0 - cfg.beta2.powi(t as i32);
        for ((w, g), (m, v)) in self
            .w
            .iter_mut()
            .zip(self.g.iter())
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
        {
            *m = cfg.beta1 * *m + (1.0 - cfg.beta1) * g;
            *v = cfg.beta2 * *v + (1.0 - cfg.beta2) * g * g;
            let mhat = *m / b1t;
            let vhat = *v / b2t;
            *w -= cfg.lr * mhat / (vhat.sqrt() + cfg.eps);
        }
    }
}

/// Adam hyperparameters.
#[derive(Debug, Clone, Copy)]
pub struct AdamCfg {
    pub lr: f32,
    pub beta1: f32,
    pub beta2: f32,
    pub eps: f32,
}

impl AdamCfg {
    pub fn with_lr(lr: f32) -> Self {
        AdamCfg { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8 }
    }
}

// ---------------------------------------------------------------------------
// Activations
// ---------------------------------------------------------------------------

pub fn relu(x: &Array2<f32>) -> Array2<f32> {
    x.mapv(|v| v.max(0.0))
}

/// Gradient through ReLU given the pre-activation input.
pub fn relu_backward(x: &Array2<f32>, dy: &Array2<f32>) -> Array2<f32> {
    let mut dx = dy.clone();
    dx.zip_mut_with(x, |d, &v| {
        if v <= 0.0 {
            *d = 0.0
        }
    });
    dx
}

fn sigmoid(v: f32) -> f32 {
    1.0 / (1.0 + (-v).exp())
}

pub fn silu(x: &Array2<f32>) -> Array2<f32> {
    x.mapv(|v| v * sigmoid(v))
}

pub fn silu_backward(x: &Array2<f32>, dy: &Array2<f32>) -> Array2<f32> {
    let mut dx = dy.clone();
    dx.zip_mut_with(x, |d, &v| {
        let s = sigmoid(v);
        *d *= s + v * s * (1.0 - s);
    });
    dx
}

pub fn tanh(x: &Array2<f32>) -> Array2<f32> {
    x.mapv(f32::tanh)
}

/// Gradient through tanh given the *output* of the forward pass.
pub fn tanh_backward(y: &Array2<f32>, dy: &Array2<f32>) -> Array2<f32> {
    let mut dx = dy.clone();
    dx.zip_mut_with(y, |d, &t| *d *= 1.0 - t * t);
    dx
}

// ---------------------------------------------------------------------------
// Vector activations (dense paths)
// ---------------------------------------------------------------------------

pub fn relu1(x: &Array1<f32>) -> Array1<f32> {
    x.mapv(|v| v.max(0.0))
}

pub fn relu1_backward(x: &Array1<f32>, dy: &Array1<f32>) -> Array1<f32> {
    let mut dx = dy.clone();
    dx.zip_mut_with(x, |d, &v| {
        if v <= 0.0 {
            *d = 0.0
        }
    });
    dx
}

pub fn silu1(x: &Array1<f32>) -> Array1<f32> {
    x.mapv(|v| v * sigmoid(v))
}

pub fn silu1_backward(x: &Array1<f32>, dy: &Array1<f32>) -> Array1<f32> {
    let mut dx = dy.clone();
    dx.zip_mut_with(x, |d, &v| {
        let s = sigmoid(v);
        *d *= s + v * s * (1.0 - s);
    });
    dx
}

// ---------------------------------------------------------------------------
// Timestep embedding and resampling helpers
// ---------------------------------------------------------------------------

/// Sinusoidal embedding of a (possibly large) integer timestep.
/// `dim` must be even; frequencies follow the usual geometric ladder.
pub fn timestep_embedding(t: f32, dim: usize) -> Array1<f32> {
    assert!(dim % 2 == 0, "embedding dim must be even");
    let half = dim / 2;
    let mut out = Array1::zeros(dim);
    for i in 0..half {
        let freq = (-(i as f32) * (10_000f32).ln() / (half as f32 - 1.0).max(1.0)).exp();
        out[i] = (t * freq).sin();
        out[half + i] = (t * freq).cos();
    }
    out
}

/// Nearest-neighbour upsampling by 2 along the time axis.
pub fn upsample2(x: &Array2<f32>) -> Array2<f32> {
    let (c, t) = x.dim();
    let mut y = Array2::zeros((c, t * 2));
    for ch in 0..c {
        for j in 0..t {
            y[[ch, 2 * j]] = x[[ch, j]];
            y[[ch, 2 * j + 1]] = x[[ch, j]];
        }
    }
    y
}

/// Gradient of [`upsample2`]: sums each output pair back to its source.
pub fn upsample2_backward(dy: &Array2<f32>, t_in: usize) -> Array2<f32> {
    let (c, _) = dy.dim();
    let mut dx = Array2::zeros((c, t_in));
    for ch in 0..c {
        for j in 0..t_in {
            dx[[ch, j]] = dy[[ch, 2 * j]] + dy[[ch, 2 * j + 1]];
        }
    }
    dx
}

/// Stack two channel-major maps along the channel axis.
pub fn concat_channels(a: &Array2<f32>, b: &Array2<f32>) -> Array2<f32> {
    assert_eq!(a.ncols(), b.ncols(), "time axes must match");
    let mut out = Array2::zeros((a.nrows() + b.nrows(), a.ncols()));
    out.slice_mut(ndarray::s![..a.nrows(), ..]).assign(a);
    out.slice_mut(ndarray::s![a.nrows().., ..]).assign(b);
    out
}
