//! Fully-connected layer on vectors.

use ndarray::Array1;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Param;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dense {
    /// Shape `(n_out, n_in)`.
    pub weight: Param,
    /// Shape `(n_out, 1)`.
    pub bias: Param,
}

impl Dense {
    pub fn new(n_in: usize, n_out: usize, rng: &mut impl Rng) -> Self {
        let std = (2.0 / n_in as f32).sqrt();
        Dense { weight: Param::randn(n_out, n_in, std, rng), bias: Param::zeros(n_out, 1) }
    }

    pub fn n_params(&self) -> usize {
        self.weight.len() + self.bias.len()
    }

    pub fn forward(&self, x: &Array1<f32>) -> Array1<f32> {
        self.weight.w.dot(x) + self.bias.w.column(0)
    }

    /// Accumulates gradients and returns the input gradient.
    pub fn backward(&mut self, x: &Array1<f32>, dy: &Array1<f32>) -> Array1<f32> {
        let (n_out, n_in) = self.weight.w.dim();
        for i in 0..n_out {
            let d = dy[i];
            self.bias.g[[i, 0]] += d;
            for j in 0..n_in {
                self.weight.g[[i, j]] += d * x[j];
            }
        }
        self.weight.w.t().dot(dy)
    }
}
