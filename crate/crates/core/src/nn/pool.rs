//! Max pooling with recorded switch positions, plus the matching unpooling.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

/// Max pooling over non-overlapping windows along the time axis.
///
/// The output length is `floor(t / factor)`; a trailing partial group is
/// dropped. Ties resolve to the earliest position so pooling is deterministic.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct MaxPool1d {
    pub factor: usize,
}

impl MaxPool1d {
    pub fn new(factor: usize) -> Self {
        assert!(factor >= 2);
        MaxPool1d { factor }
    }

    pub fn out_len(&self, t: usize) -> usize {
        t / self.factor
    }

    /// Returns the pooled map and, per output cell, the source time index.
    pub fn forward(&self, x: &Array2<f32>) -> (Array2<f32>, Array2<usize>) {
        let (c, t) = x.dim();
        let t_out = self.out_len(t);
        let mut y = Array2::zeros((c, t_out));
        let mut idx = Array2::zeros((c, t_out));
        for ch in 0..c {
            for j in 0..t_out {
                let start = j * self.factor;
                let mut best = x[[ch, start]];
                let mut best_i = start;
                for u in 1..self.factor {
                    let v = x[[ch, start + u]];
                    if v > best {
                        best = v;
                        best_i = start + u;
                    }
                }
                y[[ch, j]] = best;
                idx[[ch, j]] = best_i;
            }
        }
        (y, idx)
    }

    /// Routes the pooled gradient back to the argmax positions.
    pub fn backward(&self, idx: &Array2<usize>, dy: &Array2<f32>, t_in: usize) -> Array2<f32> {
        let (c, t_out) = dy.dim();
        let mut dx = Array2::zeros((c, t_in));
        for ch in 0..c {
            for j in 0..t_out {
                dx[[ch, idx[[ch, j]]]] += dy[[ch, j]];
            }
        }
        dx
    }

    /// Max unpooling: places each value at its recorded switch position and
    /// fills the rest with zeros.
    pub fn unpool(&self, y: &Array2<f32>, idx: &Array2<usize>, t_out: usize) -> Array2<f32> {
        let (c, t_in) = y.dim();
        let mut x = Array2::zeros((c, t_out));
        for ch in 0..c {
            for j in 0..t_in {
                x[[ch, idx[[ch, j]]]] = y[[ch, j]];
            }
        }
        x
    }

    /// Gradient of [`Self::unpool`]: gathers from the switch positions.
    pub fn unpool_backward(&self, idx: &Array2<usize>, dx: &Array2<f32>) -> Array2<f32> {
        let (c, t_in) = idx.dim();
        let mut dy = Array2::zeros((c, t_in));
        for ch in 0..c {
            for j in 0..t_in {
                dy[[ch, j]] = dx[[ch, idx[[ch, j]]]];
            }
        }
        dy
    }
}
