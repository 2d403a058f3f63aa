//! 1-D convolution over channel-major maps, via im2col and a GEMM.

use ndarray::{Array2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::Param;

/// 1-D convolution layer. Input and output are `(channels, time)` maps.
///
/// Padding is "same": for stride 1 the output length equals the input length,
/// for stride `s` it is `ceil(t / s)`. Kernel size must be odd.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Conv1d {
    /// Flattened kernel, shape `(c_out, c_in * k)`.
    pub weight: Param,
    /// Bias, shape `(c_out, 1)`.
    pub bias: Param,
    pub c_in: usize,
    pub c_out: usize,
    pub k: usize,
    pub stride: usize,
}

impl Conv1d {
    pub fn new(c_in: usize, c_out: usize, k: usize, stride: usize, rng: &mut impl Rng) -> Self {
        assert!(k % 2 == 1, "kernel size must be odd");
        assert!(stride >= 1);
        let std = (2.0 / (c_in * k) as f32).sqrt();
        Conv1d {
            weight: Param::randn(c_out, c_in * k, std, rng),
            bias: Param::zeros(c_out, 1),
            c_in,
            c_out,
            k,
            stride,
        }
    }

    pub fn out_len(&self, t: usize) -> usize {
        t.div_ceil(self.stride)
    }

    pub fn n_params(&self) -> usize {
        self.weight.len() + self.bias.len()
    }

    fn im2col(&self, x: &Array2<f32>) -> Array2<f32> {
        let (c_in, t) = x.dim();
        debug_assert_eq!(c_in, self.c_in);
        let t_out = self.out_len(t);
        let pad = self.k / 2;
        let mut cols = Array2::zeros((self.c_in * self.k, t_out));
        for ch in 0..self.c_in {
            for u in 0..self.k {
                let row = ch * self.k + u;
                for j in 0..t_out {
                    let src = (j * self.stride + u) as isize - pad as isize;
                    if src >= 0 && (src as usize) < t {
                        cols[[row, j]] = x[[ch, src as usize]];
                    }
                }
            }
        }
        cols
    }

    pub fn forward(&self, x: &Array2<f32>) -> Array2<f32> {
        let cols = self.im2col(x);
        let mut y = self.weight.w.dot(&cols);
        for (mut row, &b) in y.axis_iter_mut(Axis(0)).zip(self.bias.w.column(0)) {
            row += b;
        }
        y
    }

    /// Accumulates weight/bias gradients and returns the input gradient.
    pub fn backward(&mut self, x: &Array2<f32>, dy: &Array2<f32>) -> Array2<f32> {
        let (_, t) = x.dim();
        let cols = self.im2col(x);
        self.weight.g += &dy.dot(&cols.t());
        self.bias.g += &dy
            .sum_axis(Axis(1))
            .into_shape_with_order((self.c_out, 1))
            .expect("bias grad shape");
        // col2im of W^T · dy
        let dcols = self.weight.w.t().dot(dy);
        let pad = self.k / 2;
        let t_out = self.out_len(t);
        let mut dx = Array2::zeros((self.c_in, t));
        for ch in 0..self.c_in {
            for u in 0..self.k {
                let row = ch * self.k + u;
                for j in 0..t_out {
                    let src = (j * self.stride + u) as isize - pad as isize;
                    if src >= 0 && (src as usize) < t {
                        dx[[ch, src as usize]] += dcols[[row, j]];
                    }
                }
            }
        }
        dx
    }
}
