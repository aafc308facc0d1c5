//! Network layers with explicit forward and backward passes.
//!
//! Everything runs in f64 with fixed iteration order, so training is
//! bit-reproducible and analytic gradients can be checked against central
//! finite differences to tight tolerances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

/// Channel-major 3-D tensor [c][h][w].
#[derive(Debug, Clone)]
pub struct Tensor3 {
    pub c: usize,
    pub h: usize,
    pub w: usize,
    pub data: Vec<f64>,
}

impl Tensor3 {
    pub fn zeros(c: usize, h: usize, w: usize) -> Self {
        Self {
            c,
            h,
            w,
            data: vec![0.0; c * h * w],
        }
    }

    #[inline]
    pub fn idx(&self, c: usize, y: usize, x: usize) -> usize {
        (c * self.h + y) * self.w + x
    }
}

/// Channel-major 2-D tensor [c][l] for sequence features.
#[derive(Debug, Clone)]
pub struct Tensor2 {
    pub c: usize,
    pub l: usize,
    pub data: Vec<f64>,
}

impl Tensor2 {
    pub fn zeros(c: usize, l: usize) -> Self {
        Self {
            c,
            l,
            data: vec![0.0; c * l],
        }
    }

    #[inline]
    pub fn idx(&self, c: usize, t: usize) -> usize {
        c * self.l + t
    }
}

/// Activation applied after convolutions. `Linear` exists so tests can
/// probe homogeneity of the otherwise-affine layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Linear,
}

impl Activation {
    pub fn apply(&self, v: f64) -> f64 {
        match self {
            Activation::Relu => v.max(0.0),
            Activation::Linear => v,
        }
    }

    pub fn derivative(&self, pre: f64) -> f64 {
        match self {
            Activation::Relu => {
                if pre > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Linear => 1.0,
        }
    }
}

fn init_uniform(rng: &mut ChaCha12Rng, n: usize, fan_in: usize) -> Vec<f64> {
    let bound = 1.0 / (fan_in as f64).sqrt();
    (0..n).map(|_| rng.gen_range(-bound..bound)).collect()
}

/// 2-D convolution, stride 1, zero padding, square kernel.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Conv2d {
    pub in_c: usize,
    pub out_c: usize,
    pub kernel: usize,
    pub pad: usize,
    /// [out_c][in_c][k][k], row-major.
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Conv2d {
    pub fn new(in_c: usize, out_c: usize, kernel: usize, pad: usize, rng: &mut ChaCha12Rng) -> Self {
        let fan_in = in_c * kernel * kernel;
        Self {
            in_c,
            out_c,
            kernel,
            pad,
            weights: init_uniform(rng, out_c * fan_in, fan_in),
            bias: vec![0.0; out_c],
        }
    }

    #[inline]
    fn w_idx(&self, oc: usize, ic: usize, ky: usize, kx: usize) -> usize {
        ((oc * self.in_c + ic) * self.kernel + ky) * self.kernel + kx
    }

    pub fn forward(&self, x: &Tensor3) -> Tensor3 {
        debug_assert_eq!(x.c, self.in_c);
        let mut out = Tensor3::zeros(self.out_c, x.h, x.w);
        let k = self.kernel;
        let pad = self.pad as isize;
        for oc in 0..self.out_c {
            for y in 0..x.h {
                for xx in 0..x.w {
                    let mut acc = self.bias[oc];
                    for ic in 0..self.in_c {
                        for ky in 0..k {
                            let iy = y as isize + ky as isize - pad;
                            if iy < 0 || iy >= x.h as isize {
                                continue;
                            }
                            for kx in 0..k {
                                let ix = xx as isize + kx as isize - pad;
                                if ix < 0 || ix >= x.w as isize {
                                    continue;
                                }
                                acc += self.weights[self.w_idx(oc, ic, ky, kx)]
                                    * x.data[x.idx(ic, iy as usize, ix as usize)];
                            }
                        }
                    }
                    out.data[out.idx(oc, y, xx)] = acc;
                }
            }
        }
        out
    }

    /// Backward pass; accumulates into `grad_w`/`grad_b` and returns the
    /// input gradient.
    pub fn backward(
        &self,
        x: &Tensor3,
        grad_out: &Tensor3,
        grad_w: &mut [f64],
        grad_b: &mut [f64],
    ) -> Tensor3 {
        let mut grad_in = Tensor3::zeros(x.c, x.h, x.w);
        let k = self.kernel;
        let pad = self.pad as isize;
        for oc in 0..self.out_c {
            for y in 0..x.h {
                for xx in 0..x.w {
                    let g = grad_out.data[grad_out.idx(oc, y, xx)];
                    if g == 0.0 {
                        continue;
                    }
                    grad_b[oc] += g;
                    for ic in 0..self.in_c {
                        for ky in 0..k {
                            let iy = y as isize + ky as isize - pad;
                            if iy < 0 || iy >= x.h as isize {
                                continue;
                            }
                            for kx in 0..k {
                                let ix = xx as isize + kx as isize - pad;
                                if ix < 0 || ix >= x.w as isize {
                                    continue;
                                }
                                let xi = x.idx(ic, iy as usize, ix as usize);
                                let wi = self.w_idx(oc, ic, ky, kx);
                                grad_w[wi] += g * x.data[xi];
                                grad_in.data[xi] += g * self.weights[wi];
                            }
                        }
                    }
                }
            }
        }
        grad_in
    }

    pub fn num_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// 2x2 max pooling with stride 2.
pub fn maxpool2_forward(x: &Tensor3) -> (Tensor3, Vec<usize>) {
    let oh = x.h / 2;
    let ow = x.w / 2;
    let mut out = Tensor3::zeros(x.c, oh, ow);
    let mut argmax = vec![0usize; x.c * oh * ow];
    for c in 0..x.c {
        for y in 0..oh {
            for xx in 0..ow {
                let mut best = f64::MIN;
                let mut best_idx = 0;
                for dy in 0..2 {
                    for dx in 0..2 {
                        let idx = x.idx(c, 2 * y + dy, 2 * xx + dx);
                        if x.data[idx] > best {
                            best = x.data[idx];
                            best_idx = idx;
                        }
                    }
                }
                let o = out.idx(c, y, xx);
                out.data[o] = best;
                argmax[o] = best_idx;
            }
        }
    }
    (out, argmax)
}

pub fn maxpool2_backward(x: &Tensor3, grad_out: &Tensor3, argmax: &[usize]) -> Tensor3 {
    let mut grad_in = Tensor3::zeros(x.c, x.h, x.w);
    for (o, &src) in argmax.iter().enumerate() {
        grad_in.data[src] += grad_out.data[o];
    }
    grad_in
}

/// 1-D convolution with stride and zero padding.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Conv1d {
    pub in_c: usize,
    pub out_c: usize,
    pub kernel: usize,
    pub stride: usize,
    pub pad: usize,
    /// [out_c][in_c][k].
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Conv1d {
    pub fn new(
        in_c: usize,
        out_c: usize,
        kernel: usize,
        stride: usize,
        pad: usize,
        rng: &mut ChaCha12Rng,
    ) -> Self {
        let fan_in = in_c * kernel;
        Self {
            in_c,
            out_c,
            kernel,
            stride,
            pad,
            weights: init_uniform(rng, out_c * fan_in, fan_in),
            bias: vec![0.0; out_c],
        }
    }

    pub fn out_len(&self, l: usize) -> usize {
        (l + 2 * self.pad - self.kernel) / self.stride + 1
    }

    #[inline]
    fn w_idx(&self, oc: usize, ic: usize, k: usize) -> usize {
        (oc * self.in_c + ic) * self.kernel + k
    }

    pub fn forward(&self, x: &Tensor2) -> Tensor2 {
        debug_assert_eq!(x.c, self.in_c);
        let ol = self.out_len(x.l);
        let mut out = Tensor2::zeros(self.out_c, ol);
        let pad = self.pad as isize;
        for oc in 0..self.out_c {
            for t in 0..ol {
                let mut acc = self.bias[oc];
                for ic in 0..self.in_c {
                    for k in 0..self.kernel {
                        let it = (t * self.stride) as isize + k as isize - pad;
                        if it < 0 || it >= x.l as isize {
                            continue;
                        }
                        acc += self.weights[self.w_idx(oc, ic, k)]
                            * x.data[x.idx(ic, it as usize)];
                    }
                }
                out.data[out.idx(oc, t)] = acc;
            }
        }
        out
    }

    pub fn backward(
        &self,
        x: &Tensor2,
        grad_out: &Tensor2,
        grad_w: &mut [f64],
        grad_b: &mut [f64],
    ) -> Tensor2 {
        let mut grad_in = Tensor2::zeros(x.c, x.l);
        let pad = self.pad as isize;
        for oc in 0..self.out_c {
            for t in 0..grad_out.l {
                let g = grad_out.data[grad_out.idx(oc, t)];
                if g == 0.0 {
                    continue;
                }
                grad_b[oc] += g;
                for ic in 0..self.in_c {
                    for k in 0..self.kernel {
                        let it = (t * self.stride) as isize + k as isize - pad;
                        if it < 0 || it >= x.l as isize {
                            continue;
                        }
                        let xi = x.idx(ic, it as usize);
                        let wi = self.w_idx(oc, ic, k);
                        grad_w[wi] += g * x.data[xi];
                        grad_in.data[xi] += g * self.weights[wi];
                    }
                }
            }
        }
        grad_in
    }

    pub fn num_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// Fully connected layer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dense {
    pub in_dim: usize,
    pub out_dim: usize,
    /// [out][in].
    pub weights: Vec<f64>,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn new(in_dim: usize, out_dim: usize, rng: &mut ChaCha12Rng) -> Self {
        Self {
            in_dim,
            out_dim,
            weights: init_uniform(rng, in_dim * out_dim, in_dim),
            bias: vec![0.0; out_dim],
        }
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.in_dim);
        (0..self.out_dim)
            .map(|o| {
                let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
                self.bias[o] + row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>()
            })
            .collect()
    }

    pub fn backward(
        &self,
        x: &[f64],
        grad_out: &[f64],
        grad_w: &mut [f64],
        grad_b: &mut [f64],
    ) -> Vec<f64> {
        let mut grad_in = vec![0.0; self.in_dim];
        for o in 0..self.out_dim {
            let g = grad_out[o];
            grad_b[o] += g;
            let row = &self.weights[o * self.in_dim..(o + 1) * self.in_dim];
            let grow = &mut grad_w[o * self.in_dim..(o + 1) * self.in_dim];
            for i in 0..self.in_dim {
                grow[i] += g * x[i];
                grad_in[i] += g * row[i];
            }
        }
        grad_in
    }

    pub fn num_params(&self) -> usize {
        self.weights.len() + self.bias.len()
    }
}

/// Global average pooling over spatial dims.
pub fn gap2_forward(x: &Tensor3) -> Vec<f64> {
    let area = (x.h * x.w) as f64;
    (0..x.c)
        .map(|c| {
            x.data[c * x.h * x.w..(c + 1) * x.h * x.w]
                .iter()
                .sum::<f64>()
                / area
        })
        .collect()
}

pub fn gap2_backward(x: &Tensor3, grad_out: &[f64]) -> Tensor3 {
    let mut grad_in = Tensor3::zeros(x.c, x.h, x.w);
    let area = (x.h * x.w) as f64;
    for c in 0..x.c {
        let g = grad_out[c] / area;
        for v in &mut grad_in.data[c * x.h * x.w..(c + 1) * x.h * x.w] {
            *v = g;
        }
    }
    grad_in
}

pub fn gap1_forward(x: &Tensor2) -> Vec<f64> {
    (0..x.c)
        .map(|c| x.data[c * x.l..(c + 1) * x.l].iter().sum::<f64>() / x.l as f64)
        .collect()
}

pub fn gap1_backward(x: &Tensor2, grad_out: &[f64]) -> Tensor2 {
    let mut grad_in = Tensor2::zeros(x.c, x.l);
    for c in 0..x.c {
        let g = grad_out[c] / x.l as f64;
        for v in &mut grad_in.data[c * x.l..(c + 1) * x.l] {
            *v = g;
        }
    }
    grad_in
}
