//! Two-branch classifier: a compact convolutional image encoder for TFI
//! inputs, a 1-D convolutional sequence encoder for stacked correlation
//! features, fusion, and a softmax head.
//!
//! Parameters live in a fixed flat layout so training, checkpointing, and
//! finite-difference gradient checks all see the same ordering.

use std::ops::Range;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::classify::fusion::{
    fuse_fva, fuse_fvc, one_hot, softmax, softmax_xent, Prediction, NUM_CLASSES,
};
use crate::classify::layers::{
    gap1_backward, gap1_forward, gap2_backward, gap2_forward, maxpool2_backward,
    maxpool2_forward, Activation, Conv1d, Conv2d, Dense, Tensor2, Tensor3,
};
use crate::mat::Mat;
use crate::{Error, Result};

/// Default shared feature dimension d of both encoders.
pub const FEATURE_DIM: usize = 64;

/// One training or evaluation sample: whichever features the architecture
/// consumes, plus the class index.
#[derive(Debug, Clone)]
pub struct Sample {
    /// TFI image (rows x cols in [0,1]).
    pub image: Option<Mat>,
    /// Sequence feature (rows = channels, cols = width).
    pub seq: Option<Mat>,
    pub label: usize,
}

/// Image branch: two convolutions with max pooling, global average
/// pooling, and a dense projection to the feature dimension.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImageEncoder {
    pub conv1: Conv2d,
    pub conv2: Conv2d,
    pub dense: Dense,
    pub activation: Activation,
}

pub(crate) struct ImageCache {
    x: Tensor3,
    pre1: Tensor3,
    act1: Tensor3,
    pool1: Tensor3,
    arg1: Vec<usize>,
    pre2: Tensor3,
    act2: Tensor3,
    pool2: Tensor3,
    arg2: Vec<usize>,
    gap: Vec<f64>,
}

impl ImageEncoder {
    pub fn new(feature_dim: usize, rng: &mut ChaCha12Rng) -> Self {
        Self {
            conv1: Conv2d::new(1, 6, 3, 1, rng),
            conv2: Conv2d::new(6, 12, 3, 1, rng),
            dense: Dense::new(12, feature_dim, rng),
            activation: Activation::Relu,
        }
    }

    fn to_tensor(image: &Mat) -> Tensor3 {
        Tensor3 {
            c: 1,
            h: image.rows,
            w: image.cols,
            data: image.data.clone(),
        }
    }

    fn activate(&self, t: &Tensor3) -> Tensor3 {
        let mut out = t.clone();
        for v in &mut out.data {
            *v = self.activation.apply(*v);
        }
        out
    }

    fn forward_cached(&self, image: &Mat) -> Result<(Vec<f64>, ImageCache)> {
        if image.rows < 4 || image.cols < 4 {
            return Err(Error::ShapeMismatch {
                expected: "image at least 4x4".into(),
                got: format!("{}x{}", image.rows, image.cols),
            });
        }
        let x = Self::to_tensor(image);
        let pre1 = self.conv1.forward(&x);
        let act1 = self.activate(&pre1);
        let (pool1, arg1) = maxpool2_forward(&act1);
        let pre2 = self.conv2.forward(&pool1);
        let act2 = self.activate(&pre2);
        let (pool2, arg2) = maxpool2_forward(&act2);
        let gap = gap2_forward(&pool2);
        let feature = self.dense.forward(&gap);
        Ok((
            feature,
            ImageCache {
                x,
                pre1,
                act1,
                pool1,
                arg1,
                pre2,
                act2,
                pool2,
                arg2,
                gap,
            },
        ))
    }

    /// Deterministic forward pass to the feature vector.
    pub fn encode(&self, image: &Mat) -> Result<Vec<f64>> {
        Ok(self.forward_cached(image)?.0)
    }

    #[allow(clippy::too_many_arguments)]
    fn backward(
        &self,
        cache: &ImageCache,
        grad_feature: &[f64],
        g_c1w: &mut [f64],
        g_c1b: &mut [f64],
        g_c2w: &mut [f64],
        g_c2b: &mut [f64],
        g_dw: &mut [f64],
        g_db: &mut [f64],
    ) {
        let grad_gap = self.dense.backward(&cache.gap, grad_feature, g_dw, g_db);
        let grad_pool2 = gap2_backward(&cache.pool2, &grad_gap);
        let mut grad_act2 = maxpool2_backward(&cache.act2, &grad_pool2, &cache.arg2);
        for (g, &pre) in grad_act2.data.iter_mut().zip(&cache.pre2.data) {
            *g *= self.activation.derivative(pre);
        }
        let grad_pool1 = self.conv2.backward(&cache.pool1, &grad_act2, g_c2w, g_c2b);
        let mut grad_act1 = maxpool2_backward(&cache.act1, &grad_pool1, &cache.arg1);
        for (g, &pre) in grad_act1.data.iter_mut().zip(&cache.pre1.data) {
            *g *= self.activation.derivative(pre);
        }
        self.conv1.backward(&cache.x, &grad_act1, g_c1w, g_c1b);
    }
}

/// Sequence branch: a strided 1-D convolution, global average pooling, and
/// a dense projection.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeqEncoder {
    pub conv: Conv1d,
    pub dense: Dense,
    pub activation: Activation,
}

pub(crate) struct SeqCache {
    x: Tensor2,
    pre: Tensor2,
    act: Tensor2,
    gap: Vec<f64>,
}

impl SeqEncoder {
    pub fn new(in_channels: usize, feature_dim: usize, rng: &mut ChaCha12Rng) -> Self {
        Self {
            conv: Conv1d::new(in_channels, 16, 7, 4, 3, rng),
            dense: Dense::new(16, feature_dim, rng),
            activation: Activation::Relu,
        }
    }

    fn to_tensor(seq: &Mat) -> Tensor2 {
        Tensor2 {
            c: seq.rows,
            l: seq.cols,
            data: seq.data.clone(),
        }
    }

    fn forward_cached(&self, seq: &Mat) -> Result<(Vec<f64>, SeqCache)> {
        if seq.rows != self.conv.in_c || seq.cols < self.conv.kernel {
            return Err(Error::ShapeMismatch {
                expected: format!("{} channels, width >= {}", self.conv.in_c, self.conv.kernel),
                got: format!("{}x{}", seq.rows, seq.cols),
            });
        }
        let x = Self::to_tensor(seq);
        let pre = self.conv.forward(&x);
        let mut act = pre.clone();
        for v in &mut act.data {
            *v = self.activation.apply(*v);
        }
        let gap = gap1_forward(&act);
        let feature = self.dense.forward(&gap);
        Ok((feature, SeqCache { x, pre, act, gap }))
    }

    /// Deterministic forward pass to the feature vector.
    pub fn encode(&self, seq: &Mat) -> Result<Vec<f64>> {
        Ok(self.forward_cached(seq)?.0)
    }

    fn backward(
        &self,
        cache: &SeqCache,
        grad_feature: &[f64],
        g_cw: &mut [f64],
        g_cb: &mut [f64],
        g_dw: &mut [f64],
        g_db: &mut [f64],
    ) {
        let grad_gap = self.dense.backward(&cache.gap, grad_feature, g_dw, g_db);
        let mut grad_act = gap1_backward(&cache.act, &grad_gap);
        for (g, &pre) in grad_act.data.iter_mut().zip(&cache.pre.data) {
            *g *= self.activation.derivative(pre);
        }
        self.conv.backward(&cache.x, &grad_act, g_cw, g_cb);
    }
}

/// Network architecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arch {
    ImageOnly,
    SeqOnly,
    /// Feature-vector addition of both branches.
    FusionFva,
    /// Feature-vector concatenation of both branches.
    FusionFvc,
}

/// A trainable classifier: optional branches per the architecture and a
/// dense softmax head.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Network {
    pub arch: Arch,
    pub image: Option<ImageEncoder>,
    pub seq: Option<SeqEncoder>,
    pub head: Dense,
    pub feature_dim: usize,
}

pub(crate) struct NetworkCache {
    image: Option<ImageCache>,
    seq: Option<SeqCache>,
    image_feature: Option<Vec<f64>>,
    seq_feature: Option<Vec<f64>>,
    fused: Vec<f64>,
}

impl Network {
    pub fn image_only(feature_dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let image = ImageEncoder::new(feature_dim, &mut rng);
        let head = Dense::new(feature_dim, NUM_CLASSES, &mut rng);
        Self {
            arch: Arch::ImageOnly,
            image: Some(image),
            seq: None,
            head,
            feature_dim,
        }
    }

    pub fn seq_only(in_channels: usize, feature_dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let seq = SeqEncoder::new(in_channels, feature_dim, &mut rng);
        let head = Dense::new(feature_dim, NUM_CLASSES, &mut rng);
        Self {
            arch: Arch::SeqOnly,
            image: None,
            seq: Some(seq),
            head,
            feature_dim,
        }
    }

    pub fn fusion(arch: Arch, seq_channels: usize, feature_dim: usize, seed: u64) -> Self {
        debug_assert!(matches!(arch, Arch::FusionFva | Arch::FusionFvc));
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let image = ImageEncoder::new(feature_dim, &mut rng);
        let seq = SeqEncoder::new(seq_channels, feature_dim, &mut rng);
        let head_in = match arch {
            Arch::FusionFvc => 2 * feature_dim,
            _ => feature_dim,
        };
        let head = Dense::new(head_in, NUM_CLASSES, &mut rng);
        Self {
            arch,
            image: Some(image),
            seq: Some(seq),
            head,
            feature_dim,
        }
    }

    fn forward_cached(&self, sample: &Sample) -> Result<(Vec<f64>, NetworkCache)> {
        let mut cache = NetworkCache {
            image: None,
            seq: None,
            image_feature: None,
            seq_feature: None,
            fused: Vec::new(),
        };
        if let Some(enc) = &self.image {
            let image = sample.image.as_ref().ok_or_else(|| Error::ShapeMismatch {
                expected: "sample with image feature".into(),
                got: "none".into(),
            })?;
            let (f, c) = enc.forward_cached(image)?;
            cache.image = Some(c);
            cache.image_feature = Some(f);
        }
        if let Some(enc) = &self.seq {
            let seq = sample.seq.as_ref().ok_or_else(|| Error::ShapeMismatch {
                expected: "sample with sequence feature".into(),
                got: "none".into(),
            })?;
            let (f, c) = enc.forward_cached(seq)?;
            cache.seq = Some(c);
            cache.seq_feature = Some(f);
        }
        cache.fused = match self.arch {
            Arch::ImageOnly => cache.image_feature.clone().unwrap(),
            Arch::SeqOnly => cache.seq_feature.clone().unwrap(),
            Arch::FusionFva => fuse_fva(
                cache.image_feature.as_ref().unwrap(),
                cache.seq_feature.as_ref().unwrap(),
            )?,
            Arch::FusionFvc => fuse_fvc(
                cache.image_feature.as_ref().unwrap(),
                cache.seq_feature.as_ref().unwrap(),
            ),
        };
        let logits = self.head.forward(&cache.fused);
        Ok((logits, cache))
    }

    /// Class probabilities for a sample.
    pub fn predict(&self, sample: &Sample) -> Result<Prediction> {
        let (logits, _) = self.forward_cached(sample)?;
        let probabilities = softmax(&logits);
        Ok(Prediction {
            predicted_class: crate::classify::fusion::argmax(&probabilities),
            probabilities,
        })
    }

    /// Cross-entropy loss and the full parameter gradient for one sample.
    pub fn loss_and_grad(&self, sample: &Sample) -> Result<(f64, Vec<f64>)> {
        let (logits, cache) = self.forward_cached(sample)?;
        let label = one_hot(sample.label, NUM_CLASSES);
        let (pred, loss) = softmax_xent(&logits, &label)?;
        let grad_logits: Vec<f64> = pred
            .probabilities
            .iter()
            .zip(&label)
            .map(|(p, y)| p - y)
            .collect();

        let mut grad = vec![0.0; self.num_params()];
        let ranges = self.layer_ranges();
        let mut take = |name: &str| -> Range<usize> {
            ranges
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, r)| r.clone())
                .expect("layer range")
        };

        // Head first; its input gradient feeds the branches.
        let head_w = take("head.w");
        let head_b = take("head.b");
        let mut head_wg = vec![0.0; head_w.len()];
        let mut head_bg = vec![0.0; head_b.len()];
        let grad_fused = self
            .head
            .backward(&cache.fused, &grad_logits, &mut head_wg, &mut head_bg);
        grad[head_w].copy_from_slice(&head_wg);
        grad[head_b].copy_from_slice(&head_bg);

        let (grad_image_feat, grad_seq_feat): (Option<Vec<f64>>, Option<Vec<f64>>) =
            match self.arch {
                Arch::ImageOnly => (Some(grad_fused), None),
                Arch::SeqOnly => (None, Some(grad_fused)),
                Arch::FusionFva => (Some(grad_fused.clone()), Some(grad_fused)),
                Arch::FusionFvc => {
                    let d = self.feature_dim;
                    (
                        Some(grad_fused[..d].to_vec()),
                        Some(grad_fused[d..].to_vec()),
                    )
                }
            };

        if let (Some(enc), Some(c), Some(gf)) = (&self.image, &cache.image, &grad_image_feat) {
            let (c1w, c1b) = (take("image.conv1.w"), take("image.conv1.b"));
            let (c2w, c2b) = (take("image.conv2.w"), take("image.conv2.b"));
            let (dw, db) = (take("image.dense.w"), take("image.dense.b"));
            let mut bufs = vec![
                vec![0.0; c1w.len()],
                vec![0.0; c1b.len()],
                vec![0.0; c2w.len()],
                vec![0.0; c2b.len()],
                vec![0.0; dw.len()],
                vec![0.0; db.len()],
            ];
            let (a, rest) = bufs.split_at_mut(1);
            let (b, rest) = rest.split_at_mut(1);
            let (c2, rest) = rest.split_at_mut(1);
            let (d2, rest) = rest.split_at_mut(1);
            let (e, f) = rest.split_at_mut(1);
            enc.backward(
                c,
                gf,
                &mut a[0],
                &mut b[0],
                &mut c2[0],
                &mut d2[0],
                &mut e[0],
                &mut f[0],
            );
            grad[c1w].copy_from_slice(&a[0]);
            grad[c1b].copy_from_slice(&b[0]);
            grad[c2w].copy_from_slice(&c2[0]);
            grad[c2b].copy_from_slice(&d2[0]);
            grad[dw].copy_from_slice(&e[0]);
            grad[db].copy_from_slice(&f[0]);
        }
        if let (Some(enc), Some(c), Some(gf)) = (&self.seq, &cache.seq, &grad_seq_feat) {
            let (cw, cb) = (take("seq.conv.w"), take("seq.conv.b"));
            let (dw, db) = (take("seq.dense.w"), take("seq.dense.b"));
            let mut cwg = vec![0.0; cw.len()];
            let mut cbg = vec![0.0; cb.len()];
            let mut dwg = vec![0.0; dw.len()];
            let mut dbg = vec![0.0; db.len()];
            enc.backward(c, gf, &mut cwg, &mut cbg, &mut dwg, &mut dbg);
            grad[cw].copy_from_slice(&cwg);
            grad[cb].copy_from_slice(&cbg);
            grad[dw].copy_from_slice(&dwg);
            grad[db].copy_from_slice(&dbg);
        }
        Ok((loss, grad))
    }

    /// Named parameter blocks in flat-layout order.
    pub fn layer_ranges(&self) -> Vec<(String, Range<usize>)> {
        let mut out = Vec::new();
        let mut cursor = 0usize;
        let mut push = |name: &str, len: usize, cursor: &mut usize| {
            out.push((name.to_string(), *cursor..*cursor + len));
            *cursor += len;
        };
        if let Some(enc) = &self.image {
            push("image.conv1.w", enc.conv1.weights.len(), &mut cursor);
            push("image.conv1.b", enc.conv1.bias.len(), &mut cursor);
            push("image.conv2.w", enc.conv2.weights.len(), &mut cursor);
            push("image.conv2.b", enc.conv2.bias.len(), &mut cursor);
            push("image.dense.w", enc.dense.weights.len(), &mut cursor);
            push("image.dense.b", enc.dense.bias.len(), &mut cursor);
        }
        if let Some(enc) = &self.seq {
            push("seq.conv.w", enc.conv.weights.len(), &mut cursor);
            push("seq.conv.b", enc.conv.bias.len(), &mut cursor);
            push("seq.dense.w", enc.dense.weights.len(), &mut cursor);
            push("seq.dense.b", enc.dense.bias.len(), &mut cursor);
        }
        push("head.w", self.head.weights.len(), &mut cursor);
        push("head.b", self.head.bias.len(), &mut cursor);
        out
    }

    pub fn num_params(&self) -> usize {
        self.image.as_ref().map_or(0, |e| {
            e.conv1.num_params() + e.conv2.num_params() + e.dense.num_params()
        }) + self.seq.as_ref().map_or(0, |e| e.conv.num_params() + e.dense.num_params())
            + self.head.num_params()
    }

    /// Copy all parameters into the flat layout.
    pub fn get_params(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        if let Some(enc) = &self.image {
            out.extend_from_slice(&enc.conv1.weights);
            out.extend_from_slice(&enc.conv1.bias);
            out.extend_from_slice(&enc.conv2.weights);
            out.extend_from_slice(&enc.conv2.bias);
            out.extend_from_slice(&enc.dense.weights);
            out.extend_from_slice(&enc.dense.bias);
        }
        if let Some(enc) = &self.seq {
            out.extend_from_slice(&enc.conv.weights);
            out.extend_from_slice(&enc.conv.bias);
            out.extend_from_slice(&enc.dense.weights);
            out.extend_from_slice(&enc.dense.bias);
        }
        out.extend_from_slice(&self.head.weights);
        out.extend_from_slice(&self.head.bias);
        out
    }

    /// Overwrite all parameters from the flat layout.
    pub fn set_params(&mut self, flat: &[f64]) {
        debug_assert_eq!(flat.len(), self.num_params());
        let mut cursor = 0usize;
        let mut pull = |dst: &mut [f64], cursor: &mut usize| {
            dst.copy_from_slice(&flat[*cursor..*cursor + dst.len()]);
            *cursor += dst.len();
        };
        if let Some(enc) = &mut self.image {
            pull(&mut enc.conv1.weights, &mut cursor);
            pull(&mut enc.conv1.bias, &mut cursor);
            pull(&mut enc.conv2.weights, &mut cursor);
            pull(&mut enc.conv2.bias, &mut cursor);
            pull(&mut enc.dense.weights, &mut cursor);
            pull(&mut enc.dense.bias, &mut cursor);
        }
        if let Some(enc) = &mut self.seq {
            pull(&mut enc.conv.weights, &mut cursor);
            pull(&mut enc.conv.bias, &mut cursor);
            pull(&mut enc.dense.weights, &mut cursor);
            pull(&mut enc.dense.bias, &mut cursor);
        }
        pull(&mut self.head.weights, &mut cursor);
        pull(&mut self.head.bias, &mut cursor);
    }

    /// Set every activation to the identity (test instrumentation).
    pub fn set_linear_activations(&mut self) {
        if let Some(enc) = &mut self.image {
            enc.activation = Activation::Linear;
        }
        if let Some(enc) = &mut self.seq {
            enc.activation = Activation::Linear;
        }
    }
}

/// Two independently trained single-branch networks fused at inference by
/// probability-weighted addition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PwaEnsemble {
    pub tfi: Network,
    pub zc: Network,
    pub alpha: f64,
}

impl PwaEnsemble {
    pub fn predict(&self, sample: &Sample) -> Result<Prediction> {
        let p_tfi = self.tfi.predict(sample)?;
        let p_zc = self.zc.predict(sample)?;
        crate::classify::fusion::fuse_pwa(&p_tfi, &p_zc, self.alpha)
    }
}
