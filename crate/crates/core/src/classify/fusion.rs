//! Feature-fusion strategies and the softmax cross-entropy head.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Number of output classes: eight drones plus background.
pub const NUM_CLASSES: usize = 9;

/// Fusion strategy selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FusionMode {
    /// Probability-weighted addition of per-branch predictions.
    Pwa { alpha: f64 },
    /// Element-wise addition of feature vectors.
    Fva,
    /// Concatenation of feature vectors.
    Fvc,
}

/// A class probability distribution and its argmax.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub probabilities: Vec<f64>,
    pub predicted_class: usize,
}

impl Prediction {
    pub fn from_probabilities(probabilities: Vec<f64>) -> Result<Self> {
        let sum: f64 = probabilities.iter().sum();
        if probabilities.iter().any(|&p| !(p >= 0.0)) || (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidRequest(format!(
                "not a probability distribution (sum {sum})"
            )));
        }
        let predicted_class = argmax(&probabilities);
        Ok(Self {
            probabilities,
            predicted_class,
        })
    }
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Probability-weighted addition: `alpha * P_tfi + (1 - alpha) * P_zc`.
pub fn fuse_pwa(p_tfi: &Prediction, p_zc: &Prediction, alpha: f64) -> Result<Prediction> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::AlphaOutOfRange { alpha });
    }
    if p_tfi.probabilities.len() != p_zc.probabilities.len() {
        return Err(Error::LengthMismatch {
            left: p_tfi.probabilities.len(),
            right: p_zc.probabilities.len(),
        });
    }
    let probabilities: Vec<f64> = p_tfi
        .probabilities
        .iter()
        .zip(&p_zc.probabilities)
        .map(|(a, b)| alpha * a + (1.0 - alpha) * b)
        .collect();
    Prediction::from_probabilities(probabilities)
}

/// Feature-vector addition; the fused vector keeps the branch dimension.
pub fn fuse_fva(f_tfi: &[f64], f_zc: &[f64]) -> Result<Vec<f64>> {
    if f_tfi.len() != f_zc.len() {
        return Err(Error::LengthMismatch {
            left: f_tfi.len(),
            right: f_zc.len(),
        });
    }
    Ok(f_tfi.iter().zip(f_zc).map(|(a, b)| a + b).collect())
}

/// Feature-vector concatenation, TFI first; dimension doubles.
pub fn fuse_fvc(f_tfi: &[f64], f_zc: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(f_tfi.len() + f_zc.len());
    out.extend_from_slice(f_tfi);
    out.extend_from_slice(f_zc);
    out
}

/// Numerically stabilized softmax (max subtraction).
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::MIN, f64::max);
    let exps: Vec<f64> = logits.iter().map(|v| (v - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Softmax prediction and categorical cross-entropy against a one-hot label.
pub fn softmax_xent(logits: &[f64], one_hot: &[f64]) -> Result<(Prediction, f64)> {
    if logits.len() != one_hot.len() {
        return Err(Error::LengthMismatch {
            left: logits.len(),
            right: one_hot.len(),
        });
    }
    let ones = one_hot.iter().filter(|&&v| v == 1.0).count();
    if ones != 1 || one_hot.iter().any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::NotOneHot);
    }
    let probabilities = softmax(logits);
    let loss: f64 = one_hot
        .iter()
        .zip(&probabilities)
        .filter(|(&y, _)| y == 1.0)
        .map(|(_, &p)| -(p.max(1e-300)).ln())
        .sum();
    let predicted_class = argmax(&probabilities);
    Ok((
        Prediction {
            probabilities,
            predicted_class,
        },
        loss,
    ))
}

/// One-hot vector for a class index.
pub fn one_hot(class: usize, n: usize) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[class] = 1.0;
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(v: Vec<f64>) -> Prediction {
        Prediction::from_probabilities(v).unwrap()
    }

    #[test]
    fn pwa_convex_combination() {
        let mut a = vec![0.0; 9];
        a[0] = 0.8;
        a[1] = 0.2;
        let mut b = vec![0.0; 9];
        b[0] = 0.4;
        b[1] = 0.6;
        let fused = fuse_pwa(&dist(a), &dist(b), 0.5).unwrap();
        assert!((fused.probabilities[0] - 0.6).abs() < 1e-12);
        assert!((fused.probabilities[1] - 0.4).abs() < 1e-12);
        assert_eq!(fused.predicted_class, 0);
    }

    #[test]
    fn pwa_endpoints_return_branches() {
        let a = dist(one_hot(2, 9));
        let b = dist(one_hot(5, 9));
        assert_eq!(fuse_pwa(&a, &b, 1.0).unwrap(), a);
        assert_eq!(fuse_pwa(&a, &b, 0.0).unwrap(), b);
        assert!(matches!(
            fuse_pwa(&a, &b, 1.5),
            Err(Error::AlphaOutOfRange { .. })
        ));
    }

    #[test]
    fn pwa_output_sums_to_one_for_all_alphas() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(4);
        for alpha in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let raw: Vec<f64> = (0..9).map(|_| rng.gen::<f64>()).collect();
            let s: f64 = raw.iter().sum();
            let a = dist(raw.iter().map(|v| v / s).collect());
            let raw: Vec<f64> = (0..9).map(|_| rng.gen::<f64>()).collect();
            let s: f64 = raw.iter().sum();
            let b = dist(raw.iter().map(|v| v / s).collect());
            let fused = fuse_pwa(&a, &b, alpha).unwrap();
            let total: f64 = fused.probabilities.iter().sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fva_is_elementwise_sum() {
        assert_eq!(fuse_fva(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), vec![4.0, 6.0]);
        let f = vec![0.5, -1.5, 2.0];
        assert_eq!(fuse_fva(&f, &[0.0, 0.0, 0.0]).unwrap(), f);
        assert_eq!(
            fuse_fva(&[1.0, 2.0], &[3.0, 4.0]).unwrap(),
            fuse_fva(&[3.0, 4.0], &[1.0, 2.0]).unwrap()
        );
        assert!(fuse_fva(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn fvc_doubles_dimension_tfi_first() {
        let a = vec![1.0, 2.0];
        let b = vec![3.0, 4.0];
        let c = fuse_fvc(&a, &b);
        assert_eq!(c.len(), 4);
        assert_eq!(&c[..2], &a[..]);
        assert_eq!(&c[2..], &b[..]);
        assert!(fuse_fvc(&[0.0; 3], &[0.0; 3]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn perfect_prediction_loss_vanishes() {
        let mut logits = vec![0.0; 9];
        logits[3] = 20.0;
        let (pred, loss) = softmax_xent(&logits, &one_hot(3, 9)).unwrap();
        assert_eq!(pred.predicted_class, 3);
        assert!(loss <= 1e-6);
    }

    #[test]
    fn uniform_logits_loss_is_ln_nine() {
        let logits = vec![0.7; 9];
        let (pred, loss) = softmax_xent(&logits, &one_hot(0, 9)).unwrap();
        for p in &pred.probabilities {
            assert!((p - 1.0 / 9.0).abs() < 1e-12);
        }
        assert!((loss - 9.0_f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn softmax_shift_invariance() {
        let logits = vec![0.3, -1.2, 2.5, 0.0, 1.1, -0.4, 0.9, -2.0, 0.6];
        let shifted: Vec<f64> = logits.iter().map(|v| v + 123.0).collect();
        let (p1, l1) = softmax_xent(&logits, &one_hot(2, 9)).unwrap();
        let (p2, l2) = softmax_xent(&shifted, &one_hot(2, 9)).unwrap();
        assert_eq!(p1.predicted_class, p2.predicted_class);
        assert!((l1 - l2).abs() < 1e-9);
        for (a, b) in p1.probabilities.iter().zip(&p2.probabilities) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn non_one_hot_rejected() {
        let logits = vec![0.0; 9];
        let mut label = vec![0.0; 9];
        label[1] = 0.5;
        label[2] = 0.5;
        assert!(matches!(
            softmax_xent(&logits, &label),
            Err(Error::NotOneHot)
        ));
        assert!(matches!(
            softmax_xent(&logits, &vec![0.0; 9]),
            Err(Error::NotOneHot)
        ));
    }
}
