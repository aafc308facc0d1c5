//! Finite-difference verification of the analytic gradients.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::classify::network::{Network, Sample};
use crate::{Error, Result};

/// Compare analytic gradients against central finite differences on up to
/// `samples_per_layer` randomly chosen parameters per layer (every
/// parameter of smaller layers). Returns the maximum relative error.
///
/// The relative error of component i is `|a_i - n_i|` over
/// `max(|a_i|, |n_i|, 1e-4 * ||a||_inf, 1e-10)`: full relative precision on
/// significant components, a floor tied to the gradient scale on the rest
/// (central differences cannot resolve components far below the scale of
/// the loss).
pub fn grad_check(
    net: &Network,
    sample: &Sample,
    eps: f64,
    samples_per_layer: usize,
    seed: u64,
) -> Result<f64> {
    if !(1e-7..=1e-3).contains(&eps) {
        return Err(Error::InvalidConfig(format!(
            "eps {eps} outside [1e-7, 1e-3]"
        )));
    }
    let (_, analytic) = net.loss_and_grad(sample)?;
    let grad_scale = analytic.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let floor = (1e-4 * grad_scale).max(1e-10);

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut probe = net.clone();
    let base = net.get_params();
    let mut max_rel = 0.0f64;

    for (_, range) in net.layer_ranges() {
        let mut indices: Vec<usize> = range.collect();
        indices.shuffle(&mut rng);
        indices.truncate(samples_per_layer);
        for i in indices {
            let mut params = base.clone();
            params[i] = base[i] + eps;
            probe.set_params(&params);
            let (loss_plus, _) = probe.loss_and_grad(sample)?;
            params[i] = base[i] - eps;
            probe.set_params(&params);
            let (loss_minus, _) = probe.loss_and_grad(sample)?;
            let numeric = (loss_plus - loss_minus) / (2.0 * eps);
            let denom = analytic[i].abs().max(numeric.abs()).max(floor);
            let rel = (analytic[i] - numeric).abs() / denom;
            if rel > max_rel {
                max_rel = rel;
            }
        }
    }
    Ok(max_rel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::network::{Arch, FEATURE_DIM};
    use crate::mat::Mat;
    use rand::Rng;

    fn random_mat(rows: usize, cols: usize, seed: u64) -> Mat {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut m = Mat::zeros(rows, cols);
        for v in &mut m.data {
            *v = rng.gen_range(-1.0..1.0);
        }
        m
    }

    #[test]
    fn dense_only_path_is_tight() {
        // A sequence model with linear activations is dense-dominated; the
        // finite-difference error should reach full double precision.
        let mut net = Network::seq_only(2, 16, 21);
        net.set_linear_activations();
        let sample = Sample {
            image: None,
            seq: Some(random_mat(2, 64, 1)),
            label: 4,
        };
        let err = grad_check(&net, &sample, 1e-5, 400, 2).unwrap();
        assert!(err < 1e-6, "max rel err {err:.2e}");
    }

    #[test]
    fn full_fvc_model_checks_out() {
        let net = Network::fusion(Arch::FusionFvc, 8, FEATURE_DIM, 22);
        let sample = Sample {
            image: Some(random_mat(16, 16, 3)),
            seq: Some(random_mat(8, 100, 4)),
            label: 7,
        };
        let err = grad_check(&net, &sample, 1e-5, 200, 5).unwrap();
        assert!(err < 1e-4, "max rel err {err:.2e}");
    }

    #[test]
    fn zero_weight_model_has_symmetric_gradients() {
        // Zero weights at a symmetric input: gradients of parameters tied
        // by the symmetry must agree exactly.
        let mut net = Network::seq_only(1, 8, 23);
        let zeros = vec![0.0; net.num_params()];
        net.set_params(&zeros);
        let sample = Sample {
            image: None,
            seq: Some(Mat::from_rows(vec![vec![1.0; 32]])),
            label: 0,
        };
        let (_, grad) = net.loss_and_grad(&sample).unwrap();
        // Head bias gradients: softmax over identical (zero) logits makes
        // every wrong-class gradient identical.
        let ranges = net.layer_ranges();
        let (_, head_b) = ranges.iter().find(|(n, _)| n == "head.b").unwrap().clone();
        let b = &grad[head_b.clone()];
        for i in 2..b.len() {
            assert!((b[i] - b[1]).abs() < 1e-10);
        }
    }

    #[test]
    fn eps_outside_range_rejected() {
        let net = Network::seq_only(1, 8, 0);
        let sample = Sample {
            image: None,
            seq: Some(random_mat(1, 32, 5)),
            label: 0,
        };
        assert!(grad_check(&net, &sample, 1e-2, 10, 0).is_err());
    }
}
