//! Frequency-hopping burst synthesis for the uplink component.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::synth::profile::FhssPlan;
use crate::{Error, Result};

/// Hop frequencies per dwell, drawn as seeded permutations of the hop set
/// repeated until `n_dwells` is covered. Exposed so tests can recompute the
/// order a generated signal must follow.
pub fn hop_order(plan: &FhssPlan, n_dwells: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut order = Vec::with_capacity(n_dwells);
    while order.len() < n_dwells {
        let mut cycle = plan.hops_hz.clone();
        cycle.shuffle(&mut rng);
        order.extend(cycle);
    }
    order.truncate(n_dwells);
    order
}

/// Generate a constant-envelope hopping signal: one burst per dwell, each a
/// linear sweep of `hop_bandwidth_hz` centered on its hop frequency (a pure
/// tone when the bandwidth is zero).
pub fn gen_fhss(plan: &FhssPlan, duration_s: f64, sample_rate_hz: f64, seed: u64) -> Result<Vec<Complex64>> {
    let n = (duration_s * sample_rate_hz).round() as usize;
    if n == 0 {
        return Ok(Vec::new());
    }
    if plan.hops_hz.is_empty() {
        return Err(Error::InvalidRequest("empty hop set".into()));
    }
    if plan.dwell_s <= 0.0 {
        return Err(Error::InvalidRequest("hop dwell must be positive".into()));
    }
    let nyquist = sample_rate_hz / 2.0;
    for &hop in &plan.hops_hz {
        if hop.abs() + plan.hop_bandwidth_hz / 2.0 > nyquist {
            return Err(Error::HopOutOfBand {
                hop_hz: hop,
                nyquist_hz: nyquist,
            });
        }
    }

    let dwell_n = ((plan.dwell_s * sample_rate_hz).round() as usize).max(1);
    let n_dwells = n.div_ceil(dwell_n);
    let order = hop_order(plan, n_dwells, seed);

    let mut out = Vec::with_capacity(n);
    'outer: for (k, &hop) in order.iter().enumerate() {
        for t_local in 0..dwell_n {
            if k * dwell_n + t_local >= n {
                break 'outer;
            }
            let tau = t_local as f64 / sample_rate_hz;
            // Instantaneous frequency hop + bw*(tau/dwell - 1/2); phase is
            // its integral.
            let phase = 2.0
                * std::f64::consts::PI
                * (hop * tau
                    + plan.hop_bandwidth_hz * (tau * tau / (2.0 * plan.dwell_s) - tau / 2.0));
            out.push(Complex64::new(phase.cos(), phase.sin()));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp::fft;

    fn tone_plan(hops: Vec<f64>, dwell_s: f64) -> FhssPlan {
        FhssPlan {
            dwell_s,
            hop_bandwidth_hz: 0.0,
            hops_hz: hops,
            relative_power_db: 0.0,
        }
    }

    #[test]
    fn single_hop_is_a_pure_tone() {
        let f_s = 1e6;
        let plan = tone_plan(vec![100e3], 10e-3);
        let sig = gen_fhss(&plan, 10e-3, f_s, 3).unwrap();
        assert_eq!(sig.len(), 10_000);
        let spec = fft::forward(&sig).unwrap();
        let peak = spec
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .unwrap()
            .0;
        let expected = (100e3 / f_s * sig.len() as f64).round() as usize;
        assert!(peak.abs_diff(expected) <= 1);
    }

    #[test]
    fn dwell_argmax_follows_seeded_order() {
        let f_s = 1e6;
        let hops = vec![-300e3, -100e3, 100e3, 300e3];
        let plan = tone_plan(hops, 1e-3);
        let seed = 77;
        let sig = gen_fhss(&plan, 8e-3, f_s, seed).unwrap();
        let dwell_n = 1000usize;
        let order = hop_order(&plan, 8, seed);
        for (k, &hop) in order.iter().enumerate() {
            let chunk = &sig[k * dwell_n..(k + 1) * dwell_n];
            let spec = fft::forward(chunk).unwrap();
            let peak = spec
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
                .unwrap()
                .0;
            let expected =
                ((hop / f_s * dwell_n as f64).round() as i64).rem_euclid(dwell_n as i64) as usize;
            assert_eq!(peak, expected, "dwell {k}");
        }
    }

    #[test]
    fn zero_duration_is_empty() {
        let plan = tone_plan(vec![1e3], 1e-3);
        let sig = gen_fhss(&plan, 0.0, 1e6, 0).unwrap();
        assert!(sig.is_empty());
    }

    #[test]
    fn hop_beyond_nyquist_rejected() {
        let plan = tone_plan(vec![600e3], 1e-3);
        assert!(matches!(
            gen_fhss(&plan, 1e-3, 1e6, 0),
            Err(Error::HopOutOfBand { .. })
        ));
    }

    #[test]
    fn envelope_is_constant() {
        let plan = FhssPlan {
            dwell_s: 1e-3,
            hop_bandwidth_hz: 50e3,
            hops_hz: vec![-200e3, 200e3],
            relative_power_db: 0.0,
        };
        let sig = gen_fhss(&plan, 4e-3, 1e6, 5).unwrap();
        for v in &sig {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }
}
