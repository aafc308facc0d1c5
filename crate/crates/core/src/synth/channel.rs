//! Channel impairments: multipath, burst interference, and calibrated AWGN.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::dsp::fft;
use crate::synth::profile::InterferenceSpec;
use crate::{Error, Result};

fn complex_normal(rng: &mut ChaCha12Rng) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im)
}

/// Add circularly-symmetric complex Gaussian noise of variance
/// `signal_power / 10^(snr_db/10)`. Deterministic per seed.
pub fn add_awgn(x: &[Complex64], snr_db: f64, signal_power: f64, seed: u64) -> Result<Vec<Complex64>> {
    if !(signal_power > 0.0) || !signal_power.is_finite() || !snr_db.is_finite() {
        return Err(Error::InvalidRequest(format!(
            "awgn needs finite positive signal power, got {signal_power} at {snr_db} dB"
        )));
    }
    let variance = signal_power / 10f64.powf(snr_db / 10.0);
    let sigma = (variance / 2.0).sqrt();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    Ok(x.iter()
        .map(|&v| v + complex_normal(&mut rng) * sigma)
        .collect())
}

/// Seeded 3-tap multipath: a unit direct path plus two attenuated delayed
/// echoes with random phases, drawn once per capture.
pub fn apply_multipath(x: &[Complex64], seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let a1 = rng.gen_range(0.1..0.4);
    let p1 = rng.gen_range(0.0..std::f64::consts::TAU);
    let d1 = rng.gen_range(2..=8usize);
    let a2 = rng.gen_range(0.05..0.25);
    let p2 = rng.gen_range(0.0..std::f64::consts::TAU);
    let d2 = rng.gen_range(9..=24usize);
    let t1 = Complex64::new(0.0, p1).exp() * a1;
    let t2 = Complex64::new(0.0, p2).exp() * a2;

    (0..x.len())
        .map(|i| {
            let mut v = x[i];
            if i >= d1 {
                v += x[i - d1] * t1;
            }
            if i >= d2 {
                v += x[i - d2] * t2;
            }
            v
        })
        .collect()
}

/// Bandlimited noise bursts with Poisson arrivals; returns a full-length
/// buffer to be summed onto the signal. Each burst is white noise spectrally
/// masked to `burst_bandwidth_hz` around a uniformly drawn center frequency
/// and scaled to `reference_power * 10^(burst_power_db/10)`.
pub fn gen_interference(
    spec: &InterferenceSpec,
    duration_s: f64,
    sample_rate_hz: f64,
    reference_power: f64,
    seed: u64,
) -> Vec<Complex64> {
    let n = (duration_s * sample_rate_hz).round() as usize;
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if spec.is_clean() || n == 0 {
        return out;
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let lambda = spec.burst_rate_per_s * duration_s;
    let count = if lambda > 0.0 {
        Poisson::new(lambda).map(|p| p.sample(&mut rng) as usize).unwrap_or(0)
    } else {
        0
    };
    let burst_len = ((spec.burst_duration_s * sample_rate_hz).round() as usize).max(1);
    let target_power = reference_power * 10f64.powf(spec.burst_power_db / 10.0);

    for _ in 0..count {
        let start = rng.gen_range(0..n);
        let len = burst_len.min(n - start);
        if len < 2 {
            continue;
        }
        let mut burst: Vec<Complex64> = (0..len).map(|_| complex_normal(&mut rng)).collect();
        // Mask the spectrum to the burst band around a random center.
        if spec.burst_bandwidth_hz < sample_rate_hz {
            let half_span = (sample_rate_hz - spec.burst_bandwidth_hz) / 2.0;
            let center = rng.gen_range(-half_span..=half_span);
            fft::forward_in_place(&mut burst);
            let bin_hz = sample_rate_hz / len as f64;
            for (k, v) in burst.iter_mut().enumerate() {
                let f = if k <= len / 2 {
                    k as f64 * bin_hz
                } else {
                    (k as f64 - len as f64) * bin_hz
                };
                if (f - center).abs() > spec.burst_bandwidth_hz / 2.0 {
                    *v = Complex64::new(0.0, 0.0);
                }
            }
            fft::inverse_in_place(&mut burst);
        }
        let power: f64 = burst.iter().map(|v| v.norm_sqr()).sum::<f64>() / len as f64;
        if power <= 0.0 {
            continue;
        }
        let scale = (target_power / power).sqrt();
        for (i, v) in burst.iter().enumerate() {
            out[start + i] += v * scale;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsp;

    #[test]
    fn vanishing_noise_at_high_snr() {
        let x = vec![Complex64::new(1.0, 0.0); 1000];
        let y = add_awgn(&x, 100.0, 1.0, 1).unwrap();
        let err: f64 = y.iter().zip(&x).map(|(a, b)| (a - b).norm_sqr()).sum();
        let sig: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        assert!(err / sig < 1e-4);
    }

    #[test]
    fn noise_power_calibrated_at_zero_db() {
        let x = vec![Complex64::new(0.0, 0.0); 1_000_000];
        let y = add_awgn(&x, 0.0, 2.5, 42).unwrap();
        let measured = dsp::mean_power(&y);
        let db_err = (10.0 * (measured / 2.5).log10()).abs();
        assert!(db_err < 0.1, "noise power off by {db_err} dB");
    }

    #[test]
    fn awgn_is_deterministic_per_seed() {
        let x = vec![Complex64::new(0.3, -0.2); 64];
        let a = add_awgn(&x, 10.0, 1.0, 9).unwrap();
        let b = add_awgn(&x, 10.0, 1.0, 9).unwrap();
        assert_eq!(a, b);
        let c = add_awgn(&x, 10.0, 1.0, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn multipath_is_causal_and_seeded() {
        let mut x = vec![Complex64::new(0.0, 0.0); 64];
        x[0] = Complex64::new(1.0, 0.0);
        let y = apply_multipath(&x, 5);
        assert_eq!(y[0], x[0]);
        let echoes: usize = y.iter().skip(1).filter(|v| v.norm() > 0.0).count();
        assert_eq!(echoes, 2);
        assert_eq!(apply_multipath(&x, 5), y);
    }

    #[test]
    fn interference_clean_channel_is_zero() {
        let spec = InterferenceSpec::none();
        let out = gen_interference(&spec, 1e-3, 1e6, 1.0, 0);
        assert!(out.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn interference_bursts_carry_target_power() {
        let spec = InterferenceSpec {
            burst_rate_per_s: 2000.0,
            burst_bandwidth_hz: 200e3,
            burst_duration_s: 0.5e-3,
            burst_power_db: 3.0,
        };
        let out = gen_interference(&spec, 20e-3, 1e6, 1.0, 3);
        let active: Vec<f64> = out
            .iter()
            .map(|v| v.norm_sqr())
            .filter(|&p| p > 0.0)
            .collect();
        assert!(!active.is_empty());
        let mean: f64 = active.iter().sum::<f64>() / active.len() as f64;
        // Bursts overlap, so the mean active power is at least the
        // single-burst target of ~2.0.
        assert!(mean > 1.0, "burst power {mean}");
    }
}
