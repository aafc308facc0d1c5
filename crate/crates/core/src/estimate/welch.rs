//! Welch power spectral density estimation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::capture::SignalCapture;
use crate::dsp::fft;
use crate::dsp::window::{WindowKind, WindowSpec};
use crate::{Error, Result};

/// Segmentation and windowing for the Welch estimator.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WelchConfig {
    /// Segment length L_w (also the DFT size). Must be even.
    pub segment_len: usize,
    /// Offset D between segment starts, 1 <= D <= L_w. L_w/2 gives the
    /// usual 50% overlap.
    pub offset: usize,
    pub window: WindowKind,
}

impl Default for WelchConfig {
    fn default() -> Self {
        Self {
            segment_len: 4096,
            offset: 2048,
            window: WindowKind::Hann,
        }
    }
}

impl WelchConfig {
    /// Non-overlapping segmentation (D = L_w).
    pub fn non_overlapping(segment_len: usize, window: WindowKind) -> Self {
        Self {
            segment_len,
            offset: segment_len,
            window,
        }
    }

    /// Segment count for a capture of length `len`.
    pub fn segment_count(&self, len: usize) -> usize {
        if len < self.segment_len {
            0
        } else {
            (len - self.segment_len) / self.offset + 1
        }
    }

    fn validate(&self) -> Result<()> {
        if self.segment_len < 2 || self.segment_len % 2 != 0 {
            return Err(Error::InvalidConfig(format!(
                "segment length must be even and >= 2, got {}",
                self.segment_len
            )));
        }
        if self.offset == 0 || self.offset > self.segment_len {
            return Err(Error::InvalidConfig(format!(
                "offset {} outside [1, {}]",
                self.offset, self.segment_len
            )));
        }
        Ok(())
    }
}

/// A power spectral density estimate with the zero-frequency bin centered:
/// bin `k` covers frequency `(k - len/2) * bin_spacing_hz`.
#[derive(Debug, Clone, Serialize)]
pub struct PsdEstimate {
    pub values: Vec<f64>,
    pub bin_spacing_hz: f64,
}

impl PsdEstimate {
    /// Center frequency of bin `k`.
    pub fn freq_hz(&self, k: usize) -> f64 {
        (k as f64 - (self.values.len() / 2) as f64) * self.bin_spacing_hz
    }
}

/// Average `K` windowed periodograms at offsets `i*D`.
///
/// Each periodogram is `|DFT(segment * window)|^2 / sum(window^2)`, which
/// reduces to the plain `(1/L_w)|DFT|^2` form for a rectangular window and
/// keeps the mean of the PSD bins equal to the mean signal power for any
/// window.
pub fn welch_psd(capture: &SignalCapture, cfg: &WelchConfig) -> Result<PsdEstimate> {
    cfg.validate()?;
    let x = &capture.samples;
    if x.len() < cfg.segment_len {
        return Err(Error::CaptureShorterThanSegment {
            capture: x.len(),
            segment: cfg.segment_len,
        });
    }
    let l_w = cfg.segment_len;
    let window = WindowSpec::new(cfg.window, l_w)?.values();
    let power_sum: f64 = window.iter().map(|w| w * w).sum();
    let k_segments = cfg.segment_count(x.len());

    let mut acc = vec![0.0f64; l_w];
    let mut buf = vec![Complex64::new(0.0, 0.0); l_w];
    for i in 0..k_segments {
        let start = i * cfg.offset;
        for (j, b) in buf.iter_mut().enumerate() {
            *b = x[start + j] * window[j];
        }
        fft::forward_in_place(&mut buf);
        for (a, b) in acc.iter_mut().zip(&buf) {
            *a += b.norm_sqr();
        }
    }
    let scale = 1.0 / (k_segments as f64 * power_sum);
    for a in acc.iter_mut() {
        *a *= scale;
    }

    Ok(PsdEstimate {
        values: fft::fftshift(&acc),
        bin_spacing_hz: capture.sample_rate_hz / l_w as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use rand_distr::{Distribution, StandardNormal};
    use rayon::prelude::*;
    use std::f64::consts::PI;

    fn white_noise(n: usize, seed: u64) -> SignalCapture {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let samples = (0..n)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
            })
            .collect();
        SignalCapture::new(samples, 1e6)
    }

    #[test]
    fn bin_centered_tone_concentrates() {
        let l_w = 256;
        let f_s = 1e6;
        let bin = 32;
        let n = 4096;
        let samples: Vec<Complex64> = (0..n)
            .map(|i| {
                let phase = 2.0 * PI * bin as f64 * i as f64 / l_w as f64;
                Complex64::new(phase.cos(), phase.sin())
            })
            .collect();
        let cap = SignalCapture::new(samples, f_s);
        let cfg = WelchConfig::non_overlapping(l_w, WindowKind::Rectangular);
        let psd = welch_psd(&cap, &cfg).unwrap();
        let total: f64 = psd.values.iter().sum();
        let peak = psd.values.iter().cloned().fold(0.0f64, f64::max);
        assert!(peak / total >= 0.99, "peak fraction {}", peak / total);
        // The peak must sit at the expected shifted bin.
        let peak_idx = psd
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .unwrap()
            .0;
        assert_eq!(peak_idx, l_w / 2 + bin);
    }

    #[test]
    fn mean_psd_equals_mean_power_for_white_noise() {
        let cap = white_noise(1 << 17, 5);
        for window in [WindowKind::Rectangular, WindowKind::Hann] {
            let cfg = WelchConfig {
                segment_len: 1024,
                offset: 512,
                window,
            };
            let psd = welch_psd(&cap, &cfg).unwrap();
            let mean_psd: f64 = psd.values.iter().sum::<f64>() / psd.values.len() as f64;
            let mean_power = crate::dsp::mean_power(&cap.samples);
            assert!(
                (mean_psd - mean_power).abs() / mean_power < 0.02,
                "{window:?}: {mean_psd} vs {mean_power}"
            );
        }
    }

    #[test]
    fn overlap_halves_periodogram_variance() {
        // Per-bin variance with D = L_w/2 vs D = L_w at equal total length,
        // 200 Monte-Carlo trials of 1e6 samples.
        let l_w = 4096usize;
        let n = 1_000_000usize;
        let trials = 200usize;
        let psds: Vec<(Vec<f64>, Vec<f64>)> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let cap = white_noise(n, 1000 + t as u64);
                let half = WelchConfig {
                    segment_len: l_w,
                    offset: l_w / 2,
                    window: WindowKind::Hann,
                };
                let full = WelchConfig {
                    segment_len: l_w,
                    offset: l_w,
                    window: WindowKind::Hann,
                };
                (
                    welch_psd(&cap, &half).unwrap().values,
                    welch_psd(&cap, &full).unwrap().values,
                )
            })
            .collect();

        let var_over_bins = |select: fn(&(Vec<f64>, Vec<f64>)) -> &Vec<f64>| -> f64 {
            let mut total = 0.0;
            for bin in 0..l_w {
                let vals: Vec<f64> = psds.iter().map(|p| select(p)[bin]).collect();
                let mean = vals.iter().sum::<f64>() / vals.len() as f64;
                let var =
                    vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vals.len() as f64;
                total += var;
            }
            total / l_w as f64
        };

        let var_half = var_over_bins(|p| &p.0);
        let var_full = var_over_bins(|p| &p.1);
        let ratio = var_half / var_full;
        assert!(ratio <= 0.6, "variance ratio {ratio:.3}");
    }

    #[test]
    fn invariant_under_global_phase_rotation() {
        let cap = white_noise(8192, 9);
        let rot = Complex64::new(0.0, 1.234).exp();
        let rotated = SignalCapture::new(
            cap.samples.iter().map(|v| v * rot).collect(),
            cap.sample_rate_hz,
        );
        let cfg = WelchConfig {
            segment_len: 512,
            offset: 256,
            window: WindowKind::Hann,
        };
        let a = welch_psd(&cap, &cfg).unwrap();
        let b = welch_psd(&rotated, &cfg).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() <= 1e-12 * x.max(1e-30));
        }
    }

    #[test]
    fn short_capture_rejected() {
        let cap = white_noise(100, 0);
        let cfg = WelchConfig::default();
        assert!(matches!(
            welch_psd(&cap, &cfg),
            Err(Error::CaptureShorterThanSegment { .. })
        ));
    }
}
