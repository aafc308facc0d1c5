//! Fixed-window auto-correlation and subcarrier-count estimation.
//!
//! `gamma(m) = |sum_{k<N_up} x(k) x*(k+m)|`. The cyclic prefix of OFDM
//! symbols repeats the symbol tail, so gamma peaks at the symbol-core lag
//! `N * f_s / B`, which cross-validates the grid resolved from the PSD.

use num_complex::Complex64;
use serde::Serialize;

use crate::capture::SignalCapture;
use crate::dsp::fft;
use crate::{Error, Result};

/// Auto-correlation magnitudes over a lag interval.
#[derive(Debug, Clone, Serialize)]
pub struct AutocorrResult {
    /// gamma(m) for m in [lag_start, lag_start + gamma.len()).
    pub gamma: Vec<f64>,
    /// Correlation window length in samples.
    pub n_up: usize,
    /// First lag covered by `gamma`.
    pub lag_start: usize,
    /// Absolute lag of the maximum.
    pub m_star: usize,
}

/// Inclusive lag interval.
#[derive(Debug, Clone, Copy)]
pub struct LagRange {
    pub start: usize,
    pub end: usize,
}

impl LagRange {
    /// Full range for a capture: lags 0..L-N_up-1.
    pub fn full(capture_len: usize, n_up: usize) -> Self {
        Self {
            start: 0,
            end: capture_len - n_up - 1,
        }
    }

    /// Search window for subcarrier-count estimation, avoiding the trivial
    /// zero-lag energy peak: [0.5*min, 1.5*max] of the candidate lags.
    pub fn for_candidates(candidates: &[usize], sample_rate_hz: f64, grid_bandwidth_hz: f64) -> Self {
        let ratio = sample_rate_hz / grid_bandwidth_hz;
        let min = candidates.iter().copied().min().unwrap_or(1);
        let max = candidates.iter().copied().max().unwrap_or(1);
        Self {
            start: (0.5 * min as f64 * ratio).floor() as usize,
            end: (1.5 * max as f64 * ratio).ceil() as usize,
        }
    }
}

/// Switch to the FFT path above this many lag-window products.
const DIRECT_COST_LIMIT: usize = 1 << 22;

/// Auto-correlate the first `n_up` samples of the capture against itself at
/// every lag in `lag_range`.
pub fn autocorr(capture: &SignalCapture, n_up: usize, lag_range: LagRange) -> Result<AutocorrResult> {
    let x = &capture.samples;
    let len = x.len();
    if n_up == 0 || n_up >= len {
        return Err(Error::WindowTooLong { n_up, len });
    }
    let max_lag = len - n_up - 1;
    if lag_range.start > lag_range.end || lag_range.end > max_lag {
        return Err(Error::InvalidConfig(format!(
            "lag range [{}, {}] outside [0, {max_lag}]",
            lag_range.start, lag_range.end
        )));
    }
    let lags = lag_range.end - lag_range.start + 1;

    let gamma = if lags * n_up <= DIRECT_COST_LIMIT {
        autocorr_direct(x, n_up, lag_range)
    } else {
        autocorr_fft(x, n_up, lag_range)?
    };

    let (arg, _) = gamma
        .iter()
        .enumerate()
        .fold((0usize, f64::MIN), |best, (i, &g)| {
            if g > best.1 {
                (i, g)
            } else {
                best
            }
        });
    Ok(AutocorrResult {
        m_star: lag_range.start + arg,
        gamma,
        n_up,
        lag_start: lag_range.start,
    })
}

fn autocorr_direct(x: &[Complex64], n_up: usize, lag_range: LagRange) -> Vec<f64> {
    (lag_range.start..=lag_range.end)
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n_up {
                acc += x[k] * x[k + m].conj();
            }
            acc.norm()
        })
        .collect()
}

/// All-lag correlation via the frequency domain, then sliced to the range.
fn autocorr_fft(x: &[Complex64], n_up: usize, lag_range: LagRange) -> Result<Vec<f64>> {
    let len = x.len();
    let m = len.next_power_of_two();
    let mut head = vec![Complex64::new(0.0, 0.0); m];
    head[..n_up].copy_from_slice(&x[..n_up]);
    let mut full = vec![Complex64::new(0.0, 0.0); m];
    full[..len].copy_from_slice(x);

    fft::forward_in_place(&mut head);
    fft::forward_in_place(&mut full);
    for (h, f) in head.iter_mut().zip(&full) {
        *h *= f.conj();
    }
    fft::inverse_in_place(&mut head);

    // gamma(m) = |v[(M - m) % M]| with v = IDFT(DFT(head) .* conj(DFT(x))).
    Ok((lag_range.start..=lag_range.end)
        .map(|lag| head[(m - lag) % m].norm())
        .collect())
}

/// Pick the candidate subcarrier count whose expected cyclic-prefix lag
/// `N * f_s / B` is nearest the measured correlation peak; ties break toward
/// the larger N. Errors when the best distance exceeds 10% of the expected
/// lag.
pub fn estimate_subcarrier_count(
    ac: &AutocorrResult,
    sample_rate_hz: f64,
    grid_bandwidth_hz: f64,
    candidates: &[usize],
) -> Result<usize> {
    if grid_bandwidth_hz <= 0.0 || candidates.is_empty() {
        return Err(Error::InvalidConfig(
            "need a positive bandwidth and a non-empty candidate set".into(),
        ));
    }
    let ratio = sample_rate_hz / grid_bandwidth_hz;
    let mut best: Option<(usize, f64, f64)> = None; // (N, distance, expected)
    for &n in candidates {
        let expected = n as f64 * ratio;
        let distance = (ac.m_star as f64 - expected).abs();
        let better = match best {
            None => true,
            Some((bn, bd, _)) => distance < bd || (distance == bd && n > bn),
        };
        if better {
            best = Some((n, distance, expected));
        }
    }
    let (n, distance, expected) = best.unwrap();
    if distance > 0.1 * expected {
        return Err(Error::NoCrediblePeak {
            m_star: ac.m_star,
            distance,
            expected,
        });
    }
    Ok(n)
}
