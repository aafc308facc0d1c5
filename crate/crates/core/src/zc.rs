//! Zadoff-Chu sequence generation and the correlation identities that make
//! the sequences usable as identification features.
//!
//! A ZC sequence of odd length `L` and root `u` coprime to `L` has constant
//! unit amplitude, an ideal cyclic autocorrelation (a single peak of height
//! `L` at lag zero), and cross-correlations against other roots whose
//! magnitudes are either zero or `sqrt(N_d * L)` where `N_d = gcd(L, |u1-u2|)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::dsp::fft;
use crate::{Error, Result};

/// Root index and length of a Zadoff-Chu sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct ZcSpec {
    /// Physical root index, 1 <= u <= len-1, coprime to len.
    pub root: u32,
    /// Sequence length; odd, at least 3.
    pub len: u32,
}

fn gcd_u32(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd_u32(b, a % b)
    }
}

impl ZcSpec {
    /// Validate and construct. Coprimality of root and length is required
    /// for the constant-amplitude zero-autocorrelation property, and only
    /// odd lengths match the `i(i+1)` exponent form generated here.
    pub fn new(root: u32, len: u32) -> Result<Self> {
        if len % 2 == 0 {
            return Err(Error::EvenZcLength { len });
        }
        if root == 0 || root >= len {
            return Err(Error::RootOutOfRange { u: root, len });
        }
        let g = gcd_u32(root, len);
        if g != 1 {
            return Err(Error::NonCoprimeRoot { u: root, len, gcd: g });
        }
        Ok(Self { root, len })
    }
}

/// Theoretical and measured cross-root correlation structure.
#[derive(Debug, Clone, Serialize)]
pub struct CrossRootReport {
    /// gcd of the length and the root difference (the length itself for
    /// equal roots, i.e. the autocorrelation case).
    pub n_d: u32,
    /// Theoretical peak magnitude, sqrt(n_d * len).
    pub peak_magnitude: f64,
    /// Number of peak lags found by exhaustive correlation.
    pub peak_count: usize,
    /// Peak lags found by exhaustive correlation, ascending.
    pub peak_positions: Vec<usize>,
}

/// Generate `z_u(i) = exp(-j*pi*u*i*(i+1)/L)` for `i = 0..L-1`.
///
/// The phase numerator is reduced modulo `2L` before the trig evaluation so
/// every sample keeps unit magnitude to full double precision even for long
/// sequences.
pub fn generate_zc(spec: ZcSpec) -> Vec<Complex64> {
    let l = spec.len as u64;
    let u = spec.root as u64;
    let two_l = 2 * l;
    (0..l)
        .map(|i| {
            let num = (u * ((i * (i + 1)) % two_l)) % two_l;
            let phase = -std::f64::consts::PI * num as f64 / l as f64;
            Complex64::new(phase.cos(), phase.sin())
        })
        .collect()
}

/// Magnitude of the n-point cyclic cross-correlation,
/// `gamma(m) = |sum_k a(k) * conj(b((k+m) mod n))|`.
///
/// Evaluated through the frequency domain; the direct-summation route lives
/// in [`expected_cross_peak`] and the two must agree.
pub fn cyclic_cross_correlate(a: &[Complex64], b: &[Complex64]) -> Result<Vec<f64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(Error::EmptySequence);
    }
    let n = a.len();
    let spec_a = fft::forward(a)?;
    let spec_b = fft::forward(b)?;
    let cross: Vec<Complex64> = spec_a
        .iter()
        .zip(&spec_b)
        .map(|(x, y)| x * y.conj())
        .collect();
    // IDFT(A .* conj(B))[t] = sum_k a(k) conj(b(k - t)), so gamma(m) is the
    // magnitude at index (n - m) mod n.
    let v = fft::inverse(&cross)?;
    Ok((0..n).map(|m| v[(n - m) % n].norm()).collect())
}

/// Cyclic cross-correlation magnitudes by direct summation, O(n^2).
fn cyclic_cross_correlate_direct(a: &[Complex64], b: &[Complex64]) -> Vec<f64> {
    let n = a.len();
    (0..n)
        .map(|m| {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..n {
                acc += a[k] * b[(k + m) % n].conj();
            }
            acc.norm()
        })
        .collect()
}

/// Predict and exhaustively verify the cross-root correlation structure for
/// two roots of the same length.
///
/// `n_d = gcd(len, |u1-u2|)` (the full length when the roots are equal, which
/// reduces to the single-peak autocorrelation case); the theoretical peak
/// magnitude is `sqrt(n_d * len)` at `len / n_d` lags. Peak positions come
/// from a brute-force correlation over all lags, counting lags within half
/// the theoretical peak.
pub fn expected_cross_peak(u1: u32, u2: u32, len: u32) -> Result<CrossRootReport> {
    let a = generate_zc(ZcSpec::new(u1, len)?);
    let b = generate_zc(ZcSpec::new(u2, len)?);
    let diff = u1.abs_diff(u2);
    let n_d = if diff == 0 { len } else { gcd_u32(len, diff) };
    let peak_magnitude = (n_d as f64 * len as f64).sqrt();

    let gamma = cyclic_cross_correlate_direct(&a, &b);
    let threshold = 0.5 * peak_magnitude;
    let peak_positions: Vec<usize> = gamma
        .iter()
        .enumerate()
        .filter(|(_, &g)| g > threshold)
        .map(|(m, _)| m)
        .collect();

    Ok(CrossRootReport {
        n_d,
        peak_magnitude,
        peak_count: peak_positions.len(),
        peak_positions,
    })
}
