//! Discrete Fourier transforms.
//!
//! Convention: the forward transform is unnormalized, the inverse applies
//! `1/n`, so `inverse(forward(x)) == x`. Backed by rustfft; a thread-local
//! planner caches twiddle tables across calls.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan_forward(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n))
}

fn plan_inverse(n: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n))
}

/// Unnormalized forward DFT.
pub fn forward(x: &[Complex64]) -> Result<Vec<Complex64>> {
    if x.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut buf = x.to_vec();
    forward_in_place(&mut buf);
    Ok(buf)
}

/// Inverse DFT with `1/n` scaling.
pub fn inverse(x: &[Complex64]) -> Result<Vec<Complex64>> {
    if x.is_empty() {
        return Err(Error::EmptySequence);
    }
    let mut buf = x.to_vec();
    inverse_in_place(&mut buf);
    Ok(buf)
}

/// In-place unnormalized forward DFT. Panics on empty input.
pub fn forward_in_place(buf: &mut [Complex64]) {
    plan_forward(buf.len()).process(buf);
}

/// In-place inverse DFT with `1/n` scaling. Panics on empty input.
pub fn inverse_in_place(buf: &mut [Complex64]) {
    plan_inverse(buf.len()).process(buf);
    let scale = 1.0 / buf.len() as f64;
    for v in buf.iter_mut() {
        *v *= scale;
    }
}

/// Reorder a spectrum so the zero-frequency bin sits in the middle.
///
/// Bin `k` of the DFT output maps to frequency `k/n` for `k < n/2` and
/// `(k-n)/n` above; after the shift, index 0 corresponds to `-floor(n/2)`.
pub fn fftshift<T: Copy>(x: &[T]) -> Vec<T> {
    let n = x.len();
    let half = n.div_ceil(2);
    let mut out = Vec::with_capacity(n);
    out.extend_from_slice(&x[half..]);
    out.extend_from_slice(&x[..half]);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use std::f64::consts::PI;

    /// Direct O(n^2) DFT summation, the independent oracle.
    fn dft_direct(x: &[Complex64]) -> Vec<Complex64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, &v) in x.iter().enumerate() {
                    let phase = -2.0 * PI * (k as f64) * (j as f64) / n as f64;
                    acc += v * Complex64::new(phase.cos(), phase.sin());
                }
                acc
            })
            .collect()
    }

    fn random_seq(n: usize, seed: u64) -> Vec<Complex64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    fn rel_err(a: &[Complex64], b: &[Complex64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().max(1e-300);
        (num / den).sqrt()
    }

    #[test]
    fn impulse_transforms_to_constant() {
        let x = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
        ];
        let y = forward(&x).unwrap();
        for v in y {
            assert!((v - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn constant_transforms_to_dc_only() {
        let x = vec![Complex64::new(1.0, 0.0); 4];
        let y = forward(&x).unwrap();
        assert!((y[0] - Complex64::new(4.0, 0.0)).norm() < 1e-12);
        for v in &y[1..] {
            assert!(v.norm() < 1e-12);
        }
    }

    #[test]
    fn matches_direct_summation_oracle() {
        let x = random_seq(64, 7);
        let fast = forward(&x).unwrap();
        let direct = dft_direct(&x);
        assert!(rel_err(&fast, &direct) < 1e-10);
    }

    #[test]
    fn inverse_round_trip() {
        let x = random_seq(100, 3);
        let y = inverse(&forward(&x).unwrap()).unwrap();
        assert!(rel_err(&y, &x) < 1e-12);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(forward(&[]), Err(Error::EmptySequence)));
        assert!(matches!(inverse(&[]), Err(Error::EmptySequence)));
    }

    #[test]
    fn parseval_holds_for_random_lengths() {
        for (n, seed) in [(16usize, 1u64), (64, 2), (1024, 3)] {
            let x = random_seq(n, seed);
            let y = forward(&x).unwrap();
            let time_energy: f64 = x.iter().map(|v| v.norm_sqr()).sum();
            let freq_energy: f64 = y.iter().map(|v| v.norm_sqr()).sum::<f64>() / n as f64;
            assert!(
                (time_energy - freq_energy).abs() / time_energy < 1e-9,
                "parseval failed for n={n}"
            );
        }
    }

    #[test]
    fn dft_is_linear() {
        let x = random_seq(128, 11);
        let y = random_seq(128, 12);
        let (a, b) = (Complex64::new(1.3, -0.7), Complex64::new(-0.2, 2.1));
        let combined: Vec<Complex64> = x.iter().zip(&y).map(|(u, v)| a * u + b * v).collect();
        let lhs = forward(&combined).unwrap();
        let rhs: Vec<Complex64> = forward(&x)
            .unwrap()
            .iter()
            .zip(forward(&y).unwrap())
            .map(|(u, v)| a * u + b * v)
            .collect();
        assert!(rel_err(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn fftshift_centers_dc() {
        let shifted = fftshift(&[0, 1, 2, 3, 4, 5]);
        assert_eq!(shifted, vec![3, 4, 5, 0, 1, 2]);
        let odd = fftshift(&[0, 1, 2, 3, 4]);
        assert_eq!(odd, vec![3, 4, 0, 1, 2]);
    }
}
