//! Shared DSP primitives: discrete Fourier transforms, window functions,
//! and rational resampling.
//!
//! Everything here is deterministic and pure; all paths run in double
//! precision so the correlation identities asserted elsewhere hold to
//! tight tolerances.

pub mod fft;
pub mod resample;
pub mod window;

pub use fft::{forward, inverse};
pub use resample::resample_rational;
pub use window::{WindowKind, WindowSpec};

use num_complex::Complex64;

/// Total energy of a complex sequence, `sum |x|^2`.
pub fn energy(x: &[Complex64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum()
}

/// Mean power of a complex sequence, `energy / len`. Zero for empty input.
pub fn mean_power(x: &[Complex64]) -> f64 {
    if x.is_empty() {
        0.0
    } else {
        energy(x) / x.len() as f64
    }
}

/// True when every sample is finite in both components.
pub fn all_finite(x: &[Complex64]) -> bool {
    x.iter().all(|v| v.re.is_finite() && v.im.is_finite())
}
