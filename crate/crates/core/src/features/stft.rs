//! Time-frequency images via the short-time Fourier transform.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::capture::SignalCapture;
use crate::dsp::fft;
use crate::dsp::window::{WindowKind, WindowSpec};
use crate::mat::Mat;
use crate::{Error, Result, Scale};

/// STFT and image-rendering parameters. The window length equals the FFT
/// size W.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StftConfig {
    pub window: WindowKind,
    pub fft_size: usize,
    pub hop: usize,
    /// Rendered image resolution (rows = time, cols = frequency).
    pub image_size: usize,
    /// Magnitude floor in dB relative to the image peak.
    pub db_floor: f64,
}

impl StftConfig {
    /// Scale defaults: 256-point/64x64 desk, 1024-point/224x224 paper, both
    /// with hann windows and 50% hop.
    pub fn for_scale(scale: Scale) -> Self {
        match scale {
            Scale::Desk => Self {
                window: WindowKind::Hann,
                fft_size: 256,
                hop: 128,
                image_size: 64,
                db_floor: -60.0,
            },
            Scale::Paper => Self {
                window: WindowKind::Hann,
                fft_size: 1024,
                hop: 512,
                image_size: 224,
                db_floor: -60.0,
            },
        }
    }

    fn validate(&self) -> Result<()> {
        if self.hop == 0 || self.hop > self.fft_size {
            return Err(Error::InvalidConfig(format!(
                "hop {} outside [1, {}]",
                self.hop, self.fft_size
            )));
        }
        if self.image_size == 0 || self.db_floor >= 0.0 {
            return Err(Error::InvalidConfig(
                "image size must be positive and db floor negative".into(),
            ));
        }
        Ok(())
    }
}

/// Magnitude time-frequency matrix and its normalized image form.
#[derive(Debug, Clone)]
pub struct TfiImage {
    /// Raw STFT magnitudes, rows = time frames, cols = frequency bins
    /// (zero frequency centered).
    pub magnitudes: Mat,
    /// dB-scaled, min-max-normalized, area-averaged image in [0, 1].
    pub image: Mat,
    pub db_floor: f64,
}

/// Compute the magnitude STFT and render the normalized image.
pub fn stft_tfi(capture: &SignalCapture, cfg: &StftConfig) -> Result<TfiImage> {
    cfg.validate()?;
    let x = &capture.samples;
    let w = cfg.fft_size;
    if x.len() < w {
        return Err(Error::CaptureShorterThanWindow {
            capture: x.len(),
            window: w,
        });
    }
    let window = WindowSpec::new(cfg.window, w)?.values();
    let frames = (x.len() - w) / cfg.hop + 1;

    let mut magnitudes = Mat::zeros(frames, w);
    let mut buf = vec![Complex64::new(0.0, 0.0); w];
    for t in 0..frames {
        let start = t * cfg.hop;
        for (j, b) in buf.iter_mut().enumerate() {
            *b = x[start + j] * window[j];
        }
        fft::forward_in_place(&mut buf);
        let shifted = fft::fftshift(&buf);
        for (f, v) in shifted.iter().enumerate() {
            *magnitudes.at_mut(t, f) = v.norm();
        }
    }

    let image = render_image(&magnitudes, cfg.image_size, cfg.db_floor);
    Ok(TfiImage {
        magnitudes,
        image,
        db_floor: cfg.db_floor,
    })
}

/// dB conversion relative to the peak (floored), min-max normalization to
/// [0, 1], then area-averaged resize to `size x size`. An all-zero input
/// renders an all-zero image.
fn render_image(magnitudes: &Mat, size: usize, db_floor: f64) -> Mat {
    let peak = magnitudes.max_value();
    if peak <= 0.0 {
        return Mat::zeros(size, size);
    }
    let mut db = Mat::zeros(magnitudes.rows, magnitudes.cols);
    for (d, &m) in db.data.iter_mut().zip(&magnitudes.data) {
        let v = if m > 0.0 {
            (20.0 * (m / peak).log10()).max(db_floor)
        } else {
            db_floor
        };
        *d = (v - db_floor) / -db_floor;
    }
    area_resize(&db, size, size)
}

/// Box-average resize; nearest source cell when upscaling.
fn area_resize(src: &Mat, rows: usize, cols: usize) -> Mat {
    let mut out = Mat::zeros(rows, cols);
    for i in 0..rows {
        let r0 = i * src.rows / rows;
        let r1 = (((i + 1) * src.rows) / rows).max(r0 + 1).min(src.rows);
        for j in 0..cols {
            let c0 = j * src.cols / cols;
            let c1 = (((j + 1) * src.cols) / cols).max(c0 + 1).min(src.cols);
            let mut acc = 0.0;
            for r in r0..r1 {
                for c in c0..c1 {
                    acc += src.at(r, c);
                }
            }
            *out.at_mut(i, j) = acc / ((r1 - r0) * (c1 - c0)) as f64;
        }
    }
    out
}
