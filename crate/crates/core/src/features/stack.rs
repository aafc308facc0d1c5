//! Data reduction of correlation sequences and the stacked per-root feature.

use rayon::prelude::*;

use crate::capture::SignalCapture;
use crate::features::segments::{select_segments, ReductionConfig};
use crate::features::template::ZcTemplate;
use crate::features::xcorr::{correlate_spectra, padded_forward};
use crate::mat::Mat;
use crate::{Error, Result};

/// The reduced cross-correlation feature stack: one row of length V1 per
/// registry root, rows in fixed registry order.
#[derive(Debug, Clone)]
pub struct ZcFeature {
    pub stack: Mat,
}

/// Row-major reshape of `gamma_re` to U1 x V1 followed by a column-wise
/// max; output length V1. The column max preserves every prominent peak
/// while compressing the sequence by a factor of five.
pub fn reduce(gamma_re: &[f64], cfg: &ReductionConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    if gamma_re.len() != cfg.reduced_len() {
        return Err(Error::LengthMismatch {
            left: gamma_re.len(),
            right: cfg.reduced_len(),
        });
    }
    let u1 = cfg.u1();
    let v1 = cfg.v1();
    let mut out = vec![f64::MIN; v1];
    for r in 0..u1 {
        let row = &gamma_re[r * v1..(r + 1) * v1];
        for (o, &v) in out.iter_mut().zip(row) {
            if v > *o {
                *o = v;
            }
        }
    }
    Ok(out)
}

/// Correlate every registry template against the same seeded segments and
/// stack the reduced vectors in registry order (8 x V1).
///
/// Segment spectra are computed once and shared across roots; roots then
/// reduce in parallel.
pub fn extract_zc_stack(
    capture: &SignalCapture,
    templates: &[ZcTemplate],
    cfg: &ReductionConfig,
) -> Result<ZcFeature> {
    if templates.is_empty() {
        return Err(Error::InvalidConfig("empty template registry".into()));
    }
    let n_up = templates[0].samples.len();
    if templates.iter().any(|t| t.samples.len() != n_up) {
        return Err(Error::InvalidConfig(
            "registry templates must share one length".into(),
        ));
    }
    if n_up > cfg.segment_len {
        return Err(Error::TemplateTooLong {
            template: n_up,
            segment: cfg.segment_len,
        });
    }
    let offsets = select_segments(capture.len(), cfg)?;
    let m = (cfg.segment_len + n_up).next_power_of_two();

    let segment_spectra: Vec<Vec<num_complex::Complex64>> = offsets
        .iter()
        .map(|&o| padded_forward(&capture.samples[o..o + cfg.segment_len], m))
        .collect();

    let rows: Vec<Vec<f64>> = templates
        .par_iter()
        .map(|t| {
            let template_spec = padded_forward(&t.samples, m);
            let mut gamma = Vec::with_capacity(cfg.reduced_len());
            for seg in &segment_spectra {
                gamma.extend(correlate_spectra(&template_spec, seg, cfg.segment_len, m));
            }
            reduce(&gamma, cfg)
        })
        .collect::<Result<_>>()?;

    Ok(ZcFeature {
        stack: Mat::from_rows(rows),
    })
}
