//! Cross-correlation of matched templates against selected segments.
//!
//! Each segment is correlated independently with its tail zero-extended by
//! the template length, so every segment yields exactly V lags and no
//! products straddle a segment join. The frequency-domain path is the
//! default; the direct summation is kept as the reference route and the two
//! must agree within 1e-6 relative.

use num_complex::Complex64;

use crate::capture::SignalCapture;
use crate::dsp::fft;
use crate::{Error, Result};

fn validate(capture_len: usize, offsets: &[usize], segment_len: usize, template_len: usize) -> Result<()> {
    if template_len == 0 {
        return Err(Error::EmptySequence);
    }
    if template_len > segment_len {
        return Err(Error::TemplateTooLong {
            template: template_len,
            segment: segment_len,
        });
    }
    for &o in offsets {
        if o + segment_len > capture_len {
            return Err(Error::SegmentsExceedCapture {
                needed: o + segment_len,
                len: capture_len,
            });
        }
    }
    Ok(())
}

/// `gamma_re`: per segment, `gamma(m) = |sum_k y(k) * conj(x_seg(k+m))|` for
/// `m = 0..V-1`, concatenated in offset order to length U*V.
pub fn zc_xcorr(
    capture: &SignalCapture,
    offsets: &[usize],
    segment_len: usize,
    template: &[Complex64],
) -> Result<Vec<f64>> {
    validate(capture.len(), offsets, segment_len, template.len())?;
    let n_up = template.len();
    let m = (segment_len + n_up).next_power_of_two();
    let template_spec = padded_forward(template, m);

    let mut out = Vec::with_capacity(offsets.len() * segment_len);
    for &o in offsets {
        let segment_spec = padded_forward(&capture.samples[o..o + segment_len], m);
        out.extend(correlate_spectra(&template_spec, &segment_spec, segment_len, m));
    }
    Ok(out)
}

/// Forward DFT of a slice zero-padded to length `m`.
pub(crate) fn padded_forward(x: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    buf[..x.len()].copy_from_slice(x);
    fft::forward_in_place(&mut buf);
    buf
}

/// Correlation magnitudes for one segment from precomputed spectra.
pub(crate) fn correlate_spectra(
    template_spec: &[Complex64],
    segment_spec: &[Complex64],
    segment_len: usize,
    m: usize,
) -> Vec<f64> {
    let mut prod: Vec<Complex64> = template_spec
        .iter()
        .zip(segment_spec)
        .map(|(y, x)| y * x.conj())
        .collect();
    fft::inverse_in_place(&mut prod);
    // v[t] = sum_k y(k) conj(x(k-t)); gamma(m) = |v[(M-m) % M]|.
    (0..segment_len).map(|lag| prod[(m - lag) % m].norm()).collect()
}

/// Direct-summation reference for `zc_xcorr`.
pub fn zc_xcorr_direct(
    capture: &SignalCapture,
    offsets: &[usize],
    segment_len: usize,
    template: &[Complex64],
) -> Result<Vec<f64>> {
    validate(capture.len(), offsets, segment_len, template.len())?;
    let n_up = template.len();
    let mut out = Vec::with_capacity(offsets.len() * segment_len);
    for &o in offsets {
        let seg = &capture.samples[o..o + segment_len];
        for m in 0..segment_len {
            let mut acc = Complex64::new(0.0, 0.0);
            for (k, y) in template.iter().enumerate() {
                // Tail zero-extension: indices past the segment contribute
                // nothing.
                if k + m < segment_len {
                    acc += y * seg[k + m].conj();
                }
            }
            out.push(acc.norm());
        }
    }
    Ok(out)
}
