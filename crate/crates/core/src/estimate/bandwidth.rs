//! Occupied-bandwidth estimation from a PSD by -3 dB crossings.

use serde::Serialize;

use crate::estimate::welch::PsdEstimate;
use crate::{Error, Result};

/// Raw -3 dB bandwidth and its MHz-rounded form.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BandwidthEstimate {
    pub hz: f64,
    pub rounded_mhz: f64,
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values[values.len() / 2]
}

/// 5-bin median smoothing, edges clamped.
fn median_smooth(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(2);
            let hi = (i + 3).min(n);
            let mut w: Vec<f64> = values[lo..hi].to_vec();
            median(&mut w)
        })
        .collect()
}

/// Estimate the occupied bandwidth as `f_high - f_low`, the outermost
/// crossings of (band peak - 3 dB), located by linear interpolation between
/// bins after 5-bin median smoothing.
///
/// Requires an identifiable occupied band: the smoothed peak must sit at
/// least 10 dB above the median floor.
pub fn estimate_bandwidth(psd: &PsdEstimate) -> Result<BandwidthEstimate> {
    let smoothed = median_smooth(&psd.values);
    let peak = smoothed.iter().cloned().fold(f64::MIN, f64::max);
    let floor = {
        let mut v = smoothed.clone();
        median(&mut v)
    };
    let peak_over_floor_db = 10.0 * (peak / floor.max(1e-300)).log10();
    if !(peak_over_floor_db >= 10.0) {
        return Err(Error::NoOccupiedBand { peak_over_floor_db });
    }

    // -3 dB in power: half the peak.
    let threshold = peak / 2.0;
    let first = smoothed.iter().position(|&v| v >= threshold).unwrap();
    let last = smoothed.iter().rposition(|&v| v >= threshold).unwrap();

    // Interpolate the crossing just outside each outermost in-band bin.
    let f_low = if first == 0 {
        psd.freq_hz(0)
    } else {
        let a = smoothed[first - 1];
        let b = smoothed[first];
        let t = (threshold - a) / (b - a);
        psd.freq_hz(first - 1) + t * psd.bin_spacing_hz
    };
    let f_high = if last == smoothed.len() - 1 {
        psd.freq_hz(last)
    } else {
        let a = smoothed[last];
        let b = smoothed[last + 1];
        let t = (a - threshold) / (a - b);
        psd.freq_hz(last) + t * psd.bin_spacing_hz
    };

    let hz = f_high - f_low;
    Ok(BandwidthEstimate {
        hz,
        rounded_mhz: (hz / 1e6).round(),
    })
}
