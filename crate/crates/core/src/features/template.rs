//! Matched ZC templates: the locally reconstructed, resampled OFDM symbols
//! correlated against captures.

use num_complex::Complex64;

use crate::dsp::{self, resample_rational};
use crate::synth::capture_gen::rational_rate_ratio;
use crate::synth::ofdm::{ofdm_symbol, zc_frequency_grid};
use crate::synth::profile::DroneProfile;
use crate::synth::registry;
use crate::zc::ZcSpec;
use crate::{Error, Result, Scale};

/// One class's matched template at the capture rate.
#[derive(Debug, Clone)]
pub struct ZcTemplate {
    /// Type label of the class this template identifies.
    pub label: String,
    pub spec: ZcSpec,
    /// Unit-energy samples, length ceil(N * f_s / B).
    pub samples: Vec<Complex64>,
}

/// Reconstruct the ZC-bearing OFDM symbol of one of the profile's roots
/// (frequency mapping identical to synthesis, no CP), resample it from the
/// native grid rate to `sample_rate_hz`, and normalize to unit energy.
pub fn build_zc_template(
    profile: &DroneProfile,
    root_index: usize,
    sample_rate_hz: f64,
) -> Result<ZcTemplate> {
    let placement = profile.zc_roots.get(root_index).ok_or_else(|| {
        Error::InvalidConfig(format!(
            "root index {root_index} outside {} roots of {}",
            profile.zc_roots.len(),
            profile.name
        ))
    })?;
    let grid = zc_frequency_grid(placement.spec, profile.subcarriers, profile.occupied_bins())?;
    let symbol = ofdm_symbol(&grid);
    let (p, q) = rational_rate_ratio(sample_rate_hz, profile.grid_bandwidth_hz)?;
    let mut samples = resample_rational(&symbol, p, q)?;
    let energy = dsp::energy(&samples);
    if energy > 0.0 {
        let scale = 1.0 / energy.sqrt();
        for v in samples.iter_mut() {
            *v *= scale;
        }
    }
    Ok(ZcTemplate {
        label: profile.name.clone(),
        spec: placement.spec,
        samples,
    })
}

/// Templates for the eight drone classes' primary roots, in registry order.
pub fn registry_templates(scale: Scale, sample_rate_hz: f64) -> Result<Vec<ZcTemplate>> {
    registry::builtin_profiles(scale)
        .iter()
        .filter(|p| !p.is_background())
        .map(|p| build_zc_template(p, 0, sample_rate_hz))
        .collect()
}
