//! Blind estimation of OFDM modulation parameters from a capture: Welch
//! power spectral density, -3 dB bandwidth, grid resolution to (N, B), and
//! auto-correlation-based subcarrier-count estimation.

pub mod autocorr;
pub mod bandwidth;
pub mod grid;
pub mod welch;

pub use autocorr::{autocorr, estimate_subcarrier_count, AutocorrResult, LagRange};
pub use bandwidth::{estimate_bandwidth, BandwidthEstimate};
pub use grid::{resolve_grid, GridEstimate, DEFAULT_CANDIDATES, DEFAULT_SPACING_HZ};
pub use welch::{welch_psd, PsdEstimate, WelchConfig};
