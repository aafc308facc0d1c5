//! Per-class protocol descriptions and capture requests.

use serde::{Deserialize, Serialize};

use crate::zc::ZcSpec;
use crate::{Error, Result};

/// Flight-distance classes with their range in meters.
///
/// Amplitude scale is 1/d with d the range midpoint, normalized so D00 = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistanceClass {
    D00,
    D01,
    D10,
}

impl DistanceClass {
    pub fn code(&self) -> &'static str {
        match self {
            DistanceClass::D00 => "D00",
            DistanceClass::D01 => "D01",
            DistanceClass::D10 => "D10",
        }
    }

    /// Midpoint of the class range: 20-40, 40-80, 80-150 m.
    pub fn midpoint_m(&self) -> f64 {
        match self {
            DistanceClass::D00 => 30.0,
            DistanceClass::D01 => 60.0,
            DistanceClass::D10 => 115.0,
        }
    }

    /// Amplitude factor relative to D00.
    pub fn amplitude_scale(&self) -> f64 {
        DistanceClass::D00.midpoint_m() / self.midpoint_m()
    }

    pub fn parse(code: &str) -> Result<Self> {
        match code {
            "D00" => Ok(DistanceClass::D00),
            "D01" => Ok(DistanceClass::D01),
            "D10" => Ok(DistanceClass::D10),
            other => Err(Error::InvalidRequest(format!(
                "unknown distance class {other}"
            ))),
        }
    }
}

/// One ZC root and the frame symbol indices that carry it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZcPlacement {
    pub spec: ZcSpec,
    pub symbol_indices: Vec<usize>,
}

/// Frequency-hopping plan for the uplink component.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FhssPlan {
    /// Dwell per hop in seconds.
    pub dwell_s: f64,
    /// Swept bandwidth of each burst in Hz (0 gives a pure tone).
    pub hop_bandwidth_hz: f64,
    /// Hop center frequencies in Hz (baseband offsets).
    pub hops_hz: Vec<f64>,
    /// Burst power in dB relative to the OFDM component.
    pub relative_power_db: f64,
}

/// Burst-interference model parameters. Zero rate means a clean channel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterferenceSpec {
    pub burst_rate_per_s: f64,
    pub burst_bandwidth_hz: f64,
    pub burst_duration_s: f64,
    /// Burst power in dB relative to the signal's active power.
    pub burst_power_db: f64,
}

impl InterferenceSpec {
    pub fn none() -> Self {
        Self {
            burst_rate_per_s: 0.0,
            burst_bandwidth_hz: 0.0,
            burst_duration_s: 0.0,
            burst_power_db: 0.0,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.burst_rate_per_s <= 0.0
    }

    pub fn validate(&self) -> Result<()> {
        if self.burst_rate_per_s < 0.0
            || self.burst_bandwidth_hz < 0.0
            || self.burst_duration_s < 0.0
        {
            return Err(Error::InvalidRequest(
                "interference fields must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

/// Protocol description of one drone class: OFDM grid, CP plan, ZC roots,
/// FHSS plan, and label code.
///
/// The background class ("T0000") is represented by a profile with zero
/// OFDM symbols, no ZC roots, and no FHSS plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DroneProfile {
    /// Profile name, also its type label code.
    pub name: String,
    /// Total subcarriers N (power of two).
    pub subcarriers: usize,
    /// Virtual (unmodulated edge) subcarriers N_v.
    pub virtual_subcarriers: usize,
    /// Full-grid bandwidth B in Hz; the native sample rate of the frame.
    pub grid_bandwidth_hz: f64,
    /// OFDM symbols per frame (zero for the background class).
    pub symbols_per_frame: usize,
    /// Per-symbol cyclic-prefix lengths in native samples.
    pub cp_plan: Vec<usize>,
    /// ZC roots and the symbols that carry them; index 0 is the primary
    /// root used for the class's matched template.
    pub zc_roots: Vec<ZcPlacement>,
    /// Optional uplink frequency-hopping component.
    pub fhss: Option<FhssPlan>,
    /// Frame repetition period in seconds.
    pub frame_period_s: f64,
}

impl DroneProfile {
    pub fn is_background(&self) -> bool {
        self.symbols_per_frame == 0
    }

    /// Occupied subcarriers, DC included.
    pub fn occupied_bins(&self) -> usize {
        self.subcarriers - self.virtual_subcarriers
    }

    /// Subcarrier spacing in Hz.
    pub fn subcarrier_spacing_hz(&self) -> f64 {
        self.grid_bandwidth_hz / self.subcarriers as f64
    }

    /// Frame length in native samples: sum of N + cp over the plan.
    pub fn frame_len_native(&self) -> usize {
        self.cp_plan
            .iter()
            .map(|cp| self.subcarriers + cp)
            .sum()
    }

    /// Primary ZC root backing this class's matched template.
    pub fn primary_root(&self) -> Option<ZcSpec> {
        self.zc_roots.first().map(|p| p.spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.is_background() {
            if !self.zc_roots.is_empty() || !self.cp_plan.is_empty() {
                return Err(Error::InvalidProfile(
                    "background profile cannot carry symbols or roots".into(),
                ));
            }
            if self.frame_period_s <= 0.0 {
                return Err(Error::InvalidProfile("frame period must be positive".into()));
            }
            return Ok(());
        }
        let n = self.subcarriers;
        if !n.is_power_of_two() {
            return Err(Error::InvalidProfile(format!(
                "subcarrier count {n} is not a power of 2"
            )));
        }
        if self.virtual_subcarriers == 0 || self.virtual_subcarriers >= n {
            return Err(Error::InvalidProfile(format!(
                "virtual subcarriers {} outside (0, {n})",
                self.virtual_subcarriers
            )));
        }
        if self.cp_plan.len() != self.symbols_per_frame {
            return Err(Error::InvalidProfile(format!(
                "cp plan length {} != symbols per frame {}",
                self.cp_plan.len(),
                self.symbols_per_frame
            )));
        }
        if self.grid_bandwidth_hz <= 0.0 {
            return Err(Error::InvalidProfile("grid bandwidth must be positive".into()));
        }
        let occupied = self.occupied_bins();
        for placement in &self.zc_roots {
            ZcSpec::new(placement.spec.root, placement.spec.len)?;
            // Mapping excludes DC, so the sequence plus the DC bin must fit.
            if placement.spec.len as usize + 1 > occupied {
                return Err(Error::ZcDoesNotFitGrid {
                    zc_len: placement.spec.len as usize,
                    occupied,
                });
            }
            for &s in &placement.symbol_indices {
                if s >= self.symbols_per_frame {
                    return Err(Error::InvalidProfile(format!(
                        "ZC symbol index {s} outside frame of {}",
                        self.symbols_per_frame
                    )));
                }
            }
        }
        let frame_s = self.frame_len_native() as f64 / self.grid_bandwidth_hz;
        if self.frame_period_s < frame_s {
            return Err(Error::InvalidProfile(format!(
                "frame period {:.6}s shorter than frame {:.6}s",
                self.frame_period_s, frame_s
            )));
        }
        Ok(())
    }
}

/// Flat CP plan: the same prefix length for every symbol.
pub fn cp_plan_flat(symbols: usize, cp: usize) -> Vec<usize> {
    vec![cp; symbols]
}

/// LTE-style CP plan: first symbol extended (N/4), remainder normal (N/16).
pub fn cp_plan_lte(symbols: usize, fft_size: usize) -> Vec<usize> {
    (0..symbols)
        .map(|k| if k == 0 { fft_size / 4 } else { fft_size / 16 })
        .collect()
}

/// Everything needed to synthesize one labeled capture.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaptureRequest {
    pub profile: DroneProfile,
    pub sample_rate_hz: f64,
    pub duration_s: f64,
    pub snr_db: f64,
    pub distance: DistanceClass,
    pub interference: InterferenceSpec,
    pub seed: u64,
}

impl CaptureRequest {
    pub fn validate(&self) -> Result<()> {
        self.profile.validate()?;
        self.interference.validate()?;
        if !self.profile.is_background() && self.sample_rate_hz < self.profile.grid_bandwidth_hz {
            return Err(Error::InvalidRequest(format!(
                "sample rate {} below grid bandwidth {}",
                self.sample_rate_hz, self.profile.grid_bandwidth_hz
            )));
        }
        if !(-30.0..=30.0).contains(&self.snr_db) {
            return Err(Error::InvalidRequest(format!(
                "snr {} dB outside [-30, 30]",
                self.snr_db
            )));
        }
        let samples = (self.duration_s * self.sample_rate_hz) as usize;
        let need = (self.profile.frame_period_s * self.sample_rate_hz) as usize;
        if samples < need {
            return Err(Error::CaptureTooShort {
                got: samples,
                need,
            });
        }
        Ok(())
    }
}
