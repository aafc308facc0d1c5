//! Complex baseband captures and their on-disk format.
//!
//! A capture is stored as little-endian interleaved 32-bit float I/Q pairs,
//! with a JSON sidecar (same path plus `.json`) recording the sample rate,
//! label codes, SNR, seed, and profile name. Raw I/Q files without a sidecar
//! can be loaded by supplying the sample rate.

use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Labels and provenance for a synthesized capture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureMeta {
    /// Profile name the capture was synthesized from ("T0000" for the
    /// background class).
    pub profile: String,
    /// Drone-type label code (Table-style bit string, e.g. "T0010").
    pub type_label: String,
    /// Distance label code: "D00", "D01", or "D10".
    pub distance_label: String,
    /// Requested signal-to-noise ratio in dB.
    pub snr_db: f64,
    /// Seed the capture was generated from.
    pub seed: u64,
    /// Sample rate in Hz.
    pub sample_rate_hz: f64,
    /// Number of complex samples.
    pub num_samples: usize,
}

/// A complex baseband sample sequence with its sample rate and, when known,
/// provenance metadata.
#[derive(Debug, Clone)]
pub struct SignalCapture {
    pub samples: Vec<Complex64>,
    pub sample_rate_hz: f64,
    pub meta: Option<CaptureMeta>,
}

impl SignalCapture {
    pub fn new(samples: Vec<Complex64>, sample_rate_hz: f64) -> Self {
        Self {
            samples,
            sample_rate_hz,
            meta: None,
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration_s(&self) -> f64 {
        self.samples.len() as f64 / self.sample_rate_hz
    }

    /// Sidecar path for a given capture path.
    pub fn sidecar_path(path: &Path) -> PathBuf {
        let mut s = path.as_os_str().to_owned();
        s.push(".json");
        PathBuf::from(s)
    }

    /// Write interleaved f32 I/Q plus the JSON sidecar when metadata is set.
    pub fn save(&self, path: &Path) -> Result<()> {
        let file = fs::File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut w = BufWriter::new(file);
        let mut buf = Vec::with_capacity(self.samples.len() * 8);
        for s in &self.samples {
            buf.extend_from_slice(&(s.re as f32).to_le_bytes());
            buf.extend_from_slice(&(s.im as f32).to_le_bytes());
        }
        w.write_all(&buf)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        w.flush()
            .map_err(|e| Error::io(path.display().to_string(), e))?;

        if let Some(meta) = &self.meta {
            let sidecar = Self::sidecar_path(path);
            let json = serde_json::to_string_pretty(meta)
                .map_err(|e| Error::json("capture sidecar", e))?;
            fs::write(&sidecar, json).map_err(|e| Error::io(sidecar.display().to_string(), e))?;
        }
        Ok(())
    }

    /// Load a capture and its sidecar.
    pub fn load(path: &Path) -> Result<Self> {
        let sidecar = Self::sidecar_path(path);
        let json = fs::read_to_string(&sidecar)
            .map_err(|e| Error::io(sidecar.display().to_string(), e))?;
        let meta: CaptureMeta =
            serde_json::from_str(&json).map_err(|e| Error::json("capture sidecar", e))?;
        let mut cap = Self::load_raw(path, meta.sample_rate_hz)?;
        cap.meta = Some(meta);
        Ok(cap)
    }

    /// Load unlabeled raw I/Q at a caller-supplied sample rate.
    pub fn load_raw(path: &Path, sample_rate_hz: f64) -> Result<Self> {
        let file = fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut r = BufReader::new(file);
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        let n = bytes.len() / 8;
        let mut samples = Vec::with_capacity(n);
        for chunk in bytes.chunks_exact(8) {
            let re = f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]) as f64;
            let im = f32::from_le_bytes([chunk[4], chunk[5], chunk[6], chunk[7]]) as f64;
            samples.push(Complex64::new(re, im));
        }
        Ok(Self::new(samples, sample_rate_hz))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_with_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.iq");
        let mut cap = SignalCapture::new(
            vec![Complex64::new(0.5, -0.25), Complex64::new(-1.0, 2.0)],
            10e6,
        );
        cap.meta = Some(CaptureMeta {
            profile: "T0010".into(),
            type_label: "T0010".into(),
            distance_label: "D00".into(),
            snr_db: 5.0,
            seed: 42,
            sample_rate_hz: 10e6,
            num_samples: 2,
        });
        cap.save(&path).unwrap();

        let loaded = SignalCapture::load(&path).unwrap();
        assert_eq!(loaded.len(), 2);
        assert_eq!(loaded.sample_rate_hz, 10e6);
        assert_eq!(loaded.meta, cap.meta);
        for (a, b) in loaded.samples.iter().zip(&cap.samples) {
            assert!((a - b).norm() < 1e-7); // f32 storage
        }
    }

    #[test]
    fn raw_load_without_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.iq");
        let cap = SignalCapture::new(vec![Complex64::new(1.0, 0.0); 16], 1e6);
        cap.save(&path).unwrap();
        let loaded = SignalCapture::load_raw(&path, 2e6).unwrap();
        assert_eq!(loaded.len(), 16);
        assert_eq!(loaded.sample_rate_hz, 2e6);
        assert!(loaded.meta.is_none());
    }
}
