//! Window functions for spectral estimation and time-frequency analysis.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Window shape.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    Hann,
    Rectangular,
}

/// A window of a given kind and length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub kind: WindowKind,
    pub len: usize,
}

impl WindowSpec {
    pub fn new(kind: WindowKind, len: usize) -> Result<Self> {
        if len < 2 {
            return Err(Error::InvalidConfig(format!(
                "window length must be >= 2, got {len}"
            )));
        }
        Ok(Self { kind, len })
    }

    pub fn hann(len: usize) -> Result<Self> {
        Self::new(WindowKind::Hann, len)
    }

    pub fn rectangular(len: usize) -> Result<Self> {
        Self::new(WindowKind::Rectangular, len)
    }

    /// Evaluate the window. Values are in [0, 1]; the symmetric hann form is
    /// used, so its endpoints are exactly zero.
    pub fn values(&self) -> Vec<f64> {
        match self.kind {
            WindowKind::Rectangular => vec![1.0; self.len],
            WindowKind::Hann => {
                let m = (self.len - 1) as f64;
                (0..self.len)
                    .map(|n| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * n as f64 / m).cos()))
                    .collect()
            }
        }
    }

    /// Sum of squared window values, the power-compensation factor used by
    /// the Welch estimator.
    pub fn power_sum(&self) -> f64 {
        self.values().iter().map(|w| w * w).sum()
    }
}
