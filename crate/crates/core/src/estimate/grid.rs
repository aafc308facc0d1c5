//! Resolution of a raw bandwidth estimate to the full OFDM grid.

use serde::Serialize;

use crate::{Error, Result};

/// Default candidate grid sizes at paper scale.
pub const DEFAULT_CANDIDATES: [usize; 4] = [512, 1024, 2048, 4096];

/// Default subcarrier spacing family (15 kHz).
pub const DEFAULT_SPACING_HZ: f64 = 15e3;

/// Admissible occupied fraction of the grid. Generalizes the worked
/// 1201/2048 ~ 0.586 example: typical OFDM designs fill between half and
/// three quarters of the grid.
pub const FILL_RANGE: (f64, f64) = (0.5, 0.75);

/// A raw bandwidth estimate resolved to total subcarriers, virtual
/// subcarriers, and full-grid bandwidth.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GridEstimate {
    /// Raw -3 dB bandwidth the resolution started from, Hz.
    pub b_hat_v_hz: f64,
    /// Occupied subcarriers (data + DC).
    pub occupied_bins: usize,
    /// Total subcarriers N (a power of two from the candidate set).
    pub n_hat: usize,
    /// Virtual subcarriers N - occupied.
    pub n_v_hat: usize,
    /// Full-grid bandwidth N * spacing, Hz.
    pub b_hat_hz: f64,
}

/// Resolve a refined bandwidth estimate against a subcarrier-spacing family.
///
/// `occupied = round(b_hat_v / spacing)`; the selected candidate N is the
/// one whose implied occupied fraction falls in [`FILL_RANGE`] (an exact
/// full-grid match, occupied == N, is accepted as the degenerate no-virtual
/// case). Candidates whose full-grid bandwidth exceeds the sample rate are
/// excluded.
pub fn resolve_grid(
    b_hat_v_hz: f64,
    sample_rate_hz: f64,
    candidates: &[usize],
    spacing_hz: f64,
) -> Result<GridEstimate> {
    if candidates.is_empty() {
        return Err(Error::InvalidConfig("empty candidate set".into()));
    }
    if spacing_hz <= 0.0 || b_hat_v_hz <= 0.0 {
        return Err(Error::InvalidConfig(format!(
            "bandwidth {b_hat_v_hz} and spacing {spacing_hz} must be positive"
        )));
    }
    let occupied = (b_hat_v_hz / spacing_hz).round() as usize;
    let (lo, hi) = FILL_RANGE;

    let mut sorted: Vec<usize> = candidates.to_vec();
    sorted.sort_unstable();
    let mut chosen = None;
    for &n in &sorted {
        if n as f64 * spacing_hz > sample_rate_hz {
            continue;
        }
        if occupied == n {
            chosen = Some(n);
            break;
        }
        let fill = occupied as f64 / n as f64;
        if fill >= lo && fill <= hi {
            chosen = Some(n);
            break;
        }
    }
    let n_hat = chosen.ok_or(Error::UnresolvableGrid { lo, hi })?;

    Ok(GridEstimate {
        b_hat_v_hz,
        occupied_bins: occupied,
        n_hat,
        n_v_hat: n_hat - occupied,
        b_hat_hz: n_hat as f64 * spacing_hz,
    })
}
