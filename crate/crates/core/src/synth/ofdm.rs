//! OFDM frame construction at the native grid rate.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::dsp::fft;
use crate::synth::profile::DroneProfile;
use crate::zc::{self, ZcSpec};
use crate::{Error, Result};

/// Centered subcarrier indices `[c_min, c_max]` of the occupied region
/// (DC included). The virtual subcarriers split asymmetrically when their
/// count is odd, with the extra one on the negative-frequency side.
pub fn occupied_range(n: usize, occupied: usize) -> (i64, i64) {
    let o = occupied as i64;
    debug_assert!(o >= 1 && o <= n as i64);
    let c_max = (o - 1) / 2;
    let c_min = c_max - (o - 1);
    (c_min, c_max)
}

/// Map a centered subcarrier index to a DFT bin.
pub fn centered_to_bin(c: i64, n: usize) -> usize {
    ((c.rem_euclid(n as i64)) as usize) % n
}

/// Centered indices carrying a ZC sequence: the central occupied bins with
/// DC punctured. Entry `i` of the sequence goes to index `i - h - 1` for
/// `i <= h` and `i - h` above, where `h = (L-1)/2`; for L = 63 this is the
/// familiar `[-32..-1] u [1..31]` preamble layout.
pub fn zc_subcarrier_indices(len: usize) -> Vec<i64> {
    let h = (len as i64 - 1) / 2;
    (0..len as i64)
        .map(|i| if i <= h { i - h - 1 } else { i - h })
        .collect()
}

/// Fill a length-N frequency grid with a ZC sequence on the central
/// occupied bins (DC null), leaving every other bin zero.
pub fn zc_frequency_grid(spec: ZcSpec, n: usize, occupied: usize) -> Result<Vec<Complex64>> {
    let seq = zc::generate_zc(spec);
    let (c_min, c_max) = occupied_range(n, occupied);
    let indices = zc_subcarrier_indices(seq.len());
    if indices[0] < c_min || *indices.last().unwrap() > c_max {
        return Err(Error::ZcDoesNotFitGrid {
            zc_len: seq.len(),
            occupied,
        });
    }
    let mut grid = vec![Complex64::new(0.0, 0.0); n];
    for (v, &c) in seq.iter().zip(&indices) {
        grid[centered_to_bin(c, n)] = *v;
    }
    Ok(grid)
}

/// OFDM symbol body in time domain: inverse transform of the grid, scaled
/// to unit mean power.
pub fn ofdm_symbol(grid: &[Complex64]) -> Vec<Complex64> {
    let n = grid.len();
    let mut core = fft::inverse(grid).expect("non-empty grid");
    let occupied_power: f64 = grid.iter().map(|g| g.norm_sqr()).sum();
    if occupied_power > 0.0 {
        let scale = n as f64 / occupied_power.sqrt();
        for v in core.iter_mut() {
            *v *= scale;
        }
    }
    core
}

/// Symbol body with the cyclic prefix prepended.
fn modulate_symbol(grid: &[Complex64], cp: usize) -> Vec<Complex64> {
    let core = ofdm_symbol(grid);
    let n = core.len();
    let mut sym = Vec::with_capacity(n + cp);
    sym.extend_from_slice(&core[n - cp..]);
    sym.extend_from_slice(&core);
    sym
}

/// Build one frame at the native rate B: `symbols_per_frame` CP-prefixed
/// symbols, ZC-bearing symbols per the profile's placements, the rest
/// carrying seeded random QPSK payloads on every occupied bin except DC.
pub fn build_ofdm_frame(profile: &DroneProfile, seed: u64) -> Result<Vec<Complex64>> {
    profile.validate()?;
    let n = profile.subcarriers;
    let occupied = profile.occupied_bins();
    let (c_min, c_max) = occupied_range(n, occupied);
    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    // Pre-map roots to the symbols that carry them.
    let mut zc_by_symbol: Vec<Option<ZcSpec>> = vec![None; profile.symbols_per_frame];
    for placement in &profile.zc_roots {
        for &s in &placement.symbol_indices {
            zc_by_symbol[s] = Some(placement.spec);
        }
    }

    let mut frame = Vec::with_capacity(profile.frame_len_native());
    for (sym_idx, &cp) in profile.cp_plan.iter().enumerate() {
        let grid = match zc_by_symbol[sym_idx] {
            Some(spec) => zc_frequency_grid(spec, n, occupied)?,
            None => {
                let mut grid = vec![Complex64::new(0.0, 0.0); n];
                let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
                for c in c_min..=c_max {
                    if c == 0 {
                        continue; // null DC
                    }
                    let re = if rng.gen::<bool>() { inv_sqrt2 } else { -inv_sqrt2 };
                    let im = if rng.gen::<bool>() { inv_sqrt2 } else { -inv_sqrt2 };
                    grid[centered_to_bin(c, n)] = Complex64::new(re, im);
                }
                grid
            }
        };
        frame.extend(modulate_symbol(&grid, cp));
    }
    Ok(frame)
}
