//! Seeded selection of non-overlapping capture segments and the reduction
//! geometry built on them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scale};

/// Segment-selection and data-reduction geometry: U non-overlapping
/// segments of length V, reshaped to (5U) x (V/5) and column-max reduced.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ReductionConfig {
    /// Segment count U.
    pub segment_count: usize,
    /// Segment length V in samples; divisible by 5.
    pub segment_len: usize,
    pub seed: u64,
}

impl ReductionConfig {
    /// Scale defaults: U = 20 both; V = 5000 desk, 50000 paper.
    pub fn for_scale(scale: Scale, seed: u64) -> Self {
        match scale {
            Scale::Desk => Self {
                segment_count: 20,
                segment_len: 5_000,
                seed,
            },
            Scale::Paper => Self {
                segment_count: 20,
                segment_len: 50_000,
                seed,
            },
        }
    }

    /// Reduced-sample count L_re = U * V.
    pub fn reduced_len(&self) -> usize {
        self.segment_count * self.segment_len
    }

    /// Reshape rows U1 = 5U.
    pub fn u1(&self) -> usize {
        5 * self.segment_count
    }

    /// Reshape columns V1 = V / 5, the final per-root feature width.
    pub fn v1(&self) -> usize {
        self.segment_len / 5
    }

    pub fn validate(&self) -> Result<()> {
        if self.segment_count == 0 || self.segment_len == 0 {
            return Err(Error::InvalidConfig(
                "segment count and length must be positive".into(),
            ));
        }
        if self.segment_len % 5 != 0 {
            return Err(Error::InvalidConfig(format!(
                "segment length {} not divisible by 5",
                self.segment_len
            )));
        }
        Ok(())
    }
}

/// Draw U pairwise non-overlapping, V-length, ascending segment offsets
/// uniformly over the feasible placements (sorted-gap construction).
/// Deterministic per seed.
pub fn select_segments(capture_len: usize, cfg: &ReductionConfig) -> Result<Vec<usize>> {
    cfg.validate()?;
    let needed = cfg.reduced_len();
    if needed > capture_len {
        return Err(Error::SegmentsExceedCapture {
            needed,
            len: capture_len,
        });
    }
    let slack = capture_len - needed;
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut gaps: Vec<usize> = (0..cfg.segment_count)
        .map(|_| rng.gen_range(0..=slack))
        .collect();
    gaps.sort_unstable();
    Ok(gaps
        .into_iter()
        .enumerate()
        .map(|(i, g)| g + i * cfg.segment_len)
        .collect())
}
