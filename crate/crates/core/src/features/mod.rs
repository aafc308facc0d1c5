//! The two feature extractors: time-frequency images via STFT, and reduced
//! ZC cross-correlation stacks via segment selection, matched correlation,
//! reshape, and column-max reduction.

pub mod io;
pub mod segments;
pub mod stack;
pub mod stft;
pub mod template;
pub mod xcorr;

pub use segments::{select_segments, ReductionConfig};
pub use stack::{extract_zc_stack, reduce, ZcFeature};
pub use stft::{stft_tfi, StftConfig, TfiImage};
pub use template::{build_zc_template, registry_templates, ZcTemplate};
pub use xcorr::{zc_xcorr, zc_xcorr_direct};
