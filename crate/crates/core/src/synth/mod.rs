//! Labeled, protocol-faithful synthetic captures: OFDM downlink frames with
//! ZC-bearing preamble symbols, FHSS uplink bursts, multipath, burst
//! interference, distance attenuation, and calibrated noise.

pub mod capture_gen;
pub mod channel;
pub mod fhss;
pub mod ofdm;
pub mod profile;
pub mod registry;

pub use capture_gen::{frame_active_mask, synth_capture};
pub use channel::add_awgn;
pub use fhss::gen_fhss;
pub use ofdm::build_ofdm_frame;
pub use profile::{
    CaptureRequest, DistanceClass, DroneProfile, FhssPlan, InterferenceSpec, ZcPlacement,
};
