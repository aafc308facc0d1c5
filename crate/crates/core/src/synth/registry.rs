//! Built-in class registry: eight drone profiles plus the background class.
//!
//! The desk-scale family divides every rate by ten (f_s = 10 MHz, N = 256,
//! B = 3.072 MHz) so tests run in seconds; the paper-scale family uses the
//! full 100 MHz / 2048-subcarrier grid. Three classes (T0001, T0110, T1000)
//! share an occupied bandwidth and hop plan, so their time-frequency images
//! look alike and only their ZC roots separate them; the rest differ in
//! both.

use crate::synth::profile::{cp_plan_lte, DroneProfile, FhssPlan, ZcPlacement};
use crate::zc::ZcSpec;
use crate::Scale;

/// Label code of the background (noise + interference only) class.
pub const BACKGROUND_LABEL: &str = "T0000";

/// Number of classes including background.
pub const NUM_CLASSES: usize = 9;

/// Symbols per frame for every built-in profile.
const SYMBOLS_PER_FRAME: usize = 15;

struct ClassParams {
    name: &'static str,
    occupied_desk: usize,
    occupied_paper: usize,
    zc_len_desk: u32,
    zc_len_paper: u32,
    hops_mhz_desk: &'static [f64],
    dwell_ms: f64,
}

const CLASSES: [ClassParams; 8] = [
    ClassParams {
        name: "T0001",
        occupied_desk: 150,
        occupied_paper: 1201,
        zc_len_desk: 139,
        zc_len_paper: 1193,
        hops_mhz_desk: &[-3.0, -1.0, 1.0, 3.0],
        dwell_ms: 1.2,
    },
    ClassParams {
        name: "T0010",
        occupied_desk: 140,
        occupied_paper: 1201,
        zc_len_desk: 137,
        zc_len_paper: 839,
        hops_mhz_desk: &[-3.2, -1.6, 0.0, 1.6],
        dwell_ms: 1.5,
    },
    ClassParams {
        name: "T0011",
        occupied_desk: 130,
        occupied_paper: 1041,
        zc_len_desk: 127,
        zc_len_paper: 1031,
        hops_mhz_desk: &[-2.4, 0.0, 2.4],
        dwell_ms: 1.0,
    },
    ClassParams {
        name: "T0100",
        occupied_desk: 120,
        occupied_paper: 961,
        zc_len_desk: 113,
        zc_len_paper: 953,
        hops_mhz_desk: &[-4.0, -2.0, 2.0, 4.0],
        dwell_ms: 2.0,
    },
    ClassParams {
        name: "T0101",
        occupied_desk: 160,
        occupied_paper: 1281,
        zc_len_desk: 157,
        zc_len_paper: 1277,
        hops_mhz_desk: &[-3.6, -1.2, 1.2, 3.6],
        dwell_ms: 0.8,
    },
    ClassParams {
        name: "T0110",
        occupied_desk: 150,
        occupied_paper: 1201,
        zc_len_desk: 131,
        zc_len_paper: 1151,
        hops_mhz_desk: &[-3.0, -1.0, 1.0, 3.0],
        dwell_ms: 1.2,
    },
    ClassParams {
        name: "T0111",
        occupied_desk: 126,
        occupied_paper: 1009,
        zc_len_desk: 109,
        zc_len_paper: 997,
        hops_mhz_desk: &[-2.8, 1.4, 4.2],
        dwell_ms: 1.4,
    },
    ClassParams {
        name: "T1000",
        occupied_desk: 150,
        occupied_paper: 1201,
        zc_len_desk: 107,
        zc_len_paper: 887,
        hops_mhz_desk: &[-3.0, -1.0, 1.0, 3.0],
        dwell_ms: 1.2,
    },
];

/// Default capture sample rate for a scale.
pub fn default_sample_rate_hz(scale: Scale) -> f64 {
    match scale {
        Scale::Desk => 10e6,
        Scale::Paper => 100e6,
    }
}

/// Default capture duration for a scale. Desk captures hold 7 frames and
/// therefore 7 primary ZC-bearing symbols, matching the paper-scale count.
pub fn default_duration_s(scale: Scale) -> f64 {
    match scale {
        Scale::Desk => 21e-3,
        Scale::Paper => 0.1,
    }
}

fn grid(scale: Scale) -> (usize, f64, f64) {
    // (N, grid bandwidth Hz, frame period s)
    match scale {
        Scale::Desk => (256, 3.072e6, 3e-3),
        Scale::Paper => (2048, 30.72e6, 14e-3),
    }
}

fn drone_profile(params: &ClassParams, scale: Scale) -> DroneProfile {
    let (n, bandwidth, frame_period) = grid(scale);
    let (occupied, zc_len, hop_scale) = match scale {
        Scale::Desk => (params.occupied_desk, params.zc_len_desk, 1.0),
        Scale::Paper => (params.occupied_paper, params.zc_len_paper, 10.0),
    };
    DroneProfile {
        name: params.name.to_string(),
        subcarriers: n,
        virtual_subcarriers: n - occupied,
        grid_bandwidth_hz: bandwidth,
        symbols_per_frame: SYMBOLS_PER_FRAME,
        cp_plan: cp_plan_lte(SYMBOLS_PER_FRAME, n),
        zc_roots: vec![
            ZcPlacement {
                spec: ZcSpec::new(25, zc_len).expect("registry root"),
                symbol_indices: vec![0],
            },
            ZcPlacement {
                spec: ZcSpec::new(34, zc_len).expect("registry root"),
                symbol_indices: vec![7],
            },
        ],
        fhss: Some(FhssPlan {
            dwell_s: params.dwell_ms * 1e-3,
            hop_bandwidth_hz: 0.4e6 * hop_scale,
            hops_hz: params
                .hops_mhz_desk
                .iter()
                .map(|h| h * 1e6 * hop_scale)
                .collect(),
            relative_power_db: -3.0,
        }),
        frame_period_s: frame_period,
    }
}

/// The background class: interference and noise only.
pub fn background_profile(scale: Scale) -> DroneProfile {
    let (n, bandwidth, frame_period) = grid(scale);
    DroneProfile {
        name: BACKGROUND_LABEL.to_string(),
        subcarriers: n,
        virtual_subcarriers: 1,
        grid_bandwidth_hz: bandwidth,
        symbols_per_frame: 0,
        cp_plan: Vec::new(),
        zc_roots: Vec::new(),
        fhss: None,
        frame_period_s: frame_period,
    }
}

/// The nine built-in profiles in fixed registry order: eight drones followed
/// by the background class. The drone order fixes the row order of stacked
/// ZC features and the class indices used by the classifier.
pub fn builtin_profiles(scale: Scale) -> Vec<DroneProfile> {
    let mut out: Vec<DroneProfile> = CLASSES.iter().map(|c| drone_profile(c, scale)).collect();
    out.push(background_profile(scale));
    out
}

/// Look up a built-in profile by name.
pub fn profile_by_name(name: &str, scale: Scale) -> crate::Result<DroneProfile> {
    builtin_profiles(scale)
        .into_iter()
        .find(|p| p.name == name)
        .ok_or_else(|| crate::Error::UnknownProfile(name.to_string()))
}

/// Class index of a type label in registry order (drones 0..7, background 8).
pub fn class_index(type_label: &str) -> Option<usize> {
    CLASSES
        .iter()
        .position(|c| c.name == type_label)
        .or(if type_label == BACKGROUND_LABEL {
            Some(8)
        } else {
            None
        })
}

/// Type label for a class index in registry order.
pub fn class_label(index: usize) -> Option<&'static str> {
    if index < 8 {
        Some(CLASSES[index].name)
    } else if index == 8 {
        Some(BACKGROUND_LABEL)
    } else {
        None
    }
}
