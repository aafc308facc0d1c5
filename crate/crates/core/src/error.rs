//! Crate-wide error type.
//!
//! One enum covers every module so errors compose across the synthesis,
//! estimation, feature, and training pipelines without conversion noise.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sequence")]
    EmptySequence,

    #[error("invalid ratio: p={p}, q={q}")]
    InvalidRatio { p: usize, q: usize },

    #[error("root out of range: u={u} for length {len}")]
    RootOutOfRange { u: u32, len: u32 },

    #[error("non-coprime root: gcd({u}, {len}) = {gcd}")]
    NonCoprimeRoot { u: u32, len: u32, gcd: u32 },

    #[error("even length not supported: {len}")]
    EvenZcLength { len: u32 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("ZC does not fit grid: sequence length {zc_len} exceeds {occupied} occupied bins")]
    ZcDoesNotFitGrid { zc_len: usize, occupied: usize },

    #[error("hop out of band: {hop_hz} Hz beyond Nyquist {nyquist_hz} Hz")]
    HopOutOfBand { hop_hz: f64, nyquist_hz: f64 },

    #[error("capture too short: {got} samples, need at least {need}")]
    CaptureTooShort { got: usize, need: usize },

    #[error("capture shorter than segment: {capture} < {segment}")]
    CaptureShorterThanSegment { capture: usize, segment: usize },

    #[error("capture shorter than window: {capture} < {window}")]
    CaptureShorterThanWindow { capture: usize, window: usize },

    #[error("no occupied band: peak only {peak_over_floor_db:.1} dB above median floor")]
    NoOccupiedBand { peak_over_floor_db: f64 },

    #[error("unresolvable grid: no candidate N admits occupied fraction in [{lo}, {hi}]")]
    UnresolvableGrid { lo: f64, hi: f64 },

    #[error("window too long: N_up={n_up} >= capture length {len}")]
    WindowTooLong { n_up: usize, len: usize },

    #[error("no credible peak: lag {m_star} is {distance:.1} samples from nearest hypothesis {expected:.1}")]
    NoCrediblePeak {
        m_star: usize,
        distance: f64,
        expected: f64,
    },

    #[error("segments exceed capture: U*V = {needed} > L = {len}")]
    SegmentsExceedCapture { needed: usize, len: usize },

    #[error("template longer than segment: {template} > {segment}")]
    TemplateTooLong { template: usize, segment: usize },

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },

    #[error("alpha out of range: {alpha}")]
    AlphaOutOfRange { alpha: f64 },

    #[error("label is not one-hot")]
    NotOneHot,

    #[error("divergence: loss became non-finite at epoch {epoch}, batch {batch}")]
    Divergence { epoch: usize, batch: usize },

    #[error("unknown algorithm: {0}")]
    UnknownAlgorithm(String),

    #[error("unknown profile: {0}")]
    UnknownProfile(String),

    #[error("invalid profile: {0}")]
    InvalidProfile(String),

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("checkpoint format: {0}")]
    CheckpointFormat(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {source}")]
    Json {
        context: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// Attach path context to an IO error.
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// Attach context to a JSON (de)serialization error.
    pub fn json(context: impl Into<String>, source: serde_json::Error) -> Self {
        Error::Json {
            context: context.into(),
            source,
        }
    }
}
