use thiserror::Error;

/// Everything that can go wrong in a run. Variants that abort a simulation
/// carry enough context to locate the failure in space-time.
#[derive(Error, Debug)]
pub enum Error {
    /// Profile radius hit zero away from a declared axis endpoint.
    #[error("interior pinch at z = {z:.6}, t = {t:.6} without a trigger firing")]
    InteriorPinch { z: f64, t: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Stored snapshots do not span the backward parabolic window.
    #[error("window uncovered: need history back to t = {needed:.6}, have {have:.6}")]
    WindowUncovered { needed: f64, have: f64 },

    /// Candidate region has no cylinder-like graph structure over the axis.
    #[error("no graph over the axis near z = {z:.6}")]
    OffAxis { z: f64 },

    #[error("no subset of the candidate necks separates the trigger set from the thick set")]
    NoSeparatingCollection,

    /// One of the four post-surgery audits failed; aborts the run.
    #[error("surgery audit ({item}) failed: {detail}")]
    AuditFailure { item: char, detail: String },

    #[error("neck certificate rejected: deviation {deviation:.4} over window {window:.2} (need <= {bound:.4})")]
    NeckQuality {
        deviation: f64,
        window: f64,
        bound: f64,
    },

    #[error("domain too small: surface needs margin {needed:.4}, have {have:.4}")]
    DomainTooSmall { needed: f64, have: f64 },

    #[error("level-set instability at t = {t:.6}: field magnitude {magnitude:.3e}")]
    InstabilityDetected { t: f64, magnitude: f64 },

    #[error("track does not cover time {t:.6}")]
    TimeUncovered { t: f64 },

    #[error("comparison window of radius {need:.3} not covered by the track (have {have:.3})")]
    InsufficientWindow { need: f64, have: f64 },

    #[error("cap construction failed: {0}")]
    ConstructionFailed(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code classification: config problems are 2, everything else 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidParameters(_) => 2,
            _ => 1,
        }
    }
}
