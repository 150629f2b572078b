use alloc::string::String;

/// Errors raised by the modal solver and resonance finder.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),
    #[error("wavenumber {k} lies outside the single-mode band ({kmin}, {kmax})")]
    BandViolation { k: f64, kmin: f64, kmax: f64 },
    #[error("invalid frequency band: {0}")]
    InvalidBand(String),
    #[error("{matrix} is not positive definite")]
    NotPositiveDefinite { matrix: &'static str },
    #[error("near-singular {system} system (condition estimate {condition:e})")]
    NearSingular { system: &'static str, condition: f64 },
    #[error("root refinement failed: {0}")]
    RootNotFound(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
