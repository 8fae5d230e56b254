use thiserror::Error;

use crate::scalar::Backend;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("backend mismatch: {0} vs {1}")]
    BackendMismatch(Backend, Backend),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("unsupported ambient dimension {0} (expected 1 or 2)")]
    UnsupportedDimension(usize),
    #[error("cannot parse number {text:?}: {reason}")]
    Parse { text: String, reason: String },
    #[error("angle {0} degrees has no exact rational cosine; use a float backend")]
    InexactTrig(String),
    #[error("map is not contracting (ratio {0})")]
    NonContracting(String),
    #[error("invalid word: index {index} but the system has {maps} maps")]
    InvalidIndex { index: usize, maps: usize },
    #[error("{name} = {value} outside {range}")]
    OutOfRange {
        name: &'static str,
        value: String,
        range: &'static str,
    },
    #[error("empty point cloud")]
    EmptyCloud,
    #[error("cloud resolution {resolution} too coarse for rho {rho} (need resolution <= rho/2)")]
    CloudTooCoarse { resolution: f64, rho: f64 },
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("operation requires the exact backend: {0}")]
    RequiresExact(&'static str),
    #[error("operation requires ambient dimension {need}, got {got}")]
    RequiresDimension { need: usize, got: usize },
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("witness sequence exhausted: {0}")]
    WitnessesExhausted(String),
    #[error("resolution infeasible: {0}")]
    Infeasible(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
