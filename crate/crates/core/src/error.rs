use thiserror::Error;

use crate::spin::Representation;
use crate::field::Gauge;

/// Failure modes of the simulation and synthesis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("degenerate eigenpair: spectral gap {gap:e} is below {threshold:e}")]
    DegenerateEigenpair { gap: f64, threshold: f64 },

    #[error("amplitude has a node near x = {x} (|beta| = {beta:e}); phase equation is singular")]
    NodeSingularity { x: f64, beta: f64 },

    #[error("underdetermined potential system at x = {x}: scalar coefficient vanishes but the phase gradient does not")]
    Underdetermined { x: f64 },

    #[error("representation mismatch: expected {expected:?}, found {found:?}")]
    RepresentationMismatch {
        expected: Representation,
        found: Representation,
    },

    #[error("gauge mismatch: expected {expected:?}, found {found:?}")]
    GaugeMismatch { expected: Gauge, found: Gauge },

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("target amplitude below guard threshold at x = {x}")]
    AmplitudeGuard { x: f64 },

    #[error("state is under-resolved: spectral weight fraction {fraction:e} above 0.8 Nyquist exceeds {limit:e}")]
    Unresolved { fraction: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
