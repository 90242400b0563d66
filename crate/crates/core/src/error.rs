use num_bigint::BigUint;
use num_rational::BigRational;
use thiserror::Error;

use crate::gap::Gap;
use crate::inverse::TraceStep;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("walk support reached {size} points after the first {prefix} steps (cap {cap})")]
    SupportCap { prefix: usize, size: usize, cap: usize },

    #[error("enumeration of volume {volume} exceeds the guard of {guard} points")]
    EnumerationGuard { volume: BigUint, guard: usize },

    /// Generic size limit for exhaustive oracles and sumsets.
    #[error("resource limit: {0}")]
    Resource(String),

    #[error("value does not fit in 64-bit arithmetic: {0}")]
    Overflow(String),

    #[error("precondition failed: P = {p} is below the threshold {threshold}")]
    Precondition { p: BigRational, threshold: String },

    #[error("inverse algorithm did not stop within {limit} steps")]
    Divergence { limit: usize, trace: Vec<TraceStep> },

    #[error("proper embedding failed: {reason}")]
    Embed {
        reason: String,
        best: Option<Gap>,
        trace: Vec<TraceStep>,
    },

    #[error("containment check failed: {element} times {scale} is not in the {dilation}-dilate of {gap}")]
    Containment {
        element: i64,
        scale: u64,
        dilation: BigRational,
        gap: Gap,
    },

    /// An exact inequality that a theorem guarantees came out false.
    #[error("internal consistency violated: {0}")]
    Inconsistency(String),
}

impl Error {
    /// True for errors caused by a size guard or cap rather than by the input.
    pub fn is_resource(&self) -> bool {
        matches!(
            self,
            Error::SupportCap { .. } | Error::EnumerationGuard { .. } | Error::Resource(_) | Error::Overflow(_)
        )
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
