//! Exact forward and inverse Littlewood-Offord computations over the integers.
//!
//! The crate is organised around five modules:
//!
//! * [`walks`] computes lazy random walk distributions and (generalized)
//!   concentration probabilities with exact big-integer counts.
//! * [`gap`] handles symmetric generalized arithmetic progressions: enumeration,
//!   volume, dilation, properness, extension and proper embedding.
//! * [`inverse`] runs the GAP-growing inverse algorithm, refines good elements
//!   into certificates and verifies every postcondition of its output.
//! * [`oracle`] holds independent brute-force and analytic cross-checks.
//! * [`instances`] generates the deterministic instance families used in sweeps.
//!
//! No floating point is used outside [`oracle::fourier`]; every inequality is
//! decided by exact integer or rational comparison.

pub mod check;
pub mod error;
pub mod gap;
pub mod instances;
pub mod inverse;
pub mod numeric;
pub mod oracle;
pub mod serial;
pub mod walks;

pub use error::{Error, Result};
pub use gap::{ElementSet, Gap};
pub use numeric::Density;
pub use walks::{ConcentrationResult, Limits, Pmf, WalkDistribution, Word};
