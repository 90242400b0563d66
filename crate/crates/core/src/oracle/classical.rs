use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::Result;
use crate::numeric::{binomial, Density};
use crate::walks::{concentration_with, Limits, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErdosCheck {
    /// `binom(n, floor(n/2)) / 2^n`.
    #[serde(with = "crate::serial::ratio")]
    pub bound: BigRational,
    pub passed: bool,
    pub equality: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassicalReport {
    pub n: usize,
    /// `P_1(v)`.
    #[serde(with = "crate::serial::ratio")]
    pub p: BigRational,
    /// Present when every entry is nonzero.
    pub erdos: Option<ErdosCheck>,
    /// `(P_1(v) n^{3/2})^2 = P_1(v)^2 n^3`, present when the entries are distinct.
    #[serde(with = "crate::serial::ratio_opt")]
    pub distinct_ratio_squared: Option<BigRational>,
    /// `P_1(v) n^{3/2}` in floating point, for display only.
    pub distinct_ratio_approx: Option<f64>,
    pub nonzero: usize,
}

impl ClassicalReport {
    pub fn passed(&self) -> bool {
        self.erdos.as_ref().is_none_or(|e| e.passed)
    }
}

pub fn classical_bounds_check(v: &Word, limits: &Limits) -> Result<ClassicalReport> {
    let n = v.len();
    let p = concentration_with(v, Density::ONE, limits)?.value;
    let nonzero = v.entries().iter().filter(|x| !x.is_zero()).count();
    let erdos = (nonzero == n).then(|| {
        let bound = BigRational::new(
            BigInt::from(binomial(n as u64, n as u64 / 2)),
            BigInt::from(1) << n,
        );
        ErdosCheck {
            passed: p <= bound,
            equality: p == bound,
            bound,
        }
    });
    let distinct = v.entries().iter().collect::<BTreeSet<_>>().len() == n;
    let distinct_ratio_squared = distinct.then(|| &p * &p * BigRational::from_integer(BigInt::from(n).pow(3)));
    let distinct_ratio_approx = distinct.then(|| p.to_f64().unwrap_or(f64::NAN) * (n as f64).powf(1.5));
    Ok(ClassicalReport {
        n,
        p,
        erdos,
        distinct_ratio_squared,
        distinct_ratio_approx,
        nonzero,
    })
}

/// When `P_1(v) >= k^{-1/2}`, the number of nonzero entries relative to `k`.
#[derive(Clone, Debug, Serialize)]
pub struct ErdosInverseRecord {
    pub k: u64,
    pub applies: bool,
    pub nonzero: usize,
    #[serde(with = "crate::serial::ratio_opt")]
    pub nonzero_over_k: Option<BigRational>,
}

pub fn erdos_inverse_record(v: &Word, k: u64, limits: &Limits) -> Result<ErdosInverseRecord> {
    let p = concentration_with(v, Density::ONE, limits)?.value;
    // P >= k^{-1/2}  <=>  P^2 k >= 1
    let applies = &p * &p * BigRational::from_integer(BigInt::from(k)) >= BigRational::from_integer(1.into());
    let nonzero = v.entries().iter().filter(|x| !x.is_zero()).count();
    Ok(ErdosInverseRecord {
        k,
        applies,
        nonzero,
        nonzero_over_k: applies.then(|| BigRational::new(BigInt::from(nonzero), BigInt::from(k))),
    })
}
