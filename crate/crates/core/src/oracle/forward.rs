use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::RatioRecord;
use crate::error::{Error, Result};
use crate::gap::Gap;
use crate::numeric::{floor_sqrt, Density};
use crate::walks::{concentration_with, Limits, Word};

/// Outcome of `P_mu(v) >= 1 / (2 |Q_t|)` with `t = sqrt(2 d mu n)`.
#[derive(Clone, Debug, Serialize)]
pub struct ForwardWitness {
    #[serde(with = "crate::serial::ratio")]
    pub p: BigRational,
    /// `|Q_t|` with `floor(t N_j)` computed exactly.
    pub size_exact: usize,
    /// `|Q_{ceil(t)}|`.
    pub size_ceil: usize,
    pub t_ceil: u64,
    pub passed_exact: bool,
    pub passed_ceil: bool,
    /// `P` against `1 / (2 |Q_t|)`.
    pub record: RatioRecord,
}

impl ForwardWitness {
    pub fn passed(&self) -> bool {
        self.passed_exact && self.passed_ceil
    }
}

/// Each coordinate `x_j` of the walk has variance at most `mu n N_j^2`, so Markov's inequality
/// puts the walk in `Q_t` with probability at least `1/2` when `t^2 = 2 d mu n`; pigeonholing
/// over `Q_t` gives the bound.
pub fn forward_lo_witness(q: &Gap, v: &Word, mu: Density, limits: &Limits) -> Result<ForwardWitness> {
    let guard = limits.enumeration_guard;
    let set = q.enumerate(guard)?;
    for x in v.entries() {
        if !x.to_i64().is_some_and(|y| set.contains(y)) {
            return Err(Error::domain(format!("{x} is not an element of {q}")));
        }
    }
    let n = v.len();
    let d = q.rank();
    let t2 = BigRational::from_integer(BigInt::from(2 * d * n)) * mu.to_ratio();

    // floor(t N_j) = floor(sqrt(t^2 N_j^2))
    let (mut dims, mut steps) = (Vec::new(), Vec::new());
    for (nj, &w) in q.dims().iter().zip(q.steps()) {
        let f = floor_sqrt(&(&t2 * nj * nj));
        if !f.is_zero() {
            dims.push(BigRational::from_integer(BigInt::from(f)));
            steps.push(w);
        }
    }
    let size_exact = Gap::new(dims, steps)?.enumerate(guard)?.len();
    let root = floor_sqrt(&t2).to_u64().ok_or_else(|| Error::Overflow("t".into()))?;
    let t_ceil = if BigRational::from_integer(BigInt::from(root * root)) == t2 {
        root
    } else {
        root + 1
    };
    let size_ceil = if t_ceil == 0 {
        1
    } else {
        q.dilate(&BigRational::from_integer(BigInt::from(t_ceil)))
            .enumerate(guard)?
            .len()
    };

    let p = concentration_with(v, mu, limits)?.value;
    let bound = |size: usize| BigRational::new(1.into(), BigInt::from(2 * size));
    let record = RatioRecord::new(
        format!("forward({q},n={n},mu={mu})"),
        p.clone(),
        bound(size_exact),
    )?;
    Ok(ForwardWitness {
        passed_exact: p >= bound(size_exact),
        passed_ceil: p >= bound(size_ceil),
        p,
        size_exact,
        size_ceil,
        t_ceil,
        record,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    #[test]
    fn unit_interval_with_four_steps() {
        let q = Gap::from_ints(&[1], &[1]).unwrap();
        let w = forward_lo_witness(&q, &Word::from_i64s(&[1, 1, 1, 1]), Density::ONE, &Limits::default()).unwrap();
        assert_eq!(w.size_exact, 5);
        assert_eq!(w.p, rat(6, 16));
        assert_eq!(w.record.right, rat(1, 10));
        assert_eq!(w.t_ceil, 3);
        assert!(w.passed());
    }

    #[test]
    fn rank_zero_gap() {
        let w = forward_lo_witness(&Gap::zero(), &Word::from_i64s(&[0, 0, 0]), Density::HALF, &Limits::default())
            .unwrap();
        assert_eq!((w.p.clone(), w.size_exact), (rat(1, 1), 1));
        assert!(w.passed());
    }

    #[test]
    fn element_outside_the_gap_is_rejected() {
        let q = Gap::from_ints(&[1], &[2]).unwrap();
        let err = forward_lo_witness(&q, &Word::from_i64s(&[2, 1]), Density::ONE, &Limits::default()).unwrap_err();
        assert!(matches!(err, Error::Domain(m) if m.contains('1')));
    }
}
