//! Lazy random walks over the integers and their concentration probabilities.
//!
//! A step `v` with density `mu = p/q` contributes weight `2(q - p)` at `0` and
//! `p` at each of `+v` and `-v`, over the base `2q`. A walk of `n` steps is
//! therefore a vector of big-integer counts over `(2q)^n`, and every
//! probability the crate reports is an exact rational derived from it.

mod pmf;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gap::ElementSet;
use crate::numeric::{ratio_from_u, Density};

pub use pmf::Pmf;

/// Size limits shared by the exact engines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Maximum number of distinct points in any intermediate distribution.
    pub support_cap: usize,
    /// Maximum volume (or pair count) of any enumeration.
    pub enumeration_guard: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            support_cap: 10_000_000,
            enumeration_guard: 10_000_000,
        }
    }
}

/// Ordered sequence of integer steps `v_1 ... v_n`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word(#[serde(with = "crate::serial::bigint_vec")] Vec<BigInt>);

impl Word {
    pub fn new(entries: Vec<BigInt>) -> Self {
        Word(entries)
    }

    pub fn from_i64s(entries: &[i64]) -> Self {
        Word(entries.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn entries(&self) -> &[BigInt] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `self` followed by `other`.
    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(&other.0).cloned().collect())
    }

    /// `self^{[k]}`: `k` copies of the word, concatenated.
    pub fn repeat(&self, k: usize) -> Word {
        Word(self.0.iter().cloned().cycle().take(self.0.len() * k).collect())
    }

    /// Entries as `i64`, failing on the first entry outside that range.
    pub fn to_i64s(&self) -> Result<Vec<i64>> {
        self.0
            .iter()
            .map(|x| {
                x.to_i64()
                    .ok_or_else(|| Error::Overflow(format!("word entry {x}")))
            })
            .collect()
    }

    pub fn permuted(&self, order: &[usize]) -> Word {
        Word(order.iter().map(|&i| self.0[i].clone()).collect())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<i64>> for Word {
    fn from(v: Vec<i64>) -> Self {
        Word::from_i64s(&v)
    }
}

/// Exact distribution of `S^mu(v)`: counts over `base^power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkDistribution {
    base: u64,
    power: usize,
    pmf: Pmf,
}

impl WalkDistribution {
    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn power(&self) -> usize {
        self.power
    }

    pub fn denominator(&self) -> &BigUint {
        self.pmf.denom()
    }

    /// Nonzero counts in ascending order of the point.
    pub fn counts(&self) -> Vec<(BigInt, BigUint)> {
        self.pmf.entries()
    }

    pub fn count_at(&self, x: &BigInt) -> BigUint {
        self.pmf.weight_at(x)
    }

    pub fn probability_at(&self, x: &BigInt) -> BigRational {
        ratio_from_u(&self.pmf.weight_at(x), self.pmf.denom())
    }

    pub fn support_len(&self) -> usize {
        self.pmf.support_len()
    }

    pub fn pmf(&self) -> &Pmf {
        &self.pmf
    }

    pub fn into_pmf(self) -> Pmf {
        self.pmf
    }

    /// Assembles a distribution from explicit counts (used by the oracles).
    pub fn from_counts<I>(base: u64, power: usize, counts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BigInt, BigUint)>,
    {
        let denom = BigUint::from(base).pow(power as u32);
        Ok(WalkDistribution {
            base,
            power,
            pmf: Pmf::from_weights(counts, denom)?,
        })
    }
}

impl Serialize for WalkDistribution {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            base: u64,
            power: usize,
            denominator: String,
            support_len: usize,
            /// `[point, count]` pairs in increasing order of the point.
            counts: Vec<[String; 2]>,
        }
        Repr {
            base: self.base,
            power: self.power,
            denominator: self.pmf.denom().to_string(),
            support_len: self.pmf.support_len(),
            counts: self
                .counts()
                .into_iter()
                .map(|(x, c)| [x.to_string(), c.to_string()])
                .collect(),
        }
        .serialize(s)
    }
}

/// Maximum point mass and every point attaining it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConcentrationResult {
    #[serde(with = "crate::serial::ratio")]
    pub value: BigRational,
    #[serde(with = "crate::serial::bigint_vec")]
    pub witnesses: Vec<BigInt>,
}

impl ConcentrationResult {
    fn from_pmf(pmf: &Pmf) -> Self {
        let (w, at) = pmf.max_weight();
        ConcentrationResult {
            value: ratio_from_u(&w, pmf.denom()),
            witnesses: at,
        }
    }
}

/// Iterated exact convolution of the lazy steps, in input order.
pub fn walk_pmf(v: &Word, mu: Density, limits: &Limits) -> Result<Pmf> {
    let mut pmf = Pmf::point(&BigInt::from(0));
    for (i, x) in v.entries().iter().enumerate() {
        pmf = pmf.lazy_step(x, mu, limits.support_cap, i + 1)?;
    }
    Ok(pmf)
}

pub fn walk_distribution(v: &Word, mu: Density) -> Result<WalkDistribution> {
    walk_distribution_with(v, mu, &Limits::default())
}

pub fn walk_distribution_with(v: &Word, mu: Density, limits: &Limits) -> Result<WalkDistribution> {
    Ok(WalkDistribution {
        base: mu.base(),
        power: v.len(),
        pmf: walk_pmf(v, mu, limits)?,
    })
}

/// `P_mu(v)`: the largest point mass of the walk.
pub fn concentration(v: &Word, mu: Density) -> Result<ConcentrationResult> {
    concentration_with(v, mu, &Limits::default())
}

pub fn concentration_with(v: &Word, mu: Density, limits: &Limits) -> Result<ConcentrationResult> {
    Ok(ConcentrationResult::from_pmf(&walk_pmf(v, mu, limits)?))
}

/// Distribution of `q - q'` for independent uniform `q, q'` in `qset`.
pub fn difference_pmf(qset: &ElementSet) -> Result<Pmf> {
    let elems = qset.elements();
    if elems.is_empty() {
        return Err(Error::domain("the set Q must be nonempty"));
    }
    let size = BigUint::from(elems.len());
    let mut counts = std::collections::BTreeMap::<i64, u64>::new();
    for &a in elems {
        for &b in elems {
            let d = a
                .checked_sub(b)
                .ok_or_else(|| Error::Overflow(format!("difference {a} - {b}")))?;
            *counts.entry(d).or_default() += 1;
        }
    }
    Pmf::from_weights(
        counts
            .into_iter()
            .map(|(k, c)| (BigInt::from(k), BigUint::from(c))),
        &size * &size,
    )
}

/// Distribution of `S^mu(v) + q - q'`, whose largest mass is `P_mu(v; Q)`.
pub fn generalized_pmf(v: &Word, mu: Density, qset: &ElementSet, limits: &Limits) -> Result<Pmf> {
    let diff = difference_pmf(qset)?;
    walk_pmf(v, mu, limits)?.convolve(&diff, limits.support_cap)
}

/// `P_mu(v; Q) = sup_a P(S^mu(v) = a + q - q')` with `q, q'` uniform on the distinct elements of `Q`.
pub fn generalized_concentration(v: &Word, mu: Density, qset: &ElementSet) -> Result<ConcentrationResult> {
    generalized_concentration_with(v, mu, qset, &Limits::default())
}

pub fn generalized_concentration_with(
    v: &Word,
    mu: Density,
    qset: &ElementSet,
    limits: &Limits,
) -> Result<ConcentrationResult> {
    Ok(ConcentrationResult::from_pmf(&generalized_pmf(v, mu, qset, limits)?))
}

/// `P_mu(v; Q)` from the walk and the difference distribution of `Q`.
///
/// For `mu <= 1/2` both factors have nonnegative Fourier transforms, so the
/// maximum of the convolution sits at `0` and only that point is evaluated.
pub fn generalized_value(walk: &Pmf, diff: &Pmf, mu: Density, cap: usize) -> Result<BigRational> {
    let denom = walk.denom() * diff.denom();
    if mu.at_most_half() {
        let w = walk.convolved_weight_at(diff, &BigInt::from(0));
        return Ok(ratio_from_u(&w, &denom));
    }
    let (w, _) = walk.convolve(diff, cap)?.max_weight();
    Ok(ratio_from_u(&w, &denom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn counts(d: &WalkDistribution) -> Vec<(i64, u64)> {
        d.counts()
            .into_iter()
            .map(|(k, c)| (k.to_i64().unwrap(), c.to_u64().unwrap()))
            .collect()
    }

    #[test]
    fn empty_word_is_a_point_mass() {
        let d = walk_distribution(&Word::default(), Density::new(1, 3).unwrap()).unwrap();
        assert_eq!(counts(&d), vec![(0, 1)]);
        assert_eq!(d.denominator(), &BigUint::from(1u32));
    }

    #[test]
    fn single_half_lazy_step() {
        let d = walk_distribution(&Word::from_i64s(&[1]), Density::HALF).unwrap();
        assert_eq!(d.base(), 4);
        assert_eq!(counts(&d), vec![(-1, 1), (0, 2), (1, 1)]);
    }

    #[test]
    fn two_fair_steps_enumerate_sign_patterns() {
        let d = walk_distribution(&Word::from_i64s(&[1, 2]), Density::ONE).unwrap();
        assert_eq!(d.denominator(), &BigUint::from(4u32));
        assert_eq!(counts(&d), vec![(-3, 1), (-1, 1), (1, 1), (3, 1)]);
    }

    #[test]
    fn concentration_extremes() {
        let zero = concentration(&Word::from_i64s(&[0, 0, 0]), Density::ONE).unwrap();
        assert_eq!(zero.value, rat(1, 1));
        assert_eq!(zero.witnesses, vec![b(0)]);

        let dissociated = concentration(&Word::from_i64s(&[1, 2, 4, 8]), Density::ONE).unwrap();
        assert_eq!(dissociated.value, rat(1, 16));

        let c = concentration(&Word::from_i64s(&[1, 1, 2]), Density::ONE).unwrap();
        assert_eq!(c.value, rat(2, 8));
        assert_eq!(c.witnesses, vec![b(-2), b(0), b(2)]);
    }

    #[test]
    fn generalized_concentration_examples() {
        let q01 = ElementSet::from_iter([0, 1]);
        let g = generalized_concentration(&Word::from_i64s(&[1]), Density::ONE, &q01).unwrap();
        assert_eq!(g.value, rat(1, 4));
        assert_eq!(g.witnesses, vec![b(-1), b(0), b(1)]);

        let e = generalized_concentration(&Word::default(), Density::ONE, &q01).unwrap();
        assert_eq!(e.value, rat(1, 2));
        assert_eq!(e.witnesses, vec![b(0)]);

        let v = Word::from_i64s(&[3, -1, 4, 1]);
        let mu = Density::new(2, 3).unwrap();
        let single = generalized_concentration(&v, mu, &ElementSet::from_iter([17])).unwrap();
        assert_eq!(single, concentration(&v, mu).unwrap());

        assert!(generalized_concentration(&v, mu, &ElementSet::from_iter([])).is_err());
    }

    #[test]
    fn support_cap_is_enforced() {
        let limits = Limits {
            support_cap: 10,
            ..Limits::default()
        };
        let err = walk_distribution_with(&Word::from_i64s(&[1, 2, 4, 8]), Density::ONE, &limits).unwrap_err();
        assert!(matches!(err, Error::SupportCap { prefix: 4, .. }));
    }
}
