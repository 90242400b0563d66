use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gap::{difference_set, intersection, sumset, ElementSet, Gap};
use crate::numeric::{rat, Density};
use crate::walks::{generalized_concentration_with, Limits, Word};

/// Exact left and right sides of an inequality whose constant is unspecified.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RatioRecord {
    pub instance: String,
    #[serde(with = "crate::serial::ratio")]
    pub left: BigRational,
    #[serde(with = "crate::serial::ratio")]
    pub right: BigRational,
    #[serde(with = "crate::serial::ratio")]
    pub ratio: BigRational,
}

impl RatioRecord {
    pub fn new(instance: impl Into<String>, left: BigRational, right: BigRational) -> Result<Self> {
        if !right.is_positive() {
            return Err(Error::domain(format!("ratio with nonpositive right side {right}")));
        }
        Ok(RatioRecord {
            instance: instance.into(),
            ratio: &left / &right,
            left,
            right,
        })
    }
}

fn size(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// The two exact inequalities behind the intersection lemma for GAPs `P` and `Q`.
#[derive(Clone, Debug, Serialize)]
pub struct IntersectionRecord {
    /// `|P + Q| |P cap Q| <= |2P| |2Q|`.
    pub ruzsa_lhs: usize,
    pub ruzsa_rhs: usize,
    pub ruzsa_ok: bool,
    /// `|A| |B| <= |(A - A) cap (B - B)| |A + B|` with `A = P_{1/2}`, `B = Q_{1/2}`.
    pub lower_lhs: usize,
    pub lower_rhs: usize,
    pub lower_ok: bool,
    /// `|P cap Q| |P + Q| / (|P| |Q|)`.
    pub record: RatioRecord,
}

impl IntersectionRecord {
    pub fn passed(&self) -> bool {
        self.ruzsa_ok && self.lower_ok
    }
}

pub fn intersection_inequalities(p: &Gap, q: &Gap, guard: usize) -> Result<IntersectionRecord> {
    let ps = p.enumerate(guard)?;
    let qs = q.enumerate(guard)?;
    let sum = sumset(&ps, &qs, guard)?;
    let common = intersection(&ps, &qs);
    let pp = sumset(&ps, &ps, guard)?;
    let qq = sumset(&qs, &qs, guard)?;
    let ruzsa_lhs = sum.len() * common.len();
    let ruzsa_rhs = pp.len() * qq.len();

    let half = rat(1, 2);
    let a = p.dilate(&half).enumerate(guard)?;
    let b = q.dilate(&half).enumerate(guard)?;
    let aa = difference_set(&a, &a, guard)?;
    let bb = difference_set(&b, &b, guard)?;
    let lower_lhs = a.len() * b.len();
    let lower_rhs = intersection(&aa, &bb).len() * sumset(&a, &b, guard)?.len();

    let record = RatioRecord::new(
        format!("intersection({p};{q})"),
        size(common.len() * sum.len()),
        size(ps.len() * qs.len()),
    )?;
    Ok(IntersectionRecord {
        ruzsa_lhs,
        ruzsa_rhs,
        ruzsa_ok: ruzsa_lhs <= ruzsa_rhs,
        lower_lhs,
        lower_rhs,
        lower_ok: lower_lhs <= lower_rhs,
        record,
    })
}

/// Inputs of the random-walk comparison `P(v v0^{[k^2]}; Q) << P(v; Q + [-k, k] v0)`.
#[derive(Clone, Debug)]
pub struct ComparisonCase {
    pub v: Word,
    pub v0: i64,
    pub k: u64,
    pub qset: ElementSet,
    pub mu: Density,
}

pub fn comparison_ratio(case: &ComparisonCase, limits: &Limits) -> Result<RatioRecord> {
    let k = case.k as usize;
    let long = case.v.concat(&Word::from_i64s(&vec![case.v0; k * k]));
    let left = generalized_concentration_with(&long, case.mu, &case.qset, limits)?.value;
    let kk = case.k as i64;
    let line: ElementSet = (-kk..=kk).map(|j| j * case.v0).collect();
    let grown = sumset(&case.qset, &line, limits.enumeration_guard)?;
    let right = generalized_concentration_with(&case.v, case.mu, &grown, limits)?.value;
    RatioRecord::new(
        format!("comparison(n={},v0={},k={},|Q|={},mu={})", case.v.len(), case.v0, case.k, case.qset.len(), case.mu),
        left,
        right,
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub intersection: IntersectionRecord,
    pub comparison: Option<RatioRecord>,
}

pub fn sandwich_and_comparison_ratios(
    p: &Gap,
    q: &Gap,
    comparison: Option<&ComparisonCase>,
    limits: &Limits,
) -> Result<SandwichReport> {
    Ok(SandwichReport {
        intersection: intersection_inequalities(p, q, limits.enumeration_guard)?,
        comparison: comparison.map(|c| comparison_ratio(c, limits)).transpose()?,
    })
}

/// Nearest-rank percentiles of exact values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Percentiles {
    pub count: usize,
    #[serde(with = "crate::serial::ratio")]
    pub min: BigRational,
    #[serde(with = "crate::serial::ratio")]
    pub p25: BigRational,
    #[serde(with = "crate::serial::ratio")]
    pub median: BigRational,
    #[serde(with = "crate::serial::ratio")]
    pub p75: BigRational,
    #[serde(with = "crate::serial::ratio")]
    pub max: BigRational,
}

pub fn percentiles(values: &[BigRational]) -> Option<Percentiles> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort();
    let n = sorted.len();
    let at = |p: usize| sorted[((p * n).div_ceil(100)).clamp(1, n) - 1].clone();
    Some(Percentiles {
        count: n,
        min: sorted[0].clone(),
        p25: at(25),
        median: at(50),
        p75: at(75),
        max: sorted[n - 1].clone(),
    })
}

/// Whether every value stays within a factor of the first one, in both directions.
#[derive(Clone, Debug, Serialize)]
pub struct Trend {
    #[serde(with = "crate::serial::ratio")]
    pub baseline: BigRational,
    #[serde(with = "crate::serial::ratio")]
    pub min_relative: BigRational,
    #[serde(with = "crate::serial::ratio")]
    pub max_relative: BigRational,
    #[serde(with = "crate::serial::ratio")]
    pub factor: BigRational,
    pub passed: bool,
    pub min_relative_approx: f64,
    pub max_relative_approx: f64,
}

pub fn trend_within(values: &[BigRational], factor: &BigRational) -> Result<Trend> {
    let baseline = values
        .first()
        .filter(|b| b.is_positive())
        .ok_or_else(|| Error::domain("trend needs a positive first value"))?
        .clone();
    let rel: Vec<BigRational> = values.iter().map(|x| x / &baseline).collect();
    let min_relative = rel.iter().min().expect("nonempty").clone();
    let max_relative = rel.iter().max().expect("nonempty").clone();
    let passed = max_relative <= *factor && &min_relative * factor >= BigRational::from_integer(1.into());
    Ok(Trend {
        min_relative_approx: min_relative.to_f64().unwrap_or(f64::NAN),
        max_relative_approx: max_relative.to_f64().unwrap_or(f64::NAN),
        baseline,
        min_relative,
        max_relative,
        factor: factor.clone(),
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_intervals() {
        let p = Gap::from_ints(&[2], &[1]).unwrap();
        let r = intersection_inequalities(&p, &p, 1 << 20).unwrap();
        assert_eq!((r.record.left.clone(), r.record.right.clone()), (rat(45, 1), rat(25, 1)));
        assert_eq!(r.record.ratio, rat(9, 5));
        assert_eq!((r.ruzsa_lhs, r.ruzsa_rhs), (45, 81));
        assert!(r.passed());
    }

    #[test]
    fn trivial_gap_against_anything() {
        let q = Gap::from_ints(&[3, 2], &[1, 10]).unwrap();
        let r = intersection_inequalities(&Gap::zero(), &q, 1 << 20).unwrap();
        assert_eq!(r.record.ratio, rat(1, 1));
        assert!(r.passed());
    }

    #[test]
    fn single_step_comparison() {
        let case = ComparisonCase {
            v: Word::from_i64s(&[1]),
            v0: 1,
            k: 1,
            qset: ElementSet::from_iter([0]),
            mu: Density::HALF,
        };
        let r = comparison_ratio(&case, &Limits::default()).unwrap();
        assert_eq!(r.left, rat(6, 16));
        assert_eq!(r.right, rat(5, 18));
        assert_eq!(r.ratio, rat(27, 20));
    }

    #[test]
    fn percentile_ranks() {
        let v: Vec<_> = (1..=8).map(|i| rat(i, 1)).collect();
        let p = percentiles(&v).unwrap();
        assert_eq!((p.min, p.p25, p.median, p.p75, p.max), (rat(1, 1), rat(2, 1), rat(4, 1), rat(6, 1), rat(8, 1)));
        assert!(percentiles(&[]).is_none());
    }

    #[test]
    fn trend_in_both_directions() {
        let t = trend_within(&[rat(2, 1), rat(3, 1), rat(1, 1)], &rat(2, 1)).unwrap();
        assert!(t.passed);
        let t = trend_within(&[rat(2, 1), rat(5, 1)], &rat(2, 1)).unwrap();
        assert!(!t.passed);
        let t = trend_within(&[rat(2, 1), rat(9, 10)], &rat(2, 1)).unwrap();
        assert!(!t.passed);
    }
}
