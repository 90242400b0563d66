use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gap::ElementSet;
use crate::numeric::Density;
use crate::walks::{difference_pmf, generalized_value, walk_pmf, Limits, Pmf, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Selection {
    #[serde(with = "crate::serial::int")]
    pub v0: i64,
    /// `P_mu(remaining . v0^{[k^2]}; Q)`.
    #[serde(with = "crate::serial::ratio")]
    pub score: BigRational,
    /// `P_mu(removed . remaining; Q)`, which the score must dominate.
    #[serde(with = "crate::serial::ratio")]
    pub baseline: BigRational,
}

/// Picks `v0` among the distinct values of `removed` maximizing
/// `P_mu(remaining . v0^{[m]}; Q)` with `m = |removed|`; ties go to the smaller `|v0|`, then
/// the smaller `v0`. Fails with an inconsistency if the best score falls below
/// `P_mu(removed . remaining; Q)`.
pub fn select_step_value(
    removed: &[i64],
    remaining: &[i64],
    qset: &ElementSet,
    mu: Density,
    limits: &Limits,
) -> Result<Selection> {
    if removed.is_empty() {
        return Err(Error::domain("no removed coordinates to select from"));
    }
    let diff = difference_pmf(qset)?;
    let whole: Vec<i64> = removed.iter().chain(remaining).copied().collect();
    let walk = walk_pmf(&Word::from_i64s(&whole), mu, limits)?;
    let baseline = generalized_value(&walk, &diff, mu, limits.support_cap)?;
    select_with_baseline(removed, remaining, &diff, &baseline, removed.len(), mu, limits)
}

pub(super) fn select_against(
    removed: &[i64],
    remaining: &[i64],
    diff: &Pmf,
    baseline: &BigRational,
    k: u64,
    mu: Density,
    limits: &Limits,
) -> Result<Selection> {
    select_with_baseline(removed, remaining, diff, baseline, (k * k) as usize, mu, limits)
}

fn select_with_baseline(
    removed: &[i64],
    remaining: &[i64],
    diff: &Pmf,
    baseline: &BigRational,
    copies: usize,
    mu: Density,
    limits: &Limits,
) -> Result<Selection> {
    let rest = walk_pmf(&Word::from_i64s(remaining), mu, limits)?;
    let mut candidates: Vec<i64> = removed.iter().copied().collect::<ElementSet>().elements().to_vec();
    candidates.sort_by_key(|&c| (c.unsigned_abs(), c));
    let scores: Vec<BigRational> = candidates
        .par_iter()
        .map(|&c| {
            // v0^{[m]} is folded into the difference side, which keeps the large walk fixed
            let rep = walk_pmf(&Word::new(vec![BigInt::from(c); copies]), mu, limits)?;
            let side = rep.convolve(diff, limits.support_cap)?;
            generalized_value(&rest, &side, mu, limits.support_cap)
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for i in 1..candidates.len() {
        if scores[i] > scores[best] {
            best = i;
        }
    }
    let score = scores[best].clone();
    if score < *baseline {
        return Err(Error::Inconsistency(format!(
            "best candidate score {score} is below P(v^i; Q_i) = {baseline}"
        )));
    }
    Ok(Selection {
        v0: candidates[best],
        score,
        baseline: baseline.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    #[test]
    fn single_candidate() {
        let s = select_step_value(&[5; 4], &[1, 2], &ElementSet::from_iter([0]), Density::HALF, &Limits::default())
            .unwrap();
        assert_eq!(s.v0, 5);
        assert_eq!(s.score, s.baseline);
    }

    #[test]
    fn two_candidates_are_scored_exactly() {
        // with nothing remaining both candidates give the same single-step walk
        let s = select_step_value(&[1, 2], &[], &ElementSet::from_iter([0]), Density::HALF, &Limits::default())
            .unwrap();
        assert_eq!(s.v0, 1);
        assert_eq!(s.score, rat(6, 16));
        assert_eq!(s.baseline, rat(4, 16));
    }

    #[test]
    fn tie_prefers_negative_only_after_magnitude() {
        let s = select_step_value(&[3, -3, 2], &[], &ElementSet::from_iter([0]), Density::HALF, &Limits::default())
            .unwrap();
        assert_eq!(s.v0, 2);
        let s = select_step_value(&[3, -3], &[], &ElementSet::from_iter([0]), Density::HALF, &Limits::default())
            .unwrap();
        assert_eq!(s.v0, -3);
    }

    #[test]
    fn above_one_half_uses_the_full_maximum() {
        let s = select_step_value(&[1, 2], &[3], &ElementSet::from_iter([0, 1]), Density::ONE, &Limits::default())
            .unwrap();
        assert!(s.score >= s.baseline);
    }
}
