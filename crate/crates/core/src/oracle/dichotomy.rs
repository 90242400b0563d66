use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::halasz_r;
use crate::error::{Error, Result};
use crate::numeric::{approx_rational_powers, floor_rational_power, le_rational_powers, Density, PowFactor};
use crate::walks::{concentration_with, Limits, Word};

#[derive(Clone, Debug)]
pub struct DichotomyOptions {
    pub l: usize,
    pub delta: Ratio<i64>,
    pub eps: Ratio<i64>,
    /// Constant `c` of the first branch.
    pub c: BigRational,
    /// Support cap for the exact walk; past it `P(v) <= P(prefix)` is used instead.
    pub prefix_cap: usize,
    pub limits: Limits,
}

impl Default for DichotomyOptions {
    fn default() -> Self {
        DichotomyOptions {
            l: 1,
            delta: Ratio::new(1, 10),
            eps: Ratio::new(1, 10),
            c: BigRational::from_integer(1.into()),
            prefix_cap: 1 << 16,
            limits: Limits::default(),
        }
    }
}

/// Symmetric progression `[-m, m] * step` covering all but `dropped` entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Progression {
    #[serde(with = "crate::serial::bigint")]
    pub step: BigInt,
    #[serde(with = "crate::serial::bigint")]
    pub m: BigInt,
    #[serde(with = "crate::serial::bigint")]
    pub length: BigInt,
    pub dropped: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DichotomyReport {
    pub n: usize,
    pub l: usize,
    pub mu: Density,
    /// Exact `P_mu(v)`, or an upper bound from a prefix when `exact` is false.
    #[serde(with = "crate::serial::ratio")]
    pub p: BigRational,
    pub exact: bool,
    pub prefix_len: usize,
    #[serde(with = "crate::serial::biguint")]
    pub r_l: BigUint,
    /// `c n^{-2l-1/2-delta} R_l`, for display only.
    pub branch1_threshold_approx: f64,
    pub branch1: bool,
    /// `floor(n^{1-eps})`.
    pub exceptional_budget: u64,
    /// `n^{2l+delta+eps} / R_l`, for display only.
    pub length_bound_approx: f64,
    /// First cover within the length bound, or the shortest cover tried when none is.
    pub progression: Progression,
    pub branch2: bool,
    /// 2 when the progression branch holds, else 1 when the small-probability branch holds, else 0.
    pub verdict: u8,
}

fn big(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Drops the `j` largest entries in absolute value, for `j = 0..=budget`, and covers the rest
/// by `[-max/g, max/g] * g` with `g` their gcd. Returns the first cover whose length fits, or
/// the cover with every allowed entry dropped when none does.
fn cover(v: &Word, budget: usize, fits: impl Fn(&BigInt) -> bool) -> (Progression, bool) {
    let mut sorted: Vec<BigInt> = v.entries().iter().map(|x| x.abs()).collect();
    sorted.sort();
    let n = sorted.len();
    let last = budget.min(n);
    for dropped in 0..=last {
        let kept = &sorted[..n - dropped];
        let g = kept.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        let (step, m) = if g.is_zero() {
            (BigInt::zero(), BigInt::zero())
        } else {
            let max = kept.last().cloned().unwrap_or_default();
            (g.clone(), max / &g)
        };
        let length = BigInt::from(2) * &m + 1;
        let ok = fits(&length);
        if ok || dropped == last {
            return (
                Progression {
                    step,
                    m,
                    length,
                    dropped,
                },
                ok,
            );
        }
    }
    unreachable!("the loop returns at dropped == last")
}

/// Evaluates both branches of the dichotomy: either `P_mu(v) <= c n^{-2l-1/2-delta} R_l`,
/// or all but `n^{1-eps}` entries lie in a symmetric progression of length at most
/// `n^{2l+delta+eps} / R_l`.
pub fn newhalasz_dichotomy(v: &Word, mu: Density, opts: &DichotomyOptions) -> Result<DichotomyReport> {
    let n = v.len();
    if n == 0 {
        return Err(Error::domain("the word must be nonempty"));
    }
    if !opts.c.is_positive() {
        return Err(Error::domain("the constant c must be positive"));
    }
    let l = opts.l;
    let r_l = halasz_r(v, l, opts.limits.enumeration_guard)?;
    let r = BigRational::from_integer(BigInt::from(r_l.clone()));

    let capped = Limits {
        support_cap: opts.prefix_cap.min(opts.limits.support_cap),
        ..opts.limits
    };
    let (p, exact, prefix_len) = match concentration_with(v, mu, &capped) {
        Ok(c) => (c.value, true, n),
        Err(Error::SupportCap { prefix, .. }) if prefix > 1 => {
            let head = Word::new(v.entries()[..prefix - 1].to_vec());
            (concentration_with(&head, mu, &capped)?.value, false, prefix - 1)
        }
        Err(e) => return Err(e),
    };

    let lf = l as i64;
    let b1 = vec![
        PowFactor::new(opts.c.clone(), Ratio::from_integer(1)),
        PowFactor::new(big(n), Ratio::from_integer(-2 * lf) - Ratio::new(1, 2) - opts.delta),
        PowFactor::new(r.clone(), Ratio::from_integer(1)),
    ];
    let branch1 = le_rational_powers(&p, &b1);

    let budget = floor_rational_power(n as u64, Ratio::from_integer(1) - opts.eps);
    let b2 = vec![
        PowFactor::new(big(n), Ratio::from_integer(2 * lf) + opts.delta + opts.eps),
        PowFactor::new(r.clone(), Ratio::from_integer(-1)),
    ];
    let (progression, branch2) = cover(v, budget as usize, |len| {
        le_rational_powers(&BigRational::from_integer(len.clone()), &b2)
    });

    Ok(DichotomyReport {
        n,
        l,
        mu,
        p,
        exact,
        prefix_len,
        r_l,
        branch1_threshold_approx: approx_rational_powers(&b1),
        branch1,
        exceptional_budget: budget,
        length_bound_approx: approx_rational_powers(&b2),
        progression,
        branch2,
        verdict: if branch2 {
            2
        } else if branch1 {
            1
        } else {
            0
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(v: &[i64]) -> DichotomyReport {
        newhalasz_dichotomy(&Word::from_i64s(v), Density::ONE, &DichotomyOptions::default()).unwrap()
    }

    #[test]
    fn progression_is_its_own_cover() {
        let v: Vec<i64> = (1..=20).collect();
        let r = run(&v);
        assert_eq!(r.r_l, BigUint::from(40u32));
        assert_eq!(r.exceptional_budget, 14);
        assert!(r.branch2);
        assert_eq!(r.verdict, 2);
        assert_eq!(r.progression.step, BigInt::from(1));
    }

    #[test]
    fn dissociated_has_small_probability() {
        let v: Vec<i64> = (0..20).map(|i| 1 << i).collect();
        let r = run(&v);
        assert!(!r.branch2);
        assert!(r.branch1);
        assert_eq!(r.verdict, 1);
    }

    #[test]
    fn prefix_bound_past_the_cap() {
        let v: Vec<i64> = (0..24).map(|i| 1 << i).collect();
        let opts = DichotomyOptions {
            prefix_cap: 1 << 10,
            ..DichotomyOptions::default()
        };
        let r = newhalasz_dichotomy(&Word::from_i64s(&v), Density::ONE, &opts).unwrap();
        assert!(!r.exact);
        assert_eq!(r.prefix_len, 10);
        assert_eq!(r.p, BigRational::new(1.into(), BigInt::from(1 << 10)));
        assert!(r.branch1);
    }

    #[test]
    fn zeros_are_covered_by_the_trivial_progression() {
        let r = run(&[0; 6]);
        let ap = &r.progression;
        assert_eq!((ap.step.clone(), ap.length.clone()), (BigInt::zero(), BigInt::from(1)));
        // R_1 = (2n)^2, so the length bound n^{1/5} / 4 is below 1 for small n
        assert!(!r.branch2);
        let r = run(&[0; 1024]);
        assert!(r.branch2);
        assert_eq!(r.verdict, 2);
    }
}
