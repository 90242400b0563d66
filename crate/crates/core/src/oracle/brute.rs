use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeric::Density;
use crate::walks::{WalkDistribution, Word};

pub const BRUTE_MAX_LEN: usize = 12;

/// Exact distribution of the lazy walk by enumerating all `3^n` step patterns.
pub fn brute_distribution(v: &Word, mu: Density) -> Result<WalkDistribution> {
    let n = v.len();
    if n > BRUTE_MAX_LEN {
        return Err(Error::Resource(format!(
            "exhaustive enumeration needs n <= {BRUTE_MAX_LEN}, got {n}"
        )));
    }
    let base = mu.base();
    let small: Option<Vec<i64>> = v.entries().iter().map(|x| x.to_i64()).collect();
    let fits = (base as u128).checked_pow(n as u32).is_some();
    match small {
        Some(vals) if fits => Ok(WalkDistribution::from_counts(
            base,
            n,
            narrow(&vals, mu)
                .into_iter()
                .map(|(k, c)| (BigInt::from(k), BigUint::from(c))),
        )?),
        _ => WalkDistribution::from_counts(base, n, wide(v.entries(), mu)),
    }
}

fn narrow(vals: &[i64], mu: Density) -> BTreeMap<i128, u128> {
    let zero = mu.zero_weight() as u128;
    let sign = mu.sign_weight() as u128;
    let mut counts = BTreeMap::new();
    let mut pattern = vec![-1i8; vals.len()];
    loop {
        let mut sum = 0i128;
        let mut weight = 1u128;
        for (&s, &x) in pattern.iter().zip(vals) {
            sum += s as i128 * x as i128;
            weight *= if s == 0 { zero } else { sign };
        }
        if weight > 0 {
            *counts.entry(sum).or_insert(0) += weight;
        }
        if !advance(&mut pattern) {
            return counts;
        }
    }
}

fn wide(vals: &[BigInt], mu: Density) -> BTreeMap<BigInt, BigUint> {
    let zero = BigUint::from(mu.zero_weight());
    let sign = BigUint::from(mu.sign_weight());
    let mut counts: BTreeMap<BigInt, BigUint> = BTreeMap::new();
    let mut pattern = vec![-1i8; vals.len()];
    loop {
        let mut sum = BigInt::zero();
        let mut weight = BigUint::one();
        for (&s, x) in pattern.iter().zip(vals) {
            match s {
                0 => weight *= &zero,
                1 => {
                    sum += x;
                    weight *= &sign;
                }
                _ => {
                    sum -= x;
                    weight *= &sign;
                }
            }
        }
        if !weight.is_zero() {
            *counts.entry(sum).or_default() += weight;
        }
        if !advance(&mut pattern) {
            return counts;
        }
    }
}

/// Next pattern in `{-1, 0, 1}^n`, odometer order; false after the last one.
fn advance(pattern: &mut [i8]) -> bool {
    for s in pattern.iter_mut() {
        if *s < 1 {
            *s += 1;
            return true;
        }
        *s = -1;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walks::walk_distribution;

    fn counts(d: &WalkDistribution) -> Vec<(i64, u64)> {
        d.counts()
            .into_iter()
            .map(|(k, c)| (k.to_i64().unwrap(), c.to_u64().unwrap()))
            .collect()
    }

    #[test]
    fn four_fair_unit_steps() {
        let d = brute_distribution(&Word::from_i64s(&[1, 1, 1, 1]), Density::ONE).unwrap();
        assert_eq!(counts(&d), vec![(-4, 1), (-2, 4), (0, 6), (2, 4), (4, 1)]);
        assert_eq!(d.denominator(), &BigUint::from(16u32));
    }

    #[test]
    fn empty_word() {
        let d = brute_distribution(&Word::default(), Density::new(1, 3).unwrap()).unwrap();
        assert_eq!(counts(&d), vec![(0, 1)]);
    }

    #[test]
    fn matches_the_convolution_engine() {
        let v = Word::from_i64s(&[1, 2]);
        assert_eq!(
            brute_distribution(&v, Density::HALF).unwrap(),
            walk_distribution(&v, Density::HALF).unwrap()
        );
        let big = Word::new(vec![BigInt::from(1) << 100, BigInt::from(3)]);
        let mu = Density::new(2, 5).unwrap();
        assert_eq!(brute_distribution(&big, mu).unwrap(), walk_distribution(&big, mu).unwrap());
    }

    #[test]
    fn refuses_long_words() {
        let err = brute_distribution(&Word::from_i64s(&[1; 13]), Density::ONE).unwrap_err();
        assert!(err.is_resource());
    }
}
