use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::walks::Word;

/// `R_l`: the number of `(eps_1..eps_2l, i_1..i_2l)` with signs `eps_j` and indices in
/// `1..=n` (repetition allowed) such that `sum eps_j v_{i_j} = 0`.
///
/// With `h(x)` the number of signed `l`-tuples summing to `x`, `R_l = sum_x h(x) h(-x)`.
pub fn halasz_r(v: &Word, l: usize, guard: usize) -> Result<BigUint> {
    if l == 0 {
        return Err(Error::domain("l must be at least 1"));
    }
    let mut single: BTreeMap<BigInt, BigUint> = BTreeMap::new();
    for x in v.entries() {
        *single.entry(x.clone()).or_default() += 1u32;
        *single.entry(-x).or_default() += 1u32;
    }
    let mut h = single.clone();
    for _ in 1..l {
        let mut next: BTreeMap<BigInt, BigUint> = BTreeMap::new();
        for (x, a) in &h {
            for (y, b) in &single {
                *next.entry(x + y).or_default() += a * b;
            }
            if next.len() > guard {
                return Err(Error::Resource(format!(
                    "signed {l}-fold sums exceed the guard of {guard} points"
                )));
            }
        }
        h = next;
    }
    Ok(h.iter().fold(BigUint::zero(), |acc, (x, a)| match h.get(&-x) {
        Some(b) => acc + a * b,
        None => acc,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute(v: &[i64], l: usize) -> u64 {
        let n = v.len();
        let total = (2 * n).pow(2 * l as u32);
        (0..total)
            .filter(|&start| {
                let mut code = start;
                let mut sum = 0i64;
                for _ in 0..2 * l {
                    let c = code % (2 * n);
                    code /= 2 * n;
                    let x = v[c / 2];
                    sum += if c % 2 == 0 { x } else { -x };
                }
                sum == 0
            })
            .count() as u64
    }

    fn r(v: &[i64], l: usize) -> u64 {
        halasz_r(&Word::from_i64s(v), l, 1 << 20).unwrap().try_into().unwrap()
    }

    #[test]
    fn small_examples() {
        assert_eq!(r(&[1], 1), 2);
        assert_eq!(r(&[1, 1], 1), 8);
        assert_eq!(r(&[1, 2], 1), 4);
    }

    #[test]
    fn agrees_with_direct_enumeration() {
        for v in [vec![1, 2, 3], vec![2, -2, 4, 0], vec![5, 1, 4]] {
            for l in 1..=2 {
                assert_eq!(r(&v, l), brute(&v, l), "v = {v:?}, l = {l}");
            }
        }
    }

    #[test]
    fn invariant_under_sign_and_order() {
        assert_eq!(r(&[3, 1, 4, 1, 5], 2), r(&[5, -1, 4, 1, -3], 2));
    }
}
