//! Deterministic instance families.
//!
//! Random families draw from ChaCha8 seeded with the 64-bit seed, so a spec
//! always produces the same word on every platform.

use std::fmt;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gap::Gap;
use crate::walks::Word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InstanceSpec {
    AllEqual {
        n: usize,
        #[serde(with = "crate::serial::bigint")]
        value: BigInt,
    },
    Ap {
        n: usize,
    },
    Dissociated {
        n: usize,
    },
    GapSample {
        gap: Gap,
        n: usize,
        seed: u64,
    },
    RandomBounded {
        n: usize,
        bound: u64,
        seed: u64,
    },
}

impl fmt::Display for InstanceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InstanceSpec::AllEqual { n, value } => write!(f, "all_equal(n={n},value={value})"),
            InstanceSpec::Ap { n } => write!(f, "ap(n={n})"),
            InstanceSpec::Dissociated { n } => write!(f, "dissociated(n={n})"),
            InstanceSpec::GapSample { gap, n, seed } => write!(f, "gap_sample({gap},n={n},seed={seed})"),
            InstanceSpec::RandomBounded { n, bound, seed } => {
                write!(f, "random_bounded(n={n},bound={bound},seed={seed})")
            }
        }
    }
}

pub fn generate_instance(spec: &InstanceSpec, guard: usize) -> Result<Word> {
    match spec {
        InstanceSpec::AllEqual { n, value } => Ok(Word::new(vec![value.clone(); *n])),
        InstanceSpec::Ap { n } => Ok(Word::new((1..=*n).map(BigInt::from).collect())),
        InstanceSpec::Dissociated { n } => Ok(Word::new((0..*n).map(|i| BigInt::from(1) << i).collect())),
        InstanceSpec::GapSample { gap, n, seed } => {
            let set = gap.enumerate(guard)?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let elems = set.elements();
            Ok(Word::from_i64s(
                &(0..*n).map(|_| elems[rng.gen_range(0..elems.len())]).collect::<Vec<_>>(),
            ))
        }
        InstanceSpec::RandomBounded { n, bound, seed } => {
            let b = i64::try_from(*bound)
                .ok()
                .filter(|&b| b >= 1 && b < i64::MAX / 2)
                .ok_or_else(|| Error::domain(format!("bound {bound} must lie in [1, 2^62)")))?;
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let draws = (0..*n)
                .map(|_| {
                    let r = rng.gen_range(0..2 * b);
                    if r < b {
                        r - b
                    } else {
                        r - b + 1
                    }
                })
                .collect::<Vec<_>>();
            Ok(Word::from_i64s(&draws))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(w: &Word) -> Vec<i64> {
        w.to_i64s().unwrap()
    }

    #[test]
    fn named_families() {
        assert_eq!(ints(&generate_instance(&InstanceSpec::Ap { n: 4 }, 100).unwrap()), vec![1, 2, 3, 4]);
        assert_eq!(
            ints(&generate_instance(&InstanceSpec::Dissociated { n: 4 }, 100).unwrap()),
            vec![1, 2, 4, 8]
        );
        let spec = InstanceSpec::AllEqual {
            n: 3,
            value: BigInt::from(7),
        };
        assert_eq!(ints(&generate_instance(&spec, 100).unwrap()), vec![7, 7, 7]);
    }

    #[test]
    fn dissociated_words_exceed_64_bits() {
        let w = generate_instance(&InstanceSpec::Dissociated { n: 70 }, 100).unwrap();
        assert_eq!(w.entries()[69], BigInt::from(1) << 69);
    }

    #[test]
    fn random_families_are_seeded() {
        let spec = InstanceSpec::RandomBounded { n: 50, bound: 3, seed: 9 };
        let a = ints(&generate_instance(&spec, 100).unwrap());
        assert_eq!(a, ints(&generate_instance(&spec, 100).unwrap()));
        assert!(a.iter().all(|&x| x != 0 && x.abs() <= 3));
        let gap = Gap::from_ints(&[3, 3], &[1, 10]).unwrap();
        let spec = InstanceSpec::GapSample { gap: gap.clone(), n: 40, seed: 1 };
        let set = gap.enumerate(100).unwrap();
        assert!(ints(&generate_instance(&spec, 100).unwrap()).iter().all(|&x| set.contains(x)));
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = InstanceSpec::RandomBounded { n: 5, bound: 2, seed: 3 };
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(text, r#"{"kind":"random_bounded","n":5,"bound":2,"seed":3}"#);
        assert_eq!(serde_json::from_str::<InstanceSpec>(&text).unwrap(), spec);
    }
}
