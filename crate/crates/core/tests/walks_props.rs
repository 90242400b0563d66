use lo_core::gap::ElementSet;
use lo_core::oracle::brute_distribution;
use lo_core::walks::{concentration, generalized_concentration, walk_distribution};
use lo_core::{Density, Word};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use proptest::prelude::*;

fn density() -> impl Strategy<Value = Density> {
    (1u64..=8).prop_flat_map(|q| (1..=q).prop_map(move |p| Density::new(p, q).unwrap()))
}

fn word(max_len: usize, bound: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-bound..=bound, 0..=max_len)
}

fn qset() -> impl Strategy<Value = ElementSet> {
    prop::collection::vec(-8i64..=8, 1..=4).prop_map(ElementSet::from_vec)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_exhaustive_enumeration(v in word(8, 20), mu in density()) {
        let w = Word::from_i64s(&v);
        prop_assert_eq!(walk_distribution(&w, mu).unwrap(), brute_distribution(&w, mu).unwrap());
    }

    #[test]
    fn distribution_is_symmetric_and_normalized(v in word(10, 20), mu in density()) {
        let d = walk_distribution(&Word::from_i64s(&v), mu).unwrap();
        let total = d.counts().into_iter().fold(BigUint::from(0u32), |acc, (_, c)| acc + c);
        prop_assert_eq!(&total, d.denominator());
        prop_assert_eq!(total, BigUint::from(mu.base()).pow(v.len() as u32));
        let span: i64 = v.iter().map(|x| x.abs()).sum();
        for (x, c) in d.counts() {
            prop_assert_eq!(d.count_at(&-x.clone()), c);
            prop_assert!(x <= BigInt::from(span));
        }
    }

    #[test]
    fn witnesses_are_closed_under_negation(v in word(10, 10), mu in density()) {
        let c = concentration(&Word::from_i64s(&v), mu).unwrap();
        for x in &c.witnesses {
            prop_assert!(c.witnesses.contains(&-x.clone()));
        }
    }

    #[test]
    fn permutation_invariance(v in word(10, 10), mu in density(), q in qset(), seed in any::<u64>()) {
        let w = Word::from_i64s(&v);
        let mut order: Vec<usize> = (0..v.len()).collect();
        let n = order.len().max(1) as u64;
        order.rotate_left((seed % n) as usize);
        order.reverse();
        let p = w.permuted(&order);
        prop_assert_eq!(concentration(&w, mu).unwrap().value, concentration(&p, mu).unwrap().value);
        prop_assert_eq!(
            generalized_concentration(&w, mu, &q).unwrap().value,
            generalized_concentration(&p, mu, &q).unwrap().value
        );
    }

    #[test]
    fn concatenation_never_concentrates(v in word(8, 10), w in word(4, 10), mu in density(), q in qset()) {
        let a = Word::from_i64s(&v);
        let b = Word::from_i64s(&w);
        prop_assert!(
            generalized_concentration(&a.concat(&b), mu, &q).unwrap().value
                <= generalized_concentration(&a, mu, &q).unwrap().value
        );
    }

    #[test]
    fn crude_bound(v in word(8, 10), mu in density(), q in qset()) {
        let p = generalized_concentration(&Word::from_i64s(&v), mu, &q).unwrap().value;
        prop_assert!(p * BigRational::from_integer(BigInt::from(q.len())) <= BigRational::one());
    }

    #[test]
    fn singleton_set_is_plain_concentration(v in word(8, 10), mu in density(), c in -8i64..=8) {
        let w = Word::from_i64s(&v);
        prop_assert_eq!(
            generalized_concentration(&w, mu, &ElementSet::from_vec(vec![c])).unwrap().value,
            concentration(&w, mu).unwrap().value
        );
    }
}

// Density comparison fails for this word at mu = 1, mu' = 1/4 with a two-point Q.
// Values cross-checked by direct enumeration of the walk.
#[test]
fn density_comparison_counterexample_at_full_density() {
    use lo_core::walks::generalized_concentration;
    use lo_core::ElementSet;
    let v = Word::from_i64s(&[5, -4, -5, 2, 1, -1, -4, -4, 5, 1]);
    let q = ElementSet::from_vec(vec![-8, 4]);
    let full = generalized_concentration(&v, Density::ONE, &q).unwrap().value;
    let quarter = generalized_concentration(&v, Density::new(1, 4).unwrap(), &q).unwrap().value;
    assert_eq!(full, lo_core::numeric::rat(123, 2048));
    assert_eq!(
        quarter,
        num_rational::BigRational::new(125188677.into(), 2147483648i64.into())
    );
    assert!(full > quarter);
    // with a singleton Q the comparison holds for the same word
    let zero = ElementSet::from_vec(vec![0]);
    let full = generalized_concentration(&v, Density::ONE, &zero).unwrap().value;
    let quarter = generalized_concentration(&v, Density::new(1, 4).unwrap(), &zero).unwrap().value;
    assert!(full <= quarter);
}
