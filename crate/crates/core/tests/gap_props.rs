use lo_core::gap::{embed_proper, EmbedMethod, EmbedOptions};
use lo_core::numeric::rat;
use lo_core::oracle::intersection_inequalities;
use lo_core::{Error, Gap};
use num_bigint::BigUint;
use proptest::prelude::*;

const GUARD: usize = 1 << 22;

fn gap(max_rank: usize, max_dim: i64, max_step: i64) -> impl Strategy<Value = Gap> {
    (0..=max_rank).prop_flat_map(move |r| {
        (
            prop::collection::vec(1..=max_dim, r),
            prop::collection::vec(-max_step..=max_step, r),
        )
            .prop_map(|(d, s)| Gap::from_ints(&d, &s).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn volume_dominates_cardinality(q in gap(3, 8, 40)) {
        let card = q.enumerate(GUARD).unwrap().len();
        let vol = q.volume();
        prop_assert!(BigUint::from(card) <= vol);
        prop_assert_eq!(BigUint::from(card) == vol, q.is_proper(GUARD).unwrap());
    }

    #[test]
    fn enumeration_is_symmetric(q in gap(3, 6, 40)) {
        prop_assert!(q.enumerate(GUARD).unwrap().is_symmetric());
    }

    #[test]
    fn doubling_bound(q in gap(3, 8, 200), t in 1i64..=4) {
        prop_assume!(q.is_proper(GUARD).unwrap());
        let base = q.enumerate(GUARD).unwrap().len();
        let dilated = q.dilate(&rat(t, 1)).enumerate(GUARD).unwrap().len();
        prop_assert!(dilated <= ((2 * t + 1) as usize).pow(q.rank() as u32) * base);
    }

    #[test]
    fn intersection_inequalities_hold(p in gap(3, 8, 30), q in gap(3, 8, 30)) {
        let r = intersection_inequalities(&p, &q, GUARD).unwrap();
        prop_assert!(r.ruzsa_ok, "{} > {}", r.ruzsa_lhs, r.ruzsa_rhs);
        prop_assert!(r.lower_ok, "{} > {}", r.lower_lhs, r.lower_rhs);
    }

    #[test]
    fn embedding_postconditions(q in gap(3, 4, 12), t in 1u64..=2) {
        match embed_proper(&q, t, &EmbedOptions::default()) {
            Ok(e) => {
                let inner = q.enumerate(GUARD).unwrap();
                prop_assert!(inner.is_subset(&e.gap.enumerate(GUARD).unwrap()));
                prop_assert!(e.gap.is_t_proper(&rat(t as i64, 1), GUARD).unwrap());
                if e.method != EmbedMethod::Identity {
                    prop_assert!(e.gap.rank() < q.rank());
                }
            }
            Err(Error::Embed { .. }) => {}
            Err(other) => prop_assert!(false, "unexpected error {other}"),
        }
    }
}
