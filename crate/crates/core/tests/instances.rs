use lo_core::gap::Gap;
use lo_core::instances::{generate_instance, InstanceSpec};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gap_samples_are_reproducible_members(dims in prop::collection::vec(1i64..=4, 1..=3), steps in prop::collection::vec(-50i64..=50, 3), n in 0usize..=50, seed in any::<u64>()) {
        let gap = Gap::from_ints(&dims, &steps[..dims.len()]).unwrap();
        let set = gap.enumerate(1 << 20).unwrap();
        let spec = InstanceSpec::GapSample { gap, n, seed };
        let a = generate_instance(&spec, 1 << 20).unwrap();
        prop_assert_eq!(&a, &generate_instance(&spec, 1 << 20).unwrap());
        prop_assert_eq!(a.len(), n);
        for x in a.to_i64s().unwrap() {
            prop_assert!(set.contains(x));
        }
    }

    #[test]
    fn bounded_samples_are_reproducible(n in 0usize..=50, bound in 1u64..=100, seed in any::<u64>()) {
        let spec = InstanceSpec::RandomBounded { n, bound, seed };
        let a = generate_instance(&spec, 1 << 20).unwrap();
        prop_assert_eq!(&a, &generate_instance(&spec, 1 << 20).unwrap());
        prop_assert!(a.to_i64s().unwrap().iter().all(|x| x.unsigned_abs() <= bound));
    }
}
