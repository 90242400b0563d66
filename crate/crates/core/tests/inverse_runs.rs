use lo_core::check::Check;
use lo_core::instances::{generate_instance, InstanceSpec};
use lo_core::inverse::{run_inverse, InverseConfig, InverseResult};
use lo_core::numeric::rat;
use lo_core::{Density, Gap, Word};
use num_bigint::BigInt;
use num_rational::BigRational;

fn config(d: usize, k: u64, mu: Density, big_k: i64, c0: BigRational) -> InverseConfig {
    InverseConfig {
        big_k: rat(big_k, 1),
        c0,
        ..InverseConfig::new(d, k, mu)
    }
}

fn check<'a>(checks: &'a [Check], name: &str) -> &'a Check {
    checks.iter().find(|c| c.name == name).unwrap_or_else(|| panic!("no check named {name}"))
}

fn assert_trace_invariants(r: &InverseResult, cfg: &InverseConfig) {
    let d = cfg.d;
    assert!(r.steps <= r.step_cap);
    for step in &r.trace {
        assert!(step.potential <= rat(1, 1), "F_{} = {}", step.index, step.potential);
        assert!(step.rank < d);
    }
    for w in r.trace.windows(2) {
        assert!(
            BigRational::from_integer(BigInt::from(w[1].cardinality))
                >= &cfg.big_k * BigInt::from(w[0].cardinality),
            "growth from {} to {}",
            w[0].cardinality,
            w[1].cardinality
        );
    }
    assert!(r.trace.iter().filter(|s| s.proper_step).count() < d);
    for name in ["rank", "volume", "containment", "exceptional_count"] {
        let c = check(&r.verification, name);
        assert!(c.passed, "{name}: {}", c.detail);
    }
    assert!(r.passed(), "{:?}\n{:?}", r.run_checks, r.verification);
}

#[test]
fn all_equal_word() {
    let v = Word::from_i64s(&[5; 100]);
    let cfg = config(2, 5, Density::HALF, 2, rat(1, 1));
    let r = run_inverse(&v, &cfg).unwrap();
    assert_trace_invariants(&r, &cfg);
    assert_eq!(r.final_gap, Gap::from_ints(&[5], &[5]).unwrap());
}

#[test]
fn arithmetic_progression() {
    let v = generate_instance(&InstanceSpec::Ap { n: 100 }, 1 << 20).unwrap();
    let cfg = config(2, 9, Density::ONE, 8, rat(1, 16));
    let r = run_inverse(&v, &cfg).unwrap();
    assert_trace_invariants(&r, &cfg);
    assert_eq!(r.steps, 1);
    assert_eq!(r.stopped_gap, Gap::from_ints(&[9], &[1]).unwrap());
    assert_eq!((r.dilation.clone(), r.scaling), (rat(7, 1), 1));
    assert_eq!(r.final_gap, Gap::from_ints(&[63], &[1]).unwrap());
}

#[test]
fn rank_two_sample() {
    let spec = InstanceSpec::GapSample {
        gap: Gap::from_ints(&[3, 3], &[1, 100]).unwrap(),
        n: 200,
        seed: 1,
    };
    let v = generate_instance(&spec, 1 << 20).unwrap();
    let cfg = config(3, 5, Density::HALF, 8, rat(1, 100));
    let r = run_inverse(&v, &cfg).unwrap();
    assert_trace_invariants(&r, &cfg);
    assert_eq!(r.stopped_gap.rank(), 2);
    assert_eq!(r.trace.iter().filter(|s| s.proper_step).count(), 2);
    assert!(r.exceptional.is_empty());
}
