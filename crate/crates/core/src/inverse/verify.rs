use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;

use super::{InverseConfig, InverseResult};
use crate::check::Check;
use crate::error::Result;
use crate::numeric::{le_ln, le_rational_powers, ratio_string, small_ratio, PowFactor};
use crate::walks::{concentration_with, Word};

/// Re-checks the conclusions of an inverse run with fresh exact computations.
///
/// The steps-divide check is informational: the embedding search is free to
/// produce steps that are not of the form `v_i / C`.
pub fn verify_result(v: &Word, result: &InverseResult, cfg: &InverseConfig) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let n = v.len();
    let values = v.to_i64s()?;
    let guard = cfg.limits.enumeration_guard;
    let q = &result.final_gap;

    let contained: BTreeSet<usize> = result.contained.iter().copied().collect();
    let exceptional: BTreeSet<usize> = result.exceptional.iter().copied().collect();
    let partition = contained.is_disjoint(&exceptional)
        && contained.len() == result.contained.len()
        && exceptional.len() == result.exceptional.len()
        && contained.union(&exceptional).copied().eq(1..=n);
    checks.push(Check::new(
        "partition",
        partition,
        format!("{} contained + {} exceptional of n = {n}", contained.len(), exceptional.len()),
    ));

    checks.push(Check::new(
        "rank",
        q.rank() < cfg.d,
        format!("rank {} <= d - 1 = {}", q.rank(), cfg.d - 1),
    ));

    let volume = q.volume();
    let set = q.enumerate(guard)?;
    checks.push(Check::new(
        "proper",
        BigUint::from(set.len()) == volume,
        format!("|Q| = {} against volume {volume}", set.len()),
    ));

    // vol(Q) <= P^{-1} k^eps  <=>  vol(Q) P <= k^eps
    let p = concentration_with(v, cfg.mu, &cfg.limits)?.value;
    let lhs = BigRational::from_integer(BigInt::from(volume.clone())) * &p;
    let eps = small_ratio(&cfg.eps)?;
    checks.push(Check::new(
        "volume",
        le_rational_powers(&lhs, &[PowFactor::new(BigRational::from_integer(BigInt::from(cfg.k)), eps)]),
        format!(
            "vol = {volume}, P^-1 = {}, k^eps = {}^{}",
            ratio_string(&p.recip()),
            cfg.k,
            ratio_string(&cfg.eps)
        ),
    ));

    // |X| <= slack k^2 ln k  <=>  |X| / (slack k^2) <= ln k
    let k2 = BigRational::from_integer(BigInt::from(cfg.k * cfg.k));
    let x = BigRational::from_integer(BigInt::from(exceptional.len())) / (&cfg.slack * &k2);
    checks.push(Check::new(
        "exceptional_count",
        le_ln(&x, cfg.k),
        format!(
            "{} exceptional against {} k^2 ln k with k = {}",
            exceptional.len(),
            ratio_string(&cfg.slack),
            cfg.k
        ),
    ));

    let c = result.scaling;
    let window = q
        .dilate(&BigRational::new(BigInt::from(c), BigInt::from(cfg.k)))
        .enumerate(guard)?;
    let missing: Vec<usize> = contained
        .iter()
        .copied()
        .filter(|&i| {
            (c as i64)
                .checked_mul(values[i - 1])
                .is_none_or(|y| !window.contains(y))
        })
        .collect();
    checks.push(Check::new(
        "containment",
        missing.is_empty(),
        if missing.is_empty() {
            format!("C v_i lies in Q_(C/k) for all {} contained indices, C = {c}", contained.len())
        } else {
            format!("{} contained indices fail, first {}", missing.len(), missing[0])
        },
    ));

    let multiples: BTreeSet<i64> = values.iter().map(|x| x.abs()).collect();
    let outside: Vec<i64> = q
        .steps()
        .iter()
        .copied()
        .filter(|s| (c as i64).checked_mul(s.abs()).is_none_or(|y| !multiples.contains(&y)))
        .collect();
    checks.push(Check::info(
        "steps_divide",
        outside.is_empty(),
        if outside.is_empty() {
            format!("every step of Q is some v_i / {c} up to sign")
        } else {
            format!("steps {outside:?} are not of the form v_i / {c}")
        },
    ));
    Ok(checks)
}
