use num_bigint::{BigInt, BigUint};
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use serde::Serialize;

use super::{run_inverse, InverseConfig, InverseResult};
use crate::check::Check;
use crate::error::{Error, Result};
use crate::gap::Gap;
use crate::numeric::{floor_rational_power, le_rational_powers, ratio_string, small_ratio, Density, PowFactor};
use crate::walks::{concentration_with, Word};

#[derive(Clone, Debug, Serialize)]
pub struct StrongInverseResult {
    #[serde(rename = "A", with = "crate::serial::ratio")]
    pub a: BigRational,
    #[serde(with = "crate::serial::ratio")]
    pub eps: BigRational,
    pub d: usize,
    pub k: u64,
    /// Final GAP with every dimension below `k` removed.
    pub pruned_gap: Gap,
    /// `(pruned_gap)_{1/k}`.
    pub dilate: Gap,
    pub pruned_dims: usize,
    pub contained: Vec<usize>,
    pub exceptional: Vec<usize>,
    pub checks: Vec<Check>,
    pub inverse: InverseResult,
}

impl StrongInverseResult {
    pub fn passed(&self) -> bool {
        self.inverse.passed() && crate::check::all_passed(&self.checks)
    }
}

fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Runs the inverse algorithm with `d = floor(2A) + 1` and `k = floor(n^{1/2 - eps})`, then
/// prunes every dimension smaller than `k` from the output.
///
/// `base` supplies `K`, `C0`, slack and caps; its `d`, `k`, `eps` and `mu` are replaced.
pub fn strong_inverse(
    v: &Word,
    a: &BigRational,
    eps: &BigRational,
    mu: Density,
    base: &InverseConfig,
) -> Result<StrongInverseResult> {
    let n = v.len() as u64;
    let half = BigRational::new(1.into(), 2.into());
    if *a <= BigRational::zero() {
        return Err(Error::domain(format!("A = {a} must be positive")));
    }
    if *eps <= BigRational::zero() || *eps >= half {
        return Err(Error::domain(format!("eps = {eps} must lie in (0, 1/2)")));
    }
    let a_exp = small_ratio(a)?;
    let p = concentration_with(v, mu, &base.limits)?.value;
    // P >= n^{-A}  <=>  1 <= P n^A
    let one = BigRational::one();
    if !le_rational_powers(&one, &[PowFactor::new(p.clone(), Ratio::from_integer(1)), PowFactor::new(int(n), a_exp)]) {
        return Err(Error::Precondition {
            p,
            threshold: format!("{n}^-{}", ratio_string(a)),
        });
    }
    let d = (a * BigRational::from_integer(2.into())).floor().to_integer();
    let d = usize::try_from(d + 1).map_err(|_| Error::Overflow(format!("d for A = {a}")))?;
    let k = floor_rational_power(n, small_ratio(&(&half - eps))?);
    let cfg = InverseConfig {
        d,
        k,
        eps: eps.clone(),
        mu,
        ..base.clone()
    };
    let inverse = run_inverse(v, &cfg)?;

    let guard = cfg.limits.enumeration_guard;
    let kr = int(k);
    let pruned = inverse.final_gap.without_dims_below(&kr);
    let pruned_dims = inverse.final_gap.rank() - pruned.rank();
    let inv_k = kr.recip();
    let dilate = pruned.dilate(&inv_k);
    let mut checks = Vec::new();

    let before = inverse.final_gap.dilate(&inv_k).enumerate(guard)?;
    let after = dilate.enumerate(guard)?;
    checks.push(Check::new(
        "pruning_preserves_dilate",
        before == after,
        format!("{pruned_dims} dimensions below k = {k} removed"),
    ));

    // containment of C v_i in the C/k-dilate after pruning; failures become exceptional
    let values = v.to_i64s()?;
    let c = inverse.scaling;
    let window = pruned.dilate(&(int(c) / &kr)).enumerate(guard)?;
    let mut contained = Vec::new();
    let mut exceptional = inverse.exceptional.clone();
    for &i in &inverse.contained {
        match (c as i64).checked_mul(values[i - 1]) {
            Some(y) if window.contains(y) => contained.push(i),
            _ => exceptional.push(i),
        }
    }
    exceptional.sort_unstable();

    let r = pruned.rank();
    checks.push(Check::new(
        "rank",
        int(r as u64) <= a * BigRational::from_integer(2.into()),
        format!("rank {r} <= 2A = {}", ratio_string(&(a * BigRational::from_integer(2.into())))),
    ));
    checks.push(Check::info(
        "dilate_proper",
        BigUint::from(after.len()) == dilate.volume(),
        format!("|Q_(1/k)| = {} against volume {}", after.len(), dilate.volume()),
    ));
    // vol(Q_{1/k}) <= 3^r n^A k^{eps - r}
    let eps_r = small_ratio(eps)? - Ratio::from_integer(r as i64);
    let vol = BigRational::from_integer(BigInt::from(dilate.volume()));
    checks.push(Check::new(
        "volume",
        le_rational_powers(
            &vol,
            &[
                PowFactor::new(int(3u64.pow(r as u32)), Ratio::from_integer(1)),
                PowFactor::new(int(n), a_exp),
                PowFactor::new(kr.clone(), eps_r),
            ],
        ),
        format!("vol(Q_(1/k)) = {} against 3^r n^A k^(eps - r)", dilate.volume()),
    ));
    // |X| <= slack n^{1 - eps}
    let x = BigRational::from_integer(BigInt::from(exceptional.len())) / &cfg.slack;
    checks.push(Check::new(
        "exceptional_count",
        le_rational_powers(&x, &[PowFactor::new(int(n), Ratio::from_integer(1) - small_ratio(eps)?)]),
        format!("{} exceptional against {} n^(1 - eps)", exceptional.len(), ratio_string(&cfg.slack)),
    ));

    Ok(StrongInverseResult {
        a: a.clone(),
        eps: eps.clone(),
        d,
        k,
        pruned_gap: pruned,
        dilate,
        pruned_dims,
        contained,
        exceptional,
        checks,
        inverse,
    })
}
