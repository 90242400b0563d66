//! The GAP-growing inverse algorithm.
//!
//! Starting from `Q_0 = {0}`, each step counts the coordinates of the current
//! word that are bad for `Q_i`. Fewer than `k^2` bad coordinates stops the
//! loop; otherwise the first `k^2` bad coordinates are removed, a value `v0`
//! among them is selected, and `Q_i + [-k, k] v0` (or a proper embedding of it)
//! becomes `Q_{i+1}`. The stopping GAP is then refined element by element and
//! finalized into a proper GAP whose `C/k`-dilate contains `C v_i` for all but
//! the exceptional coordinates.

mod refine;
mod select;
mod strong;
mod verify;

use std::collections::{BTreeMap, HashSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::check::Check;
use crate::error::{Error, Result};
use crate::gap::{embed_proper, is_bad_against, ElementSet, EmbedOptions, Gap};
use crate::numeric::{ratio_string, rat, Density, PowFactor};
use crate::walks::{concentration_with, difference_pmf, generalized_value, walk_pmf, Limits, Word};

pub use refine::{finalize, refine_good, Certificate, Finalization, RefineOptions, Refinement, Refiner};
pub use select::{select_step_value, Selection};
pub use strong::{strong_inverse, StrongInverseResult};
pub use verify::verify_result;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    /// Hard ceiling on extension steps, applied on top of the `O(d log_K k)` cap.
    pub max_iterations: usize,
    /// Multiplier `c` in the step cap `c * d * max(1, ceil(log_K k))`.
    pub step_cap_factor: usize,
    pub a_max: u64,
    pub m_max: u64,
    pub c_max: u64,
    #[serde(with = "crate::serial::ratio")]
    pub embed_ratio_budget: BigRational,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_iterations: 64,
            step_cap_factor: 4,
            a_max: 8,
            m_max: 4,
            c_max: 840,
            embed_ratio_budget: rat(32, 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InverseConfig {
    pub d: usize,
    #[serde(with = "crate::serial::ratio")]
    pub eps: BigRational,
    pub mu: Density,
    pub k: u64,
    #[serde(rename = "K", with = "crate::serial::ratio")]
    pub big_k: BigRational,
    #[serde(rename = "C0", with = "crate::serial::ratio")]
    pub c0: BigRational,
    #[serde(with = "crate::serial::ratio")]
    pub slack: BigRational,
    /// Lower bound asserted for the per-step comparison ratio `P_{i+1} / P_i`.
    #[serde(with = "crate::serial::ratio")]
    pub c_min: BigRational,
    /// Shortest accepted progression in a good-element certificate; `ceil(k/4)` when absent.
    pub l_min: Option<u64>,
    pub caps: Caps,
    pub limits: Limits,
}

impl InverseConfig {
    pub fn new(d: usize, k: u64, mu: Density) -> Self {
        InverseConfig {
            d,
            eps: rat(1, 2),
            mu,
            k,
            big_k: rat(8, 1),
            c0: rat(16, 1),
            slack: rat(10, 1),
            c_min: rat(1, 64),
            l_min: None,
            caps: Caps::default(),
            limits: Limits::default(),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let err = |m: String| Err(Error::Domain(m));
        if self.d == 0 {
            return err("d must be at least 1".into());
        }
        if self.k < 2 {
            return err(format!("k = {} must be at least 2", self.k));
        }
        if self.big_k < rat(2, 1) {
            return err(format!("K = {} must be at least 2", self.big_k));
        }
        if self.eps <= BigRational::zero() || self.eps >= BigRational::one() {
            return err(format!("eps = {} must lie in (0, 1)", self.eps));
        }
        let k2 = (self.k as u128) * (self.k as u128);
        if k2 > n as u128 {
            return err(format!("k^2 = {k2} exceeds n = {n}"));
        }
        let c = &self.caps;
        if c.max_iterations == 0 || c.step_cap_factor == 0 || c.a_max == 0 || c.m_max == 0 || c.c_max == 0 {
            return err("caps must be positive".into());
        }
        if self.slack <= BigRational::zero() || self.c_min <= BigRational::zero() {
            return err("slack and c_min must be positive".into());
        }
        Ok(())
    }

    pub fn l_min(&self) -> u64 {
        self.l_min.unwrap_or(self.k.div_ceil(4))
    }

    /// `ceil(log_K k)`, at least 1.
    pub fn log_k_steps(&self) -> usize {
        let target = BigRational::from_integer(BigInt::from(self.k));
        let mut power = BigRational::one();
        let mut e = 0;
        while power < target {
            power *= &self.big_k;
            e += 1;
        }
        e.max(1)
    }

    /// Largest number of extension steps allowed.
    pub fn step_cap(&self) -> usize {
        (self.caps.step_cap_factor * self.d * self.log_k_steps()).min(self.caps.max_iterations)
    }

    /// `C0 k^{-d}`.
    pub fn threshold(&self) -> BigRational {
        &self.c0 / BigRational::from_integer(BigInt::from(self.k).pow(self.d as u32))
    }

    fn embed_options(&self) -> EmbedOptions {
        EmbedOptions {
            ratio_budget: self.caps.embed_ratio_budget.clone(),
            max_rank: self.d + 1,
            guard: self.limits.enumeration_guard,
        }
    }

    pub(crate) fn refine_options(&self) -> RefineOptions {
        RefineOptions {
            k: self.k,
            a_max: self.caps.a_max,
            m_max: self.caps.m_max,
            l_min: self.l_min(),
            c_max: self.caps.c_max,
            embed: self.embed_options(),
        }
    }
}

/// One iteration of the loop, recorded before the GAP is updated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceStep {
    pub index: usize,
    pub rank: usize,
    pub cardinality: usize,
    /// `F_i = |Q_i| P_mu(v^i; Q_i)`.
    #[serde(with = "crate::serial::ratio")]
    pub potential: BigRational,
    /// `P_mu(v^i; Q_i)`.
    #[serde(with = "crate::serial::ratio")]
    pub concentration: BigRational,
    pub word_len: usize,
    pub bad_count: usize,
    #[serde(with = "crate::serial::int_opt")]
    pub v0: Option<i64>,
    #[serde(with = "crate::serial::ratio_opt")]
    pub score: Option<BigRational>,
    /// 1-based positions in the input word removed at this step.
    pub removed: Vec<usize>,
    pub proper_step: bool,
    pub embedded: bool,
    /// `F_i / F_{i-1}` for `i >= 1`.
    #[serde(with = "crate::serial::ratio_opt")]
    pub potential_ratio: Option<BigRational>,
    /// `P_mu(v^i; Q_i) / P_mu(v^{i-1}; Q_{i-1})` for `i >= 1`.
    #[serde(with = "crate::serial::ratio_opt")]
    pub comparison_ratio: Option<BigRational>,
    pub gap: Gap,
}

#[derive(Clone, Debug, Serialize)]
pub struct Rejection {
    #[serde(with = "crate::serial::int")]
    pub value: i64,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct InverseResult {
    pub n: usize,
    pub d: usize,
    pub k: u64,
    pub mu: Density,
    /// Density actually used by the loop (`mu / 4` when `mu > 1/2`).
    pub mu_run: Density,
    #[serde(with = "crate::serial::ratio")]
    pub p_value: BigRational,
    #[serde(with = "crate::serial::ratio")]
    pub threshold: BigRational,
    /// Number of extension steps `T`.
    pub steps: usize,
    pub step_cap: usize,
    pub stopped_gap: Gap,
    pub final_gap: Gap,
    pub scaling: u64,
    /// Factor `S` with `final_gap` built from `(Q_T)_S`.
    #[serde(with = "crate::serial::ratio")]
    pub dilation: BigRational,
    /// 1-based positions.
    pub contained: Vec<usize>,
    pub exceptional: Vec<usize>,
    pub certificates: Vec<Certificate>,
    pub rejections: Vec<Rejection>,
    pub trace: Vec<TraceStep>,
    pub run_checks: Vec<Check>,
    pub verification: Vec<Check>,
}

impl InverseResult {
    pub fn passed(&self) -> bool {
        crate::check::all_passed(&self.run_checks) && crate::check::all_passed(&self.verification)
    }
}

fn with_trace(e: Error, trace: &[TraceStep]) -> Error {
    match e {
        Error::Embed { reason, best, .. } => Error::Embed {
            reason,
            best,
            trace: trace.to_vec(),
        },
        other => other,
    }
}

fn to_ratio(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Which distinct values of `values` are bad for `base`.
fn classify(values: &[i64], base: &ElementSet, cfg: &InverseConfig) -> Result<BTreeMap<i64, bool>> {
    let distinct: Vec<i64> = values.iter().copied().collect::<ElementSet>().elements().to_vec();
    distinct
        .par_iter()
        .map(|&x| Ok((x, is_bad_against(x, base, cfg.k, &cfg.big_k, cfg.limits.enumeration_guard)?)))
        .collect()
}

pub fn run_inverse(v: &Word, cfg: &InverseConfig) -> Result<InverseResult> {
    let n = v.len();
    cfg.validate(n)?;
    let p0 = concentration_with(v, cfg.mu, &cfg.limits)?.value;
    let threshold = cfg.threshold();
    if p0 < threshold {
        return Err(Error::Precondition {
            p: p0,
            threshold: ratio_string(&threshold),
        });
    }
    let mu_run = if cfg.mu.at_most_half() {
        cfg.mu
    } else {
        cfg.mu.divided_by(4)?
    };
    let values = v.to_i64s()?;
    let k2 = (cfg.k * cfg.k) as usize;
    let guard = cfg.limits.enumeration_guard;
    let cap = cfg.limits.support_cap;
    let step_cap = cfg.step_cap();

    let mut positions: Vec<usize> = (0..n).collect();
    let mut q = Gap::zero();
    let mut qset = ElementSet::from_iter([0]);
    let mut trace: Vec<TraceStep> = Vec::new();
    let mut run_checks = vec![Check::new(
        "precondition",
        true,
        format!("P = {} >= C0 k^-d = {}", ratio_string(&p0), ratio_string(&threshold)),
    )];

    loop {
        let index = trace.len();
        let word: Vec<i64> = positions.iter().map(|&i| values[i]).collect();
        let diff = difference_pmf(&qset)?;
        let walk = walk_pmf(&Word::from_i64s(&word), mu_run, &cfg.limits)?;
        let p_i = generalized_value(&walk, &diff, mu_run, cap)?;
        let f_i = &p_i * to_ratio(qset.len());
        if f_i > BigRational::one() {
            return Err(Error::Inconsistency(format!("potential F_{index} = {f_i} exceeds 1")));
        }
        let bad = classify(&word, &qset, cfg)?;
        let bad_positions: Vec<usize> = positions.iter().copied().filter(|&i| bad[&values[i]]).collect();
        let (potential_ratio, comparison_ratio) = match trace.last() {
            Some(prev) => (
                Some(&f_i / &prev.potential),
                Some(&p_i / &prev.concentration),
            ),
            None => (None, None),
        };
        let mut step = TraceStep {
            index,
            rank: q.rank(),
            cardinality: qset.len(),
            potential: f_i,
            concentration: p_i.clone(),
            word_len: word.len(),
            bad_count: bad_positions.len(),
            v0: None,
            score: None,
            removed: Vec::new(),
            proper_step: false,
            embedded: false,
            potential_ratio,
            comparison_ratio,
            gap: q.clone(),
        };
        if bad_positions.len() < k2 {
            trace.push(step);
            break;
        }
        if index >= step_cap {
            trace.push(step);
            return Err(Error::Divergence { limit: step_cap, trace });
        }

        let removed: Vec<usize> = bad_positions[..k2].to_vec();
        let removed_set: HashSet<usize> = removed.iter().copied().collect();
        let rest: Vec<usize> = positions.iter().copied().filter(|i| !removed_set.contains(i)).collect();
        let removed_vals: Vec<i64> = removed.iter().map(|&i| values[i]).collect();
        let rest_vals: Vec<i64> = rest.iter().map(|&i| values[i]).collect();
        let sel = select::select_against(&removed_vals, &rest_vals, &diff, &p_i, cfg.k, mu_run, &cfg.limits)?;

        let ext = q.extend(sel.v0, cfg.k);
        let ext_set = ext.enumerate(guard)?;
        let proper = BigUint::from(ext_set.len()) == ext.volume();
        let (next, next_set) = if proper {
            (ext, ext_set)
        } else {
            let emb = embed_proper(&ext, 1, &cfg.embed_options()).map_err(|e| with_trace(e, &trace))?;
            let set = emb.gap.enumerate(guard)?;
            (emb.gap, set)
        };
        if proper && next.rank() != q.rank() + 1 || !proper && next.rank() > q.rank() {
            return Err(Error::Inconsistency(format!(
                "rank went from {} to {} on a {} step",
                q.rank(),
                next.rank(),
                if proper { "proper" } else { "improper" }
            )));
        }
        let grown = to_ratio(next_set.len());
        let before = to_ratio(qset.len());
        if grown < &cfg.big_k * &before || proper && grown < &before * to_ratio(cfg.k as usize) {
            return Err(Error::Inconsistency(format!(
                "|Q_{}| = {} did not grow enough from {}",
                index + 1,
                next_set.len(),
                qset.len()
            )));
        }

        step.v0 = Some(sel.v0);
        step.score = Some(sel.score);
        step.removed = removed.iter().map(|i| i + 1).collect();
        step.proper_step = proper;
        step.embedded = !proper;
        trace.push(step);
        q = next;
        qset = next_set;
        positions = rest;
    }

    let steps = trace.len() - 1;
    let proper_steps = trace.iter().filter(|s| s.proper_step).count();
    run_checks.push(Check::new(
        "potential_bounded",
        true,
        format!("F_i <= 1 for all {} recorded steps", trace.len()),
    ));
    run_checks.push(Check::new(
        "growth",
        true,
        format!("|Q_(i+1)| >= K |Q_i| on all {steps} steps, and >= k |Q_i| on proper steps"),
    ));
    run_checks.push(Check::new(
        "removals",
        trace.iter().all(|s| s.removed.len() <= k2),
        format!("{} coordinates removed over {steps} steps, at most {k2} each", steps * k2),
    ));
    run_checks.push(Check::new(
        "step_cap",
        steps <= step_cap,
        format!("T = {steps} <= {step_cap}"),
    ));
    run_checks.push(Check::new(
        "proper_steps",
        proper_steps < cfg.d,
        format!("{proper_steps} proper steps, at most d - 1 = {}", cfg.d - 1),
    ));
    run_checks.push(Check::new(
        "stopped_rank",
        q.rank() < cfg.d,
        format!("rank(Q_T) = {} <= d - 1 = {}", q.rank(), cfg.d - 1),
    ));
    let min_f = trace.iter().filter_map(|s| s.potential_ratio.clone()).min();
    let f_floor = &cfg.big_k * &cfg.c_min;
    run_checks.push(Check::new(
        "potential_ratio",
        min_f.as_ref().is_none_or(|r| *r >= f_floor),
        match &min_f {
            Some(r) => format!("min F_(i+1)/F_i = {} against K c_min = {}", ratio_string(r), ratio_string(&f_floor)),
            None => "no extension steps".into(),
        },
    ));
    let min_c = trace.iter().filter_map(|s| s.comparison_ratio.clone()).min();
    run_checks.push(Check::new(
        "comparison_ratio",
        min_c.as_ref().is_none_or(|r| *r >= cfg.c_min),
        match &min_c {
            Some(r) => format!("min P_(i+1)/P_i = {} against c_min = {}", ratio_string(r), ratio_string(&cfg.c_min)),
            None => "no extension steps".into(),
        },
    ));
    // |Q_T| <= slack k^{eps/2} / P
    let eps_half = crate::numeric::small_ratio(&(&cfg.eps / rat(2, 1)))?;
    let lhs = to_ratio(qset.len()) * &p0 / &cfg.slack;
    run_checks.push(Check::new(
        "stopping_bound",
        crate::numeric::le_rational_powers(&lhs, &[PowFactor::new(to_ratio(cfg.k as usize), eps_half)]),
        format!("|Q_T| = {} against slack k^(eps/2) / P", qset.len()),
    ));

    // every coordinate is classified against Q_T; good ones are refined
    let stopped_gap = q;
    let all_bad = classify(&values, &qset, cfg)?;
    let refiner = Refiner::new(&stopped_gap, &cfg.refine_options(), guard)?;
    let good: Vec<i64> = all_bad.iter().filter(|(_, &b)| !b).map(|(&x, _)| x).collect();
    let outcomes: Vec<(i64, Refinement)> = good
        .par_iter()
        .map(|&x| Ok((x, refiner.refine(x)?)))
        .collect::<Result<_>>()?;
    let mut certificates = Vec::new();
    let mut rejections: Vec<Rejection> = all_bad
        .iter()
        .filter(|(_, &b)| b)
        .map(|(&x, _)| Rejection {
            value: x,
            reason: "bad for the stopping GAP".into(),
        })
        .collect();
    for (x, outcome) in outcomes {
        match outcome {
            Refinement::Certified(c) => certificates.push(c),
            Refinement::Rejected(reason) => rejections.push(Rejection { value: x, reason }),
        }
    }
    let fin = finalize(&stopped_gap, &certificates, &cfg.refine_options())?;
    for &x in &fin.dropped {
        rejections.push(Rejection {
            value: x,
            reason: format!("certificate step exceeds C_max = {}", cfg.caps.c_max),
        });
    }
    rejections.sort_by_key(|r| r.value);
    let kept: HashSet<i64> = fin.certified.iter().copied().collect();
    let (contained, exceptional): (Vec<usize>, Vec<usize>) = (1..=n).partition(|&i| kept.contains(&values[i - 1]));

    let mut result = InverseResult {
        n,
        d: cfg.d,
        k: cfg.k,
        mu: cfg.mu,
        mu_run,
        p_value: p0,
        threshold,
        steps,
        step_cap,
        stopped_gap,
        final_gap: fin.gap,
        scaling: fin.scaling,
        dilation: fin.dilation,
        contained,
        exceptional,
        certificates: fin.certificates,
        rejections,
        trace,
        run_checks,
        verification: Vec::new(),
    };
    result.verification = verify_result(v, &result, cfg)?;
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(d: usize, k: u64, mu: Density, big_k: i64, c0: BigRational) -> InverseConfig {
        InverseConfig {
            big_k: rat(big_k, 1),
            c0,
            ..InverseConfig::new(d, k, mu)
        }
    }

    #[test]
    fn all_equal_word_needs_one_extension() {
        let v = Word::from_i64s(&[5; 100]);
        let r = run_inverse(&v, &cfg(2, 5, Density::HALF, 2, rat(1, 1))).unwrap();
        assert_eq!(r.steps, 1);
        assert_eq!(r.trace[0].v0, Some(5));
        assert_eq!(r.trace[1].gap, Gap::from_ints(&[5], &[5]).unwrap());
        assert_eq!(r.final_gap, Gap::from_ints(&[5], &[5]).unwrap());
        assert_eq!(r.scaling, 1);
        assert_eq!(r.contained.len(), 100);
        assert!(r.exceptional.is_empty());
        assert!(r.passed(), "{:?} {:?}", r.run_checks, r.verification);
    }

    #[test]
    fn dissociated_word_fails_the_precondition() {
        let v = Word::from_i64s(&(0..20).map(|i| 1i64 << i).collect::<Vec<_>>());
        let err = run_inverse(&v, &cfg(2, 4, Density::ONE, 8, rat(100, 1))).unwrap_err();
        match err {
            Error::Precondition { p, threshold } => {
                assert_eq!(p, rat(1, 1 << 20));
                assert_eq!(threshold, "25/4");
            }
            other => panic!("expected a precondition failure, got {other:?}"),
        }
    }

    #[test]
    fn trace_starts_from_the_trivial_gap() {
        let v = Word::from_i64s(&[5; 100]);
        let r = run_inverse(&v, &cfg(2, 5, Density::HALF, 2, rat(1, 1))).unwrap();
        let first = &r.trace[0];
        assert_eq!((first.rank, first.cardinality), (0, 1));
        assert_eq!(first.potential, r.p_value);
        assert_eq!(first.removed, (1..=25).collect::<Vec<_>>());
    }

    #[test]
    fn config_validation() {
        let mut c = InverseConfig::new(2, 1, Density::HALF);
        assert!(c.validate(100).is_err());
        c.k = 11;
        assert!(c.validate(100).is_err());
        c.k = 10;
        assert!(c.validate(100).is_ok());
        c.big_k = rat(3, 2);
        assert!(c.validate(100).is_err());
    }

    #[test]
    fn step_cap_uses_ceil_log() {
        let c = InverseConfig::new(2, 9, Density::HALF);
        assert_eq!(c.log_k_steps(), 2);
        assert_eq!(c.step_cap(), 16);
        let c = InverseConfig::new(3, 5, Density::HALF);
        assert_eq!(c.log_k_steps(), 1);
        assert_eq!(c.step_cap(), 12);
    }
}
