//! Seeded batch drivers over random instances. Case `i` of a suite seeded by `s`
//! draws from ChaCha8 seeded with `s` on stream `i`, so results do not depend on
//! the evaluation schedule.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{
    brute_distribution, classical_bounds_check, comparison_ratio, fourier_quadrature, forward_lo_witness,
    intersection_inequalities, percentiles, trend_within, ComparisonCase, IntersectionRecord, Percentiles,
    RatioRecord, Trend,
};
use crate::error::Result;
use crate::gap::{ElementSet, Gap};
use crate::instances::{generate_instance, InstanceSpec};
use crate::numeric::{binomial, rat, Density};
use crate::walks::{concentration_with, walk_distribution_with, Limits, Word};

fn case_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn pick_density(rng: &mut ChaCha8Rng) -> Density {
    [Density::ONE, Density::HALF, Density::new(1, 3).expect("valid density")][rng.gen_range(0..3)]
}

fn random_word(rng: &mut ChaCha8Rng, max_len: usize, bound: i64) -> Word {
    let n = rng.gen_range(0..=max_len);
    Word::from_i64s(&(0..n).map(|_| rng.gen_range(-bound..=bound)).collect::<Vec<_>>())
}

fn random_gap(rng: &mut ChaCha8Rng, min_rank: usize, max_rank: usize, max_dim: i64, max_step: i64) -> Gap {
    let r = rng.gen_range(min_rank..=max_rank);
    let dims: Vec<i64> = (0..r).map(|_| rng.gen_range(1..=max_dim)).collect();
    let steps: Vec<i64> = (0..r).map(|_| rng.gen_range(-max_step..=max_step)).collect();
    Gap::from_ints(&dims, &steps).expect("positive dimensions")
}

#[derive(Clone, Debug, Serialize)]
pub struct EquivalenceReport {
    pub seed: u64,
    pub cases: usize,
    pub max_len: usize,
    /// Indices of cases where the two distributions differ.
    pub mismatches: Vec<u64>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Convolution engine against exhaustive enumeration on words of length at most 12
/// with entries in `[-20, 20]` and `mu` in `{1, 1/2, 1/3}`.
pub fn equivalence_suite(cases: usize, seed: u64, limits: &Limits) -> Result<EquivalenceReport> {
    let max_len = 12;
    let outcomes = (0..cases as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = case_rng(seed, i);
            let v = random_word(&mut rng, max_len, 20);
            let mu = pick_density(&mut rng);
            Ok((i, walk_distribution_with(&v, mu, limits)? == brute_distribution(&v, mu)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EquivalenceReport {
        seed,
        cases,
        max_len,
        mismatches: outcomes.into_iter().filter(|(_, ok)| !ok).map(|(i, _)| i).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FourierReport {
    pub seed: u64,
    pub cases: usize,
    pub nodes: u64,
    pub tolerance: f64,
    pub max_error: f64,
    pub worst_case: u64,
    pub passed: bool,
}

/// Quadrature of the Fourier identity against exact point masses, at the mode of each
/// walk and at one further random point of its range.
pub fn fourier_suite(cases: usize, seed: u64, nodes: u64, tolerance: f64, limits: &Limits) -> Result<FourierReport> {
    let errors = (0..cases as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = case_rng(seed, i);
            let n = rng.gen_range(1..=8);
            let v = Word::from_i64s(&(0..n).map(|_| rng.gen_range(-10..=10)).collect::<Vec<_>>());
            let mu = pick_density(&mut rng);
            let dist = walk_distribution_with(&v, mu, limits)?;
            let (_, modes) = dist.pmf().max_weight();
            let span: i64 = v.to_i64s()?.iter().map(|x| x.abs()).sum();
            let other = BigInt::from(rng.gen_range(-span..=span));
            let mut worst = 0.0f64;
            for a in [modes[0].clone(), other] {
                let exact = dist.probability_at(&a).to_f64().unwrap_or(f64::NAN);
                worst = worst.max((fourier_quadrature(&v, mu, &a, nodes) - exact).abs());
            }
            Ok((i, worst))
        })
        .collect::<Result<Vec<_>>>()?;
    let (worst_case, max_error) = errors
        .iter()
        .copied()
        .fold((0, 0.0), |acc, (i, e)| if e > acc.1 { (i, e) } else { acc });
    Ok(FourierReport {
        seed,
        cases,
        nodes,
        tolerance,
        max_error,
        worst_case,
        passed: errors.iter().all(|&(_, e)| e <= tolerance),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ErdosExhaustiveReport {
    pub n: usize,
    pub alphabet: Vec<i64>,
    pub words: usize,
    #[serde(with = "crate::serial::ratio")]
    pub bound: BigRational,
    #[serde(with = "crate::serial::ratio")]
    pub max_p: BigRational,
    /// Words whose concentration exceeds the bound.
    pub violations: Vec<Vec<i64>>,
    /// Constant words that fail to attain the bound.
    pub constant_misses: Vec<Vec<i64>>,
    /// Number of words attaining the bound.
    pub extremal: usize,
}

impl ErdosExhaustiveReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.constant_misses.is_empty()
    }
}

/// Every word of length `n` over `alphabet` (nonzero letters) against `binom(n, n/2) / 2^n`.
pub fn erdos_exhaustive(n: usize, alphabet: &[i64], limits: &Limits) -> Result<ErdosExhaustiveReport> {
    let bound = BigRational::new(
        BigInt::from(binomial(n as u64, n as u64 / 2)),
        BigInt::from(1) << n,
    );
    let total = alphabet.len().pow(n as u32);
    let results = (0..total)
        .into_par_iter()
        .map(|mut code| {
            let word: Vec<i64> = (0..n)
                .map(|_| {
                    let x = alphabet[code % alphabet.len()];
                    code /= alphabet.len();
                    x
                })
                .collect();
            let p = classical_bounds_check(&Word::from_i64s(&word), limits)?.p;
            Ok((word, p))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_p = results.iter().map(|(_, p)| p.clone()).max().unwrap_or_else(BigRational::zero);
    Ok(ErdosExhaustiveReport {
        n,
        alphabet: alphabet.to_vec(),
        words: total,
        violations: results.iter().filter(|(_, p)| *p > bound).map(|(w, _)| w.clone()).collect(),
        constant_misses: results
            .iter()
            .filter(|(w, p)| w.windows(2).all(|x| x[0] == x[1]) && *p != bound)
            .map(|(w, _)| w.clone())
            .collect(),
        extremal: results.iter().filter(|(_, p)| *p == bound).count(),
        bound,
        max_p,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ForwardCase {
    pub index: u64,
    pub gap: Gap,
    pub n: usize,
    pub mu: Density,
    pub size_ceil: usize,
    pub passed: bool,
    pub record: RatioRecord,
}

#[derive(Clone, Debug, Serialize)]
pub struct ForwardSuiteReport {
    pub seed: u64,
    pub pairs: usize,
    pub failures: Vec<ForwardCase>,
    pub ratio_percentiles: Option<Percentiles>,
}

impl ForwardSuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Random `(Q, v)` pairs with `rank(Q) <= 2`, dimensions at most 5 and `n <= 200` elements
/// of `Q`, each checked against `P_mu(v) >= 1 / (2 |Q_t|)`.
pub fn forward_suite(pairs: usize, seed: u64, limits: &Limits) -> Result<ForwardSuiteReport> {
    let cases = (0..pairs as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = case_rng(seed, i);
            let gap = random_gap(&mut rng, 1, 2, 5, 12);
            let set = gap.enumerate(limits.enumeration_guard)?;
            let n = rng.gen_range(1..=200);
            let v = Word::from_i64s(
                &(0..n)
                    .map(|_| set.elements()[rng.gen_range(0..set.len())])
                    .collect::<Vec<_>>(),
            );
            let mu = pick_density(&mut rng);
            let w = forward_lo_witness(&gap, &v, mu, limits)?;
            Ok(ForwardCase {
                index: i,
                gap,
                n,
                mu,
                size_ceil: w.size_ceil,
                passed: w.passed(),
                record: w.record,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<BigRational> = cases.iter().map(|c| c.record.ratio.clone()).collect();
    Ok(ForwardSuiteReport {
        seed,
        pairs,
        ratio_percentiles: percentiles(&ratios),
        failures: cases.into_iter().filter(|c| !c.passed).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct IntersectionSuiteReport {
    pub seed: u64,
    pub pairs: usize,
    pub failures: Vec<IntersectionRecord>,
    /// Percentiles of `|P cap Q| |P + Q| / (|P| |Q|)`.
    pub ratio_percentiles: Option<Percentiles>,
}

impl IntersectionSuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Random GAP pairs with rank at most 3 and dimensions at most 8.
pub fn intersection_suite(pairs: usize, seed: u64, guard: usize) -> Result<IntersectionSuiteReport> {
    let records = (0..pairs as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = case_rng(seed, i);
            let p = random_gap(&mut rng, 0, 3, 8, 40);
            let q = random_gap(&mut rng, 0, 3, 8, 40);
            intersection_inequalities(&p, &q, guard)
        })
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<BigRational> = records.iter().map(|r| r.record.ratio.clone()).collect();
    Ok(IntersectionSuiteReport {
        seed,
        pairs,
        ratio_percentiles: percentiles(&ratios),
        failures: records.into_iter().filter(|r| !r.passed()).collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub n: usize,
    pub record: RatioRecord,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrendReport {
    pub family: String,
    pub points: Vec<SweepPoint>,
    pub trend: Trend,
}

/// `(P_1(v) n^{3/2})^2` on `ap(n)`, whose square root is compared against a factor of `factor`.
pub fn classical_trend(ns: &[usize], factor: i64, limits: &Limits) -> Result<TrendReport> {
    let points = ns
        .par_iter()
        .map(|&n| {
            let v = generate_instance(&InstanceSpec::Ap { n }, limits.enumeration_guard)?;
            let p = concentration_with(&v, Density::ONE, limits)?.value;
            let record = RatioRecord::new(
                format!("ap(n={n})"),
                &p * &p * BigRational::from_integer(BigInt::from(n).pow(3)),
                BigRational::from_integer(1.into()),
            )?;
            Ok(SweepPoint { n, record })
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<BigRational> = points.iter().map(|p| p.record.ratio.clone()).collect();
    Ok(TrendReport {
        family: "classical_distinct_squared".into(),
        trend: trend_within(&values, &rat(factor * factor, 1))?,
        points,
    })
}

/// Comparison ratios on `ap(n)` with `v0 = 1`, `k = 3`, `Q = {0}` and `mu = 1/2`.
pub fn comparison_trend(ns: &[usize], factor: i64, limits: &Limits) -> Result<TrendReport> {
    let points = ns
        .par_iter()
        .map(|&n| {
            let case = ComparisonCase {
                v: generate_instance(&InstanceSpec::Ap { n }, limits.enumeration_guard)?,
                v0: 1,
                k: 3,
                qset: ElementSet::from_vec(vec![0]),
                mu: Density::HALF,
            };
            Ok(SweepPoint {
                n,
                record: comparison_ratio(&case, limits)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<BigRational> = points.iter().map(|p| p.record.ratio.clone()).collect();
    Ok(TrendReport {
        family: "comparison".into(),
        trend: trend_within(&values, &rat(factor, 1))?,
        points,
    })
}
