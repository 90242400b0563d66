use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::gap::ElementSet;
use crate::numeric::Density;
use crate::walks::{generalized_concentration_with, Limits, Word};

pub const PARTS: [&str; 7] = [
    "permutation",
    "concatenation",
    "density",
    "repetition",
    "holder",
    "pigeonhole",
    "crude_bound",
];

/// One random instance of the word-calculus properties with the outcome of each part.
#[derive(Clone, Debug, Serialize)]
pub struct LemmaCase {
    pub index: u64,
    pub v: Word,
    pub qset: ElementSet,
    pub mu: Density,
    /// Density used by the parts that need `mu <= 1/2`.
    pub mu_half: Density,
    /// Outcomes in the order of [`PARTS`].
    pub parts: Vec<bool>,
    pub failures: Vec<String>,
}

impl LemmaCase {
    pub fn passed(&self) -> bool {
        self.parts.iter().all(|&p| p)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PartTally {
    pub part: String,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaSuiteReport {
    pub seed: u64,
    pub cases: usize,
    pub parts: Vec<PartTally>,
    /// Cases with at least one failing part.
    pub failing: Vec<LemmaCase>,
}

impl LemmaSuiteReport {
    pub fn passed(&self) -> bool {
        self.failing.is_empty()
    }
}

fn word(rng: &mut ChaCha8Rng, len: usize) -> Word {
    Word::from_i64s(&(0..len).map(|_| rng.gen_range(-6..=6)).collect::<Vec<_>>())
}

fn cat(parts: &[&Word]) -> Word {
    parts.iter().fold(Word::default(), |acc, w| acc.concat(w))
}

/// Generates and checks case `index` of the suite seeded by `seed`.
pub fn lemma31_case(seed: u64, index: u64, limits: &Limits) -> Result<LemmaCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);

    let n = rng.gen_range(1..=10);
    let v = word(&mut rng, n);
    let qlen = rng.gen_range(1..=4);
    let qset: ElementSet = (0..qlen).map(|_| rng.gen_range(-8..=8)).collect();
    let q = rng.gen_range(1..=8u64);
    let mu = Density::new(rng.gen_range(1..=q), q)?;
    let mu_half = if mu.at_most_half() { mu } else { mu.divided_by(2)? };

    let p = |w: &Word, m: Density| -> Result<BigRational> {
        Ok(generalized_concentration_with(w, m, &qset, limits)?.value)
    };
    let base = p(&v, mu)?;
    let mut parts = Vec::with_capacity(PARTS.len());
    let mut failures = Vec::new();
    let mut record = |ok: bool, detail: String| {
        if !ok {
            failures.push(format!("{}: {detail}", PARTS[parts.len()]));
        }
        parts.push(ok);
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let permuted = p(&v.permuted(&order), mu)?;
    record(permuted == base, format!("{permuted} != {base}"));

    let wlen = rng.gen_range(1..=4);
    let w = word(&mut rng, wlen);
    let longer = p(&v.concat(&w), mu)?;
    record(longer <= base, format!("P(vw) = {longer} > P(v) = {base} with w = {:?}", w.entries()));

    let c = [4, 5, 8][rng.gen_range(0..3)];
    let lazier = p(&v, mu.divided_by(c)?)?;
    record(base <= lazier, format!("P at mu/{c} = {lazier} < {base}"));

    let k = rng.gen_range(1..=3usize);
    let short = Word::new(v.entries()[..n.min(6)].to_vec());
    let lhs = p(&short, mu_half)?;
    let rhs = p(&short.repeat(k), mu_half.divided_by(k as u64)?)?;
    record(lhs <= rhs, format!("k = {k}: {lhs} > {rhs}"));

    let m = rng.gen_range(1..=3usize);
    let ws: Vec<Word> = (0..m)
        .map(|_| {
            let len = rng.gen_range(1..=2);
            word(&mut rng, len)
        })
        .collect();
    let mut all = vec![&v];
    all.extend(ws.iter());
    let joint = p(&cat(&all), mu_half)?;
    let singles = ws
        .iter()
        .map(|wj| p(&v.concat(&wj.repeat(m)), mu_half))
        .collect::<Result<Vec<_>>>()?;
    let product = singles.iter().fold(BigRational::one(), |acc, x| acc * x);
    record(
        joint.pow(m as i32) <= product,
        format!("m = {m}: {joint}^{m} > {product}"),
    );
    record(
        singles.iter().any(|s| joint <= *s),
        format!("m = {m}: {joint} exceeds every P(v w_j^[m])"),
    );

    let crude = &base * BigRational::from_integer(BigInt::from(qset.len()));
    record(crude <= BigRational::one(), format!("|Q| P = {crude}"));

    Ok(LemmaCase {
        index,
        v,
        qset,
        mu,
        mu_half,
        parts,
        failures,
    })
}

/// Runs `cases` seeded cases in parallel; results are independent of the schedule.
pub fn lemma31_suite(cases: usize, seed: u64, limits: &Limits) -> Result<LemmaSuiteReport> {
    let results = (0..cases as u64)
        .into_par_iter()
        .map(|i| lemma31_case(seed, i, limits))
        .collect::<Result<Vec<_>>>()?;
    let parts = PARTS
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let passed = results.iter().filter(|c| c.parts[j]).count();
            PartTally {
                part: name.to_string(),
                passed,
                failed: results.len() - passed,
            }
        })
        .collect();
    Ok(LemmaSuiteReport {
        seed,
        cases,
        parts,
        failing: results.into_iter().filter(|c| !c.passed()).collect(),
    })
}
