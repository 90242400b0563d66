//! Embedding a GAP into a `t`-proper GAP of smaller rank.
//!
//! Two constructions are tried in order. The first covers the whole set by a
//! single progression `[-M, M] g` with `g` the gcd of the elements. The second
//! finds a linear relation `m . w = 0` among the steps, completes `m` to a
//! unimodular matrix and rewrites every step in the remaining coordinates,
//! which removes one dimension per relation.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{ElementSet, Gap};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct EmbedOptions {
    /// Largest accepted `|Q'| / |Q|`.
    pub ratio_budget: BigRational,
    pub max_rank: usize,
    pub guard: usize,
}

impl Default for EmbedOptions {
    fn default() -> Self {
        EmbedOptions {
            ratio_budget: BigRational::from_integer(32.into()),
            max_rank: 3,
            guard: 10_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbedMethod {
    Identity,
    RankOneCover,
    Elimination,
}

#[derive(Clone, Debug, Serialize)]
pub struct Embedding {
    pub gap: Gap,
    /// `|Q'| / |Q|`.
    #[serde(with = "crate::serial::ratio")]
    pub ratio: BigRational,
    pub method: EmbedMethod,
    /// Relations eliminated (zero for the other methods).
    pub eliminations: usize,
}

fn fail(reason: String, best: Option<Gap>) -> Error {
    Error::Embed {
        reason,
        best,
        trace: Vec::new(),
    }
}

/// Returns a `t`-proper GAP containing `Q`, of rank at most `rank(Q) - 1` unless `Q` is
/// already `t`-proper. Every postcondition is verified by enumeration before returning.
pub fn embed_proper(q: &Gap, t: u64, opts: &EmbedOptions) -> Result<Embedding> {
    if t == 0 {
        return Err(Error::domain("t must be a positive integer"));
    }
    if q.rank() > opts.max_rank {
        return Err(Error::domain(format!(
            "rank {} exceeds the embedding rank cap {}",
            q.rank(),
            opts.max_rank
        )));
    }
    let tr = BigRational::from_integer(BigInt::from(t));
    let base = q.enumerate(opts.guard)?;
    if q.is_t_proper(&tr, opts.guard)? {
        return Ok(Embedding {
            gap: q.clone(),
            ratio: BigRational::one(),
            method: EmbedMethod::Identity,
            eliminations: 0,
        });
    }

    let cover = rank_one_cover(&base)?;
    let mut best = cover.clone();
    if let Ok(e) = verified(q, &base, cover, &tr, opts, EmbedMethod::RankOneCover, 0) {
        return Ok(e);
    }

    let mut current = q.clone();
    let mut eliminations = 0;
    while !current.is_t_proper(&tr, opts.guard)? {
        let relation = find_relation(&current.dilate(&tr), opts.guard)?
            .ok_or_else(|| Error::Inconsistency(format!("improper GAP {current} has no relation")))?;
        current = eliminate(&current, &relation)?;
        eliminations += 1;
    }
    let candidate_size = current.enumerate(opts.guard).map(|s| s.len()).unwrap_or(usize::MAX);
    let best_size = best.enumerate(opts.guard).map(|s| s.len()).unwrap_or(usize::MAX);
    if candidate_size < best_size {
        best = current.clone();
    }
    verified(q, &base, current, &tr, opts, EmbedMethod::Elimination, eliminations)
        .map_err(|e| match e {
            Error::Embed { reason, .. } => fail(reason, Some(best)),
            other => other,
        })
}

fn verified(
    q: &Gap,
    base: &ElementSet,
    candidate: Gap,
    t: &BigRational,
    opts: &EmbedOptions,
    method: EmbedMethod,
    eliminations: usize,
) -> Result<Embedding> {
    let set = candidate.enumerate(opts.guard)?;
    if !base.is_subset(&set) {
        return Err(fail(format!("{candidate} does not contain {q}"), Some(candidate)));
    }
    if !candidate.is_t_proper(t, opts.guard)? {
        return Err(fail(format!("{candidate} is not {t}-proper"), Some(candidate)));
    }
    if candidate.rank() + 1 > q.rank() {
        return Err(fail(
            format!("rank {} did not drop below {}", candidate.rank(), q.rank()),
            Some(candidate),
        ));
    }
    let ratio = BigRational::new(BigInt::from(set.len()), BigInt::from(base.len()));
    if ratio > opts.ratio_budget {
        return Err(fail(
            format!("size ratio {ratio} exceeds the budget {}", opts.ratio_budget),
            Some(candidate),
        ));
    }
    Ok(Embedding {
        gap: candidate,
        ratio,
        method,
        eliminations,
    })
}

/// `[-M, M] g` with `g` the gcd of the elements and `M = max |x| / g`; `{0}` if all vanish.
fn rank_one_cover(set: &ElementSet) -> Result<Gap> {
    let g = set.elements().iter().fold(0u64, |g, &x| g.gcd(&x.unsigned_abs()));
    if g == 0 {
        return Ok(Gap::zero());
    }
    let m = set.max_abs().unwrap_or(0) / g;
    let step = i64::try_from(g).map_err(|_| Error::Overflow(format!("gcd {g}")))?;
    Gap::from_ints(&[m as i64], &[step])
}

/// A primitive nonzero `m` with `sum m_i w_i = 0`, read off from two coefficient vectors
/// of `q` with the same sum.
fn find_relation(q: &Gap, guard: usize) -> Result<Option<Vec<i64>>> {
    let bounds = q.int_dims()?;
    let sums = q.all_sums(guard)?;
    let decode = |mut idx: usize| -> Vec<i64> {
        // all_sums iterates the last dimension fastest
        let mut c = vec![0i64; bounds.len()];
        for i in (0..bounds.len()).rev() {
            let width = (2 * bounds[i] + 1) as usize;
            c[i] = (idx % width) as i64 - bounds[i];
            idx /= width;
        }
        c
    };
    let mut first = HashMap::with_capacity(sums.len());
    for (idx, &s) in sums.iter().enumerate() {
        if let Some(&prev) = first.get(&s) {
            let a = decode(idx);
            let b = decode(prev);
            let mut m: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
            let g = m.iter().fold(0i64, |g, x| g.gcd(x));
            m.iter_mut().for_each(|x| *x /= g);
            return Ok(Some(m));
        }
        first.insert(s, idx);
    }
    Ok(None)
}

/// Removes the relation `m` (primitive, `m . w = 0`) from `q`.
///
/// Column operations reduce the row `m` to `e_1`, giving a unimodular `V` with `m V = e_1`
/// and its inverse `W`. With `y = W w` we have `y_1 = m . w = 0` and `w_i = sum_{j>=2} V_ij y_j`,
/// so `sum n_i w_i = sum_j (sum_i n_i V_ij) y_j` and `|sum_i n_i V_ij| <= sum_i |V_ij| floor(N_i)`.
fn eliminate(q: &Gap, m: &[i64]) -> Result<Gap> {
    let r = m.len();
    let ovf = || Error::Overflow("unimodular completion".into());
    let mut row = m.to_vec();
    let mut v: Vec<Vec<i64>> = (0..r).map(|i| (0..r).map(|j| i64::from(i == j)).collect()).collect();
    let mut w = v.clone();
    loop {
        let nonzero: Vec<usize> = (0..r).filter(|&i| row[i] != 0).collect();
        let &pivot = nonzero
            .iter()
            .min_by_key(|&&i| (row[i].unsigned_abs(), i))
            .ok_or_else(|| Error::Inconsistency("zero relation".into()))?;
        if nonzero.len() == 1 {
            // move to column 0 and normalise the sign
            row.swap(0, pivot);
            for vr in v.iter_mut() {
                vr.swap(0, pivot);
            }
            w.swap(0, pivot);
            if row[0] < 0 {
                row[0] = -row[0];
                for vr in v.iter_mut() {
                    vr[0] = -vr[0];
                }
                for x in w[0].iter_mut() {
                    *x = -*x;
                }
            }
            break;
        }
        for &j in nonzero.iter().filter(|&&j| j != pivot) {
            let quot = row[j].div_euclid(row[pivot]);
            row[j] -= quot * row[pivot];
            for vr in v.iter_mut() {
                vr[j] = vr[j].checked_sub(quot.checked_mul(vr[pivot]).ok_or_else(ovf)?).ok_or_else(ovf)?;
            }
            for c in 0..r {
                w[pivot][c] = w[pivot][c]
                    .checked_add(quot.checked_mul(w[j][c]).ok_or_else(ovf)?)
                    .ok_or_else(ovf)?;
            }
        }
    }
    if row[0] != 1 {
        return Err(Error::Inconsistency(format!("relation {m:?} is not primitive")));
    }
    let bounds = q.int_dims()?;
    let steps = q.steps();
    let mut dims = Vec::new();
    let mut new_steps = Vec::new();
    for j in 1..r {
        let y: i128 = (0..r).map(|c| w[j][c] as i128 * steps[c] as i128).sum();
        let y = i64::try_from(y).map_err(|_| ovf())?;
        let bound: i128 = (0..r).map(|i| v[i][j].unsigned_abs() as i128 * bounds[i] as i128).sum();
        let bound = i64::try_from(bound).map_err(|_| ovf())?;
        if y != 0 && bound != 0 {
            dims.push(BigRational::from_integer(bound.into()));
            new_steps.push(y);
        }
    }
    let y0: i128 = (0..r).map(|c| w[0][c] as i128 * steps[c] as i128).sum();
    if !y0.is_zero() {
        return Err(Error::Inconsistency(format!("{m:?} is not a relation of {q}")));
    }
    Gap::new(dims, new_steps)
}
