use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gap::{difference_set, embed_proper, sumset, ElementSet, EmbedOptions, Gap};
use crate::numeric::rat;

#[derive(Clone, Debug)]
pub struct RefineOptions {
    pub k: u64,
    pub a_max: u64,
    pub m_max: u64,
    pub l_min: u64,
    pub c_max: u64,
    pub embed: EmbedOptions,
}

/// `[-l, l] a x` lies in the `4m`-dilate of the stopping GAP.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certificate {
    #[serde(with = "crate::serial::int")]
    pub value: i64,
    pub a: u64,
    pub l: u64,
    pub m: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Refinement {
    Certified(Certificate),
    Rejected(String),
}

/// Shared state for refining many elements against one GAP.
pub struct Refiner {
    opts: RefineOptions,
    diff: ElementSet,
    /// `enumerate(Q_{4m})` for `m = 1..=m_max`.
    dilates: Vec<ElementSet>,
}

impl Refiner {
    pub fn new(q: &Gap, opts: &RefineOptions, guard: usize) -> Result<Self> {
        let set = q.enumerate(guard)?;
        let diff = difference_set(&set, &set, guard)?;
        let dilates = (1..=opts.m_max)
            .map(|m| q.dilate(&rat(4 * m as i64, 1)).enumerate(guard))
            .collect::<Result<_>>()?;
        Ok(Refiner {
            opts: opts.clone(),
            diff,
            dilates,
        })
    }

    pub fn refine(&self, x: i64) -> Result<Refinement> {
        let k = self.opts.k as i64;
        let mut a_set = Vec::new();
        for j in -2 * k..=2 * k {
            let jx = j.checked_mul(x).ok_or_else(|| Error::Overflow(format!("{j} * {x}")))?;
            if self.diff.contains(jx) {
                a_set.push(j);
            }
        }
        let a_set = ElementSet::from_vec(a_set);
        if a_set.len() <= 1 {
            return Ok(Refinement::Rejected(format!("A = {{j : j x in Q - Q}} is {{0}} for x = {x}")));
        }
        let mut iterated = a_set.clone();
        for m in 1..=self.opts.m_max {
            if m > 1 {
                iterated = sumset(&iterated, &a_set, usize::MAX)?;
            }
            for a in 1..=self.opts.a_max {
                let a = a as i64;
                let mut l = 0i64;
                while iterated.contains((l + 1) * a) {
                    l += 1;
                }
                if (l as u64) < self.opts.l_min {
                    continue;
                }
                let target = &self.dilates[m as usize - 1];
                let covered = (-l..=l).all(|j| {
                    (j * a)
                        .checked_mul(x)
                        .is_some_and(|y| target.contains(y))
                });
                if covered {
                    return Ok(Refinement::Certified(Certificate {
                        value: x,
                        a: a as u64,
                        l: l as u64,
                        m,
                    }));
                }
            }
        }
        Ok(Refinement::Rejected(format!(
            "no progression of length {} with step <= {} in mA for m <= {}",
            self.opts.l_min, self.opts.a_max, self.opts.m_max
        )))
    }
}

/// Searches for a certificate `(a, l, m)` for a good element `x` of `Q_T`.
pub fn refine_good(x: i64, q_t: &Gap, opts: &RefineOptions, guard: usize) -> Result<Refinement> {
    Refiner::new(q_t, opts, guard)?.refine(x)
}

#[derive(Clone, Debug, Serialize)]
pub struct Finalization {
    pub gap: Gap,
    pub scaling: u64,
    #[serde(with = "crate::serial::ratio")]
    pub dilation: BigRational,
    /// Certificates that were kept, sorted by value.
    pub certificates: Vec<Certificate>,
    #[serde(with = "crate::serial::int_vec")]
    pub certified: Vec<i64>,
    /// Values whose certificates were dropped to keep `C <= C_max`.
    #[serde(with = "crate::serial::int_vec")]
    pub dropped: Vec<i64>,
}

/// Least `s` with `y` in `Q_s`, growing the search box until `bound`.
fn min_scale(q: &Gap, y: i64, bound: &BigRational) -> Result<Option<BigRational>> {
    let mut b = BigRational::one();
    loop {
        let box_bound = if b < *bound { b.clone() } else { bound.clone() };
        if let Some(s) = q.min_dilation_containing(y, &box_bound)? {
            return Ok(Some(s));
        }
        if box_bound >= *bound {
            return Ok(None);
        }
        b *= rat(2, 1);
    }
}

/// Combines the certificates into one scaling `C` (the lcm of the steps `a`, dropping the
/// largest steps while it exceeds `C_max`), dilates `Q_T` by the least `S >= 1` that puts
/// every `C x` into the `C/k`-dilate, embeds the result if it is improper, and verifies
/// the containment by enumeration.
pub fn finalize(q_t: &Gap, certificates: &[Certificate], opts: &RefineOptions) -> Result<Finalization> {
    let guard = opts.embed.guard;
    let mut certs: Vec<Certificate> = certificates.to_vec();
    certs.sort_by_key(|c| c.value);
    let mut dropped = Vec::new();
    let lcm = |cs: &[Certificate]| cs.iter().fold(1u64, |acc, c| acc.lcm(&c.a));
    while lcm(&certs) > opts.c_max {
        let worst = certs.iter().map(|c| c.a).max().unwrap_or(1);
        dropped.extend(certs.iter().filter(|c| c.a == worst).map(|c| c.value));
        certs.retain(|c| c.a != worst);
    }
    let c = lcm(&certs);
    let k = BigRational::from_integer(BigInt::from(opts.k));
    let cr = BigRational::from_integer(BigInt::from(c));

    let scales: Vec<BigRational> = certs
        .par_iter()
        .map(|cert| {
            let y = (c as i64)
                .checked_mul(cert.value)
                .ok_or_else(|| Error::Overflow(format!("{c} * {}", cert.value)))?;
            let bound = rat(4 * cert.m as i64, 1) * &cr / BigRational::from_integer(BigInt::from(cert.a));
            min_scale(q_t, y, &bound)?.ok_or_else(|| {
                Error::Inconsistency(format!("{y} has no representation in the {bound}-dilate of {q_t}"))
            })
        })
        .collect::<Result<_>>()?;
    let needed = scales.iter().map(|s| s * &k / &cr).max().unwrap_or_else(BigRational::zero);
    let dilation = if needed > BigRational::one() { needed } else { BigRational::one() };

    let mut gap = q_t.dilate(&dilation);
    let volume = gap.volume();
    if BigUint::from(gap.enumerate(guard)?.len()) != volume {
        gap = embed_proper(&gap, 1, &opts.embed)?.gap;
    }

    let window = gap.dilate(&(&cr / &k)).enumerate(guard)?;
    for cert in &certs {
        if !window.contains(c as i64 * cert.value) {
            return Err(Error::Containment {
                element: cert.value,
                scale: c,
                dilation: &cr / &k,
                gap,
            });
        }
    }
    let certified = certs.iter().map(|c| c.value).collect();
    Ok(Finalization {
        gap,
        scaling: c,
        dilation,
        certificates: certs,
        certified,
        dropped,
    })
}
