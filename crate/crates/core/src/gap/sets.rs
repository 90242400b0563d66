use std::collections::HashSet;

use serde::Serialize;

use super::ElementSet;
use crate::error::{Error, Result};
use crate::walks::{difference_pmf, Pmf};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SetOp {
    Sum,
    Difference,
    Autocorrelation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SetArithmetic {
    Set(ElementSet),
    /// Distribution of `b - b'` for independent uniform `b, b'` in `B`.
    Distribution(Pmf),
}

fn pair_guard(a: usize, b: usize, guard: usize) -> Result<()> {
    match a.checked_mul(b) {
        Some(p) if p <= guard => Ok(()),
        _ => Err(Error::Resource(format!(
            "{a} x {b} pairs exceed the enumeration guard of {guard}"
        ))),
    }
}

/// `A + B`.
pub fn sumset(a: &ElementSet, b: &ElementSet, guard: usize) -> Result<ElementSet> {
    pair_guard(a.len(), b.len(), guard)?;
    let (Some(&a_lo), Some(&b_lo)) = (a.elements().first(), b.elements().first()) else {
        return Ok(ElementSet::default());
    };
    let (a_hi, b_hi) = (*a.elements().last().unwrap(), *b.elements().last().unwrap());
    let lo = a_lo as i128 + b_lo as i128;
    let hi = a_hi as i128 + b_hi as i128;
    if lo < i64::MIN as i128 || hi > i64::MAX as i128 {
        return Err(Error::Overflow(format!("sumset reaches [{lo}, {hi}]")));
    }
    let span = (hi - lo) as u128 + 1;
    let pairs = (a.len() * b.len()) as u128;
    if span <= (1 << 28) && span <= 32 * pairs + 4096 {
        // dense bitmap over the bounding interval
        let mut bits = vec![0u64; (span as usize).div_ceil(64)];
        for &x in a.elements() {
            let base = (x as i128 + b_lo as i128 - lo) as usize;
            for &y in b.elements() {
                let idx = base + (y - b_lo) as usize;
                bits[idx / 64] |= 1 << (idx % 64);
            }
        }
        let mut out = Vec::new();
        for (w, &word) in bits.iter().enumerate() {
            let mut word = word;
            while word != 0 {
                let bit = word.trailing_zeros() as usize;
                out.push((lo + (w * 64 + bit) as i128) as i64);
                word &= word - 1;
            }
        }
        return Ok(ElementSet(out));
    }
    let mut seen = HashSet::with_capacity(a.len().max(b.len()));
    for &x in a.elements() {
        for &y in b.elements() {
            seen.insert(x + y);
        }
    }
    Ok(seen.into_iter().collect())
}

/// `A - B`.
pub fn difference_set(a: &ElementSet, b: &ElementSet, guard: usize) -> Result<ElementSet> {
    let neg: ElementSet = b
        .elements()
        .iter()
        .map(|&y| y.checked_neg().ok_or_else(|| Error::Overflow(format!("-({y})"))))
        .collect::<Result<Vec<_>>>()
        .map(ElementSet::from_vec)?;
    sumset(a, &neg, guard)
}

pub fn intersection(a: &ElementSet, b: &ElementSet) -> ElementSet {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    ElementSet(
        small
            .elements()
            .iter()
            .copied()
            .filter(|&x| large.contains(x))
            .collect(),
    )
}

pub fn set_arithmetic(a: &ElementSet, b: &ElementSet, op: SetOp, guard: usize) -> Result<SetArithmetic> {
    match op {
        SetOp::Sum => sumset(a, b, guard).map(SetArithmetic::Set),
        SetOp::Difference => difference_set(a, b, guard).map(SetArithmetic::Set),
        SetOp::Autocorrelation => {
            pair_guard(b.len(), b.len(), guard)?;
            difference_pmf(b).map(SetArithmetic::Distribution)
        }
    }
}
