//! Symmetric generalized arithmetic progressions over the integers.
//!
//! A GAP of rank `d` is given by positive rational dimensions `N_1..N_d` and
//! integer steps `w_1..w_d`; it denotes the set of sums `sum n_i w_i` with
//! integers `|n_i| <= N_i`. Only `floor(N_i)` matters for the set, but the
//! rational dimensions are kept so that dilations compose exactly.

mod embed;
mod sets;

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{floor_to_i64, ratio_string};

pub use embed::{embed_proper, EmbedMethod, EmbedOptions, Embedding};
pub use sets::{difference_set, intersection, set_arithmetic, sumset, SetArithmetic, SetOp};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GapLiteral", into = "GapLiteral")]
pub struct Gap {
    dims: Vec<BigRational>,
    steps: Vec<i64>,
}

/// JSON form: `{"dims": ["5/2", "3"], "steps": ["7", "-2"]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GapLiteral {
    #[serde(with = "crate::serial::ratio_vec")]
    pub dims: Vec<BigRational>,
    #[serde(with = "crate::serial::int_vec")]
    pub steps: Vec<i64>,
}

impl TryFrom<GapLiteral> for Gap {
    type Error = Error;

    fn try_from(lit: GapLiteral) -> Result<Gap> {
        Gap::new(lit.dims, lit.steps)
    }
}

impl From<Gap> for GapLiteral {
    fn from(g: Gap) -> Self {
        GapLiteral {
            dims: g.dims,
            steps: g.steps,
        }
    }
}

impl Gap {
    pub fn new(dims: Vec<BigRational>, steps: Vec<i64>) -> Result<Self> {
        if dims.len() != steps.len() {
            return Err(Error::domain(format!(
                "{} dimensions but {} steps",
                dims.len(),
                steps.len()
            )));
        }
        if let Some(bad) = dims.iter().find(|n| !n.is_positive()) {
            return Err(Error::domain(format!("dimension {bad} is not positive")));
        }
        Ok(Gap { dims, steps })
    }

    /// The rank-0 GAP `{0}`.
    pub fn zero() -> Self {
        Gap {
            dims: Vec::new(),
            steps: Vec::new(),
        }
    }

    /// Convenience constructor with integer dimensions.
    pub fn from_ints(dims: &[i64], steps: &[i64]) -> Result<Self> {
        Gap::new(
            dims.iter().map(|&n| BigRational::from_integer(n.into())).collect(),
            steps.to_vec(),
        )
    }

    pub fn rank(&self) -> usize {
        self.steps.len()
    }

    pub fn dims(&self) -> &[BigRational] {
        &self.dims
    }

    pub fn steps(&self) -> &[i64] {
        &self.steps
    }

    /// `floor(N_i)` for each dimension.
    pub fn int_dims(&self) -> Result<Vec<i64>> {
        self.dims.iter().map(floor_to_i64).collect()
    }

    /// `prod (2 floor(N_i) + 1)`.
    pub fn volume(&self) -> BigUint {
        self.dims
            .iter()
            .map(|n| {
                let f = n.floor().to_integer();
                (f * 2u32 + 1u32).magnitude().clone()
            })
            .product()
    }

    /// `Q_t`: same steps, dimensions scaled by `t`.
    pub fn dilate(&self, t: &BigRational) -> Gap {
        assert!(t.is_positive(), "dilation factor must be positive");
        Gap {
            dims: self.dims.iter().map(|n| n * t).collect(),
            steps: self.steps.clone(),
        }
    }

    /// `Q + [-k, k] x`, as a GAP of rank one higher.
    pub fn extend(&self, x: i64, k: u64) -> Gap {
        let mut g = self.clone();
        g.dims.push(BigRational::from_integer(BigInt::from(k)));
        g.steps.push(x);
        g
    }

    /// Removes every dimension below `bound`; used before dilating by `1/bound`.
    pub fn without_dims_below(&self, bound: &BigRational) -> Gap {
        let (dims, steps) = self
            .dims
            .iter()
            .zip(&self.steps)
            .filter(|(n, _)| *n >= bound)
            .map(|(n, w)| (n.clone(), *w))
            .unzip();
        Gap { dims, steps }
    }

    fn check_guard(&self, guard: usize) -> Result<()> {
        let volume = self.volume();
        if volume > BigUint::from(guard) {
            return Err(Error::EnumerationGuard { volume, guard });
        }
        let reach: BigInt = self
            .dims
            .iter()
            .zip(&self.steps)
            .map(|(n, w)| n.floor().to_integer() * BigInt::from(*w).abs())
            .sum();
        if reach > BigInt::from(i64::MAX / 2) {
            return Err(Error::Overflow(format!("GAP elements reach {reach}")));
        }
        Ok(())
    }

    /// Every coefficient sum `sum n_i w_i`, with repetitions (exactly `volume` values).
    pub(crate) fn all_sums(&self, guard: usize) -> Result<Vec<i64>> {
        self.check_guard(guard)?;
        let bounds = self.int_dims()?;
        let mut points = vec![0i64];
        for (&n, &w) in bounds.iter().zip(&self.steps) {
            let mut next = Vec::with_capacity(points.len() * (2 * n as usize + 1));
            for &p in &points {
                for c in -n..=n {
                    next.push(p + c * w);
                }
            }
            points = next;
        }
        Ok(points)
    }

    /// The set `Q`, sorted ascending.
    pub fn enumerate(&self, guard: usize) -> Result<ElementSet> {
        Ok(ElementSet::from_vec(self.all_sums(guard)?))
    }

    /// All coefficient sums are distinct.
    pub fn is_proper(&self, guard: usize) -> Result<bool> {
        let sums = self.all_sums(guard)?;
        let volume = sums.len();
        Ok(ElementSet::from_vec(sums).len() == volume)
    }

    /// `Q_t` is proper.
    pub fn is_t_proper(&self, t: &BigRational, guard: usize) -> Result<bool> {
        self.dilate(t).is_proper(guard)
    }

    pub fn metrics(&self, t: &BigRational, guard: usize) -> Result<GapMetrics> {
        let set = self.enumerate(guard)?;
        let volume = self.volume();
        let proper = BigUint::from(set.len()) == volume;
        let t_proper = if t.is_one() {
            proper
        } else {
            self.is_t_proper(t, guard)?
        };
        Ok(GapMetrics {
            volume,
            cardinality: set.len(),
            proper,
            t_proper,
        })
    }

    /// Smallest dilation `s >= 0` with `x` in `Q_s`, searching coefficient vectors with
    /// `|c_i| <= bound * N_i`. `None` when no representation exists within that box.
    pub fn min_dilation_containing(&self, x: i64, bound: &BigRational) -> Result<Option<BigRational>> {
        if x == 0 {
            return Ok(Some(BigRational::zero()));
        }
        let r = self.rank();
        if r == 0 {
            return Ok(None);
        }
        let limits: Vec<i64> = self
            .dims
            .iter()
            .map(|n| floor_to_i64(&(n * bound)))
            .collect::<Result<_>>()?;
        let mut best: Option<BigRational> = None;
        // Enumerate the first r-1 coefficients and solve for the last one.
        let mut coeffs = vec![0i64; r - 1];
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c = -limits[i];
        }
        let (w_last, lim_last) = (self.steps[r - 1], limits[r - 1]);
        loop {
            let partial: i128 = coeffs
                .iter()
                .zip(&self.steps)
                .map(|(&c, &w)| c as i128 * w as i128)
                .sum();
            let rest = x as i128 - partial;
            let last = if w_last == 0 {
                (rest == 0).then_some(0i128)
            } else if rest % w_last as i128 == 0 {
                Some(rest / w_last as i128)
            } else {
                None
            };
            if let Some(c_last) = last.filter(|c| c.abs() <= lim_last as i128) {
                let cost = coeffs
                    .iter()
                    .chain(std::iter::once(&(c_last as i64)))
                    .zip(&self.dims)
                    .map(|(&c, n)| BigRational::from_integer(BigInt::from(c.abs())) / n)
                    .max()
                    .expect("rank is positive");
                if best.as_ref().is_none_or(|b| cost < *b) {
                    best = Some(cost);
                }
            }
            // odometer over the free coefficients
            let mut i = 0;
            loop {
                if i == coeffs.len() {
                    return Ok(best);
                }
                if coeffs[i] < limits[i] {
                    coeffs[i] += 1;
                    break;
                }
                coeffs[i] = -limits[i];
                i += 1;
            }
        }
    }
}

impl fmt::Display for Gap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rank() == 0 {
            return write!(f, "{{0}}");
        }
        for (i, (n, w)) in self.dims.iter().zip(&self.steps).enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[-{0},{0}]*{1}", ratio_string(n), w)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GapMetrics {
    #[serde(with = "crate::serial::biguint")]
    pub volume: BigUint,
    pub cardinality: usize,
    pub proper: bool,
    pub t_proper: bool,
}

/// Finite set of integers, kept sorted and without repetition.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ElementSet(Vec<i64>);

impl ElementSet {
    pub fn from_vec(mut v: Vec<i64>) -> Self {
        v.sort_unstable();
        v.dedup();
        ElementSet(v)
    }

    pub fn elements(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, x: i64) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn is_subset(&self, other: &ElementSet) -> bool {
        self.0.iter().all(|&x| other.contains(x))
    }

    pub fn is_symmetric(&self) -> bool {
        self.0.iter().all(|&x| x.checked_neg().is_some_and(|y| self.contains(y)))
    }

    pub fn max_abs(&self) -> Option<u64> {
        self.0.iter().map(|x| x.unsigned_abs()).max()
    }
}

impl FromIterator<i64> for ElementSet {
    fn from_iter<I: IntoIterator<Item = i64>>(iter: I) -> Self {
        ElementSet::from_vec(iter.into_iter().collect())
    }
}

impl Serialize for ElementSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            #[serde(with = "crate::serial::int_vec")]
            elements: &'a [i64],
            cardinality: usize,
        }
        Repr {
            elements: &self.0,
            cardinality: self.0.len(),
        }
        .serialize(s)
    }
}

/// Size of `base + [-k, k] x`.
pub fn extended_size(base: &ElementSet, x: i64, k: u64, guard: usize) -> Result<usize> {
    let k = i64::try_from(k).map_err(|_| Error::Overflow(format!("k = {k}")))?;
    let line: Vec<i64> = (-k..=k)
        .map(|j| j.checked_mul(x).ok_or_else(|| Error::Overflow(format!("{j} * {x}"))))
        .collect::<Result<_>>()?;
    Ok(sumset(base, &ElementSet::from_vec(line), guard)?.len())
}

/// `x` is bad for `Q` when `|Q + [-k, k] x| >= K |Q|`.
pub fn is_bad(x: i64, q: &Gap, k: u64, big_k: &BigRational, guard: usize) -> Result<bool> {
    let base = q.enumerate(guard)?;
    is_bad_against(x, &base, k, big_k, guard)
}

/// [`is_bad`] against an already enumerated `Q`.
pub fn is_bad_against(x: i64, base: &ElementSet, k: u64, big_k: &BigRational, guard: usize) -> Result<bool> {
    let grown = extended_size(base, x, k, guard)?;
    let lhs = BigRational::from_integer(BigInt::from(grown));
    Ok(lhs >= big_k * BigRational::from_integer(BigInt::from(base.len())))
}

/// Checked conversion used by callers that mix word entries with GAP steps.
pub fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64().ok_or_else(|| Error::Overflow(format!("{x}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::rat;

    fn set(g: &Gap) -> Vec<i64> {
        g.enumerate(1 << 20).unwrap().elements().to_vec()
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(set(&Gap::zero()), vec![0]);
        assert_eq!(set(&Gap::from_ints(&[2], &[3]).unwrap()), vec![-6, -3, 0, 3, 6]);
        let g = Gap::from_ints(&[2, 1], &[1, 2]).unwrap();
        assert_eq!(set(&g), (-4..=4).collect::<Vec<_>>());
        assert_eq!(g.volume(), BigUint::from(15u32));
    }

    #[test]
    fn metrics_examples() {
        let g = Gap::new(vec![rat(5, 2)], vec![3]).unwrap();
        let m = g.metrics(&rat(1, 1), 1000).unwrap();
        assert_eq!(m.volume, BigUint::from(5u32));
        assert!(m.proper && m.t_proper);

        let m = Gap::from_ints(&[2, 1], &[1, 2]).unwrap().metrics(&rat(1, 1), 1000).unwrap();
        assert_eq!((m.cardinality, m.proper), (9, false));

        let m = Gap::from_ints(&[2], &[0]).unwrap().metrics(&rat(1, 1), 1000).unwrap();
        assert_eq!((m.volume, m.proper), (BigUint::from(5u32), false));

        // proper, but its 3-dilate is not
        let g = Gap::from_ints(&[2, 2], &[1, 5]).unwrap();
        let m = g.metrics(&rat(3, 1), 1000).unwrap();
        assert!(m.proper && !m.t_proper);
    }

    #[test]
    fn dilation_examples() {
        let g = Gap::from_ints(&[2], &[3]).unwrap();
        assert_eq!(set(&g.dilate(&rat(1, 2))), vec![-3, 0, 3]);
        assert_eq!(g.dilate(&rat(1, 1)), g);
        let h = Gap::from_ints(&[4, 6], &[1, 7]).unwrap();
        assert_eq!(h.dilate(&rat(1, 2)).dilate(&rat(2, 1)), h);
    }

    #[test]
    fn extension_examples() {
        assert_eq!(set(&Gap::zero().extend(5, 2)), vec![-10, -5, 0, 5, 10]);
        let g = Gap::from_ints(&[1], &[1]).unwrap().extend(10, 1);
        assert_eq!(set(&g), vec![-11, -10, -9, -1, 0, 1, 9, 10, 11]);
        let base = Gap::from_ints(&[3, 1], &[2, 7]).unwrap();
        let z = base.extend(0, 4);
        assert_eq!(set(&z), set(&base));
        assert_eq!(z.volume(), base.volume() * 9u32);
    }

    #[test]
    fn bad_element_examples() {
        let guard = 1 << 20;
        assert!(is_bad(1, &Gap::zero(), 3, &rat(5, 1), guard).unwrap());
        let q = Gap::from_ints(&[5], &[5]).unwrap();
        assert!(!is_bad(0, &q, 7, &rat(3, 2), guard).unwrap());
        assert!(!is_bad(5, &q, 5, &rat(2, 1), guard).unwrap());
        assert!(is_bad(1, &q, 5, &rat(2, 1), guard).unwrap());
    }

    #[test]
    fn guard_trips_with_volume() {
        let g = Gap::from_ints(&[100, 100], &[1, 1000]).unwrap();
        match g.enumerate(1000) {
            Err(Error::EnumerationGuard { volume, guard }) => {
                assert_eq!(volume, BigUint::from(201u32 * 201));
                assert_eq!(guard, 1000);
            }
            other => panic!("expected guard error, got {other:?}"),
        }
    }

    #[test]
    fn rejects_malformed_gaps() {
        assert!(Gap::new(vec![rat(1, 1)], vec![]).is_err());
        assert!(Gap::new(vec![rat(0, 1)], vec![1]).is_err());
    }

    #[test]
    fn literal_round_trip() {
        let g: Gap = serde_json::from_str(r#"{"dims": ["5/2", "3"], "steps": ["7", "−2"]}"#).unwrap();
        assert_eq!(g.steps(), &[7, -2]);
        assert_eq!(g.dims()[0], rat(5, 2));
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(text, r#"{"dims":["5/2","3"],"steps":["7","-2"]}"#);
    }

    #[test]
    fn minimal_dilation_search() {
        let g = Gap::from_ints(&[5, 5], &[1, 100]).unwrap();
        assert_eq!(g.min_dilation_containing(203, &rat(1, 1)).unwrap(), Some(rat(3, 5)));
        assert_eq!(g.min_dilation_containing(0, &rat(1, 1)).unwrap(), Some(rat(0, 1)));
        assert_eq!(g.min_dilation_containing(50, &rat(1, 1)).unwrap(), None);
        assert_eq!(g.min_dilation_containing(50, &rat(10, 1)).unwrap(), Some(rat(10, 1)));
        assert_eq!(Gap::zero().min_dilation_containing(3, &rat(9, 1)).unwrap(), None);
    }
}
