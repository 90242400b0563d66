use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numeric::Density;

/// Exact probability mass function on the integers: nonnegative integer
/// weights over a common denominator.
///
/// Supports that fit in 64 bits are kept on an arithmetic lattice
/// `offset + stride * i` with a dense weight vector; everything else falls back
/// to a sorted sparse map keyed by big integers. Equality compares the nonzero
/// entries and the denominator, never the representation.
#[derive(Clone, Debug)]
pub struct Pmf {
    denom: BigUint,
    support: Support,
}

#[derive(Clone, Debug)]
enum Support {
    /// `stride == 0` iff there is a single point. First and last weights are nonzero.
    Lattice {
        offset: i64,
        stride: u64,
        weights: Vec<BigUint>,
    },
    Sparse(BTreeMap<BigInt, BigUint>),
}

/// Upper bound on dense lattice length, independent of the support cap.
const MAX_LATTICE_LEN: usize = 1 << 26;

fn gcd0(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

impl Pmf {
    /// Unit mass at `x`.
    pub fn point(x: &BigInt) -> Pmf {
        let support = match x.to_i64() {
            Some(offset) => Support::Lattice {
                offset,
                stride: 0,
                weights: vec![BigUint::from(1u32)],
            },
            None => Support::Sparse(BTreeMap::from([(x.clone(), BigUint::from(1u32))])),
        };
        Pmf {
            denom: BigUint::from(1u32),
            support,
        }
    }

    /// Builds a pmf from `(point, weight)` pairs; zero weights are dropped and
    /// repeated points accumulate.
    pub fn from_weights<I>(entries: I, denom: BigUint) -> Result<Pmf>
    where
        I: IntoIterator<Item = (BigInt, BigUint)>,
    {
        let mut map = BTreeMap::new();
        for (k, w) in entries {
            if !w.is_zero() {
                *map.entry(k).or_insert_with(BigUint::zero) += w;
            }
        }
        if map.is_empty() {
            return Err(Error::domain("a distribution needs at least one point"));
        }
        if denom.is_zero() {
            return Err(Error::domain("zero denominator"));
        }
        Ok(Pmf {
            denom,
            support: Support::Sparse(map),
        }
        .compacted())
    }

    /// Converts a sparse map into a lattice when keys fit and the lattice is not much
    /// longer than the number of points.
    fn compacted(self) -> Pmf {
        let Support::Sparse(map) = &self.support else {
            return self;
        };
        let keys: Option<Vec<i64>> = map.keys().map(|k| k.to_i64()).collect();
        let Some(keys) = keys else {
            return self;
        };
        let first = keys[0];
        let stride = keys
            .iter()
            .fold(0u64, |g, &k| gcd0(g, (k as i128 - first as i128).unsigned_abs() as u64));
        let len = if stride == 0 {
            1
        } else {
            ((keys[keys.len() - 1] as i128 - first as i128) / stride as i128) as usize + 1
        };
        if len > MAX_LATTICE_LEN || len > 8 * keys.len() + 1024 {
            return self;
        }
        let mut weights = vec![BigUint::zero(); len];
        let Support::Sparse(map) = self.support else {
            unreachable!()
        };
        for ((_, w), k) in map.into_iter().zip(keys) {
            let idx = if stride == 0 {
                0
            } else {
                ((k as i128 - first as i128) / stride as i128) as usize
            };
            weights[idx] = w;
        }
        Pmf {
            denom: self.denom,
            support: Support::Lattice {
                offset: first,
                stride,
                weights,
            },
        }
    }

    pub fn denom(&self) -> &BigUint {
        &self.denom
    }

    /// Number of points with nonzero weight.
    pub fn support_len(&self) -> usize {
        match &self.support {
            Support::Lattice { weights, .. } => weights.iter().filter(|w| !w.is_zero()).count(),
            Support::Sparse(map) => map.len(),
        }
    }

    /// Nonzero entries in ascending order of the point.
    pub fn entries(&self) -> Vec<(BigInt, BigUint)> {
        match &self.support {
            Support::Lattice {
                offset,
                stride,
                weights,
            } => weights
                .iter()
                .enumerate()
                .filter(|(_, w)| !w.is_zero())
                .map(|(i, w)| {
                    let key = *offset as i128 + *stride as i128 * i as i128;
                    (BigInt::from(key), w.clone())
                })
                .collect(),
            Support::Sparse(map) => map.iter().map(|(k, w)| (k.clone(), w.clone())).collect(),
        }
    }

    pub fn total(&self) -> BigUint {
        match &self.support {
            Support::Lattice { weights, .. } => weights.iter().sum(),
            Support::Sparse(map) => map.values().sum(),
        }
    }

    pub fn min_point(&self) -> BigInt {
        match &self.support {
            Support::Lattice { offset, .. } => BigInt::from(*offset),
            Support::Sparse(map) => map.keys().next().cloned().expect("nonempty support"),
        }
    }

    pub fn max_point(&self) -> BigInt {
        match &self.support {
            Support::Lattice {
                offset,
                stride,
                weights,
            } => BigInt::from(*offset as i128 + *stride as i128 * (weights.len() as i128 - 1)),
            Support::Sparse(map) => map.keys().next_back().cloned().expect("nonempty support"),
        }
    }

    fn lattice_index(offset: i64, stride: u64, len: usize, x: i128) -> Option<usize> {
        let d = x - offset as i128;
        if stride == 0 {
            return (d == 0).then_some(0);
        }
        if d < 0 || d % stride as i128 != 0 {
            return None;
        }
        let idx = d / stride as i128;
        (idx < len as i128).then_some(idx as usize)
    }

    /// Weight at `x` (zero off the support).
    pub fn weight_at(&self, x: &BigInt) -> BigUint {
        match &self.support {
            Support::Lattice {
                offset,
                stride,
                weights,
            } => x
                .to_i128()
                .and_then(|x| Self::lattice_index(*offset, *stride, weights.len(), x))
                .map(|i| weights[i].clone())
                .unwrap_or_default(),
            Support::Sparse(map) => map.get(x).cloned().unwrap_or_default(),
        }
    }

    fn weight_at_i128(&self, x: i128) -> Option<&BigUint> {
        match &self.support {
            Support::Lattice {
                offset,
                stride,
                weights,
            } => Self::lattice_index(*offset, *stride, weights.len(), x).map(|i| &weights[i]),
            Support::Sparse(map) => map.get(&BigInt::from(x)),
        }
    }

    /// Largest weight and every point attaining it, ascending.
    pub fn max_weight(&self) -> (BigUint, Vec<BigInt>) {
        let mut best = BigUint::zero();
        let mut at: Vec<BigInt> = Vec::new();
        for (k, w) in self.entries_iter() {
            if w > &best {
                best = w.clone();
                at.clear();
                at.push(k);
            } else if w == &best {
                at.push(k);
            }
        }
        (best, at)
    }

    fn entries_iter(&self) -> Box<dyn Iterator<Item = (BigInt, &BigUint)> + '_> {
        match &self.support {
            Support::Lattice {
                offset,
                stride,
                weights,
            } => Box::new(weights.iter().enumerate().filter(|(_, w)| !w.is_zero()).map(
                move |(i, w)| {
                    (
                        BigInt::from(*offset as i128 + *stride as i128 * i as i128),
                        w,
                    )
                },
            )),
            Support::Sparse(map) => Box::new(map.iter().map(|(k, w)| (k.clone(), w))),
        }
    }

    fn to_sparse_map(&self) -> BTreeMap<BigInt, BigUint> {
        self.entries().into_iter().collect()
    }

    fn check_cap(&self, cap: usize, prefix: usize) -> Result<()> {
        let size = self.support_len();
        if size > cap {
            return Err(Error::SupportCap { prefix, size, cap });
        }
        Ok(())
    }

    /// Adds one lazy step `v * eta` with density `mu`; the denominator grows by `2q`.
    ///
    /// `prefix` is only used to label a cap violation.
    pub fn lazy_step(&self, v: &BigInt, mu: Density, cap: usize, prefix: usize) -> Result<Pmf> {
        let base = BigUint::from(mu.base());
        let w0 = mu.zero_weight();
        let p = mu.sign_weight();
        let denom = &self.denom * &base;
        if v.is_zero() {
            let mut out = self.clone();
            out.denom = denom;
            match &mut out.support {
                Support::Lattice { weights, .. } => weights.iter_mut().for_each(|w| *w *= &base),
                Support::Sparse(map) => map.values_mut().for_each(|w| *w *= &base),
            }
            return Ok(out);
        }
        let out = match (&self.support, v.to_i64()) {
            (
                Support::Lattice {
                    offset,
                    stride,
                    weights,
                },
                Some(v64),
            ) => Self::lattice_step(*offset, *stride, weights, v64.unsigned_abs(), w0, p)
                .map(|support| Pmf {
                    denom: denom.clone(),
                    support,
                }),
            _ => None,
        };
        let out = match out {
            Some(out) => out,
            None => {
                let a = v.magnitude().clone();
                let a = BigInt::from(a);
                let mut map: BTreeMap<BigInt, BigUint> = BTreeMap::new();
                for (k, w) in self.entries_iter() {
                    let side = w * p;
                    *map.entry(&k - &a).or_insert_with(BigUint::zero) += &side;
                    *map.entry(&k + &a).or_insert_with(BigUint::zero) += side;
                    if w0 > 0 {
                        *map.entry(k).or_insert_with(BigUint::zero) += w * w0;
                    }
                }
                Pmf {
                    denom,
                    support: Support::Sparse(map),
                }
            }
        };
        out.check_cap(cap, prefix)?;
        Ok(out)
    }

    fn lattice_step(
        offset: i64,
        stride: u64,
        weights: &[BigUint],
        a: u64,
        w0: u64,
        p: u64,
    ) -> Option<Support> {
        let a128 = a as i128;
        let new_stride = if w0 > 0 {
            gcd0(stride, a)
        } else {
            gcd0(stride, a.checked_mul(2)?)
        };
        let span = stride as i128 * (weights.len() as i128 - 1);
        let new_offset = i64::try_from(offset as i128 - a128).ok()?;
        i64::try_from(offset as i128 + span + a128).ok()?;
        let new_len = ((span + 2 * a128) / new_stride as i128) as usize + 1;
        let nonzero = weights.iter().filter(|w| !w.is_zero()).count();
        if new_len > MAX_LATTICE_LEN || new_len > 8 * 3 * nonzero + 1024 {
            return None;
        }
        let ns = new_stride as i128;
        let mut out = vec![BigUint::zero(); new_len];
        for (i, w) in weights.iter().enumerate() {
            if w.is_zero() {
                continue;
            }
            let base = stride as i128 * i as i128;
            let side = w * p;
            out[(base / ns) as usize] += &side;
            out[((base + 2 * a128) / ns) as usize] += side;
            if w0 > 0 {
                out[((base + a128) / ns) as usize] += w * w0;
            }
        }
        Some(Support::Lattice {
            offset: new_offset,
            stride: new_stride,
            weights: out,
        })
    }

    /// Distribution of the sum of independent draws from `self` and `other`.
    pub fn convolve(&self, other: &Pmf, cap: usize) -> Result<Pmf> {
        let denom = &self.denom * &other.denom;
        if let (
            Support::Lattice {
                offset: o1,
                stride: g1,
                weights: w1,
            },
            Support::Lattice {
                offset: o2,
                stride: g2,
                weights: w2,
            },
        ) = (&self.support, &other.support)
        {
            let g = gcd0(*g1, *g2);
            let span = *g1 as i128 * (w1.len() as i128 - 1) + *g2 as i128 * (w2.len() as i128 - 1);
            let offset = *o1 as i128 + *o2 as i128;
            let fits = i64::try_from(offset).is_ok() && i64::try_from(offset + span).is_ok();
            let len = if g == 0 { 1 } else { (span / g as i128) as usize + 1 };
            let nz1 = w1.iter().filter(|w| !w.is_zero()).count();
            let nz2 = w2.iter().filter(|w| !w.is_zero()).count();
            let bound = nz1.saturating_mul(nz2);
            if fits && len <= MAX_LATTICE_LEN && len <= 8 * bound.min(len) + 1024 {
                let (r1, r2) = if g == 0 { (0, 0) } else { (*g1 / g, *g2 / g) };
                let mut out = vec![BigUint::zero(); len];
                let nonzero2: Vec<(usize, &BigUint)> =
                    w2.iter().enumerate().filter(|(_, w)| !w.is_zero()).collect();
                for (i, a) in w1.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let base = r1 as usize * i;
                    for &(j, b) in &nonzero2 {
                        out[base + r2 as usize * j] += a * b;
                    }
                }
                let pmf = Pmf {
                    denom,
                    support: Support::Lattice {
                        offset: offset as i64,
                        stride: g,
                        weights: out,
                    },
                };
                pmf.check_cap(cap, 0)?;
                return Ok(pmf);
            }
        }
        let other_entries = other.entries();
        let mut map: BTreeMap<BigInt, BigUint> = BTreeMap::new();
        for (k, a) in self.entries_iter() {
            for (l, b) in &other_entries {
                *map.entry(&k + l).or_insert_with(BigUint::zero) += a * b;
            }
            if map.len() > cap {
                return Err(Error::SupportCap {
                    prefix: 0,
                    size: map.len(),
                    cap,
                });
            }
        }
        Ok(Pmf {
            denom,
            support: Support::Sparse(map),
        }
        .compacted())
    }

    /// Weight at `z` of `self * other` without forming the convolution:
    /// `sum_x self(x) other(z - x)`, over the denominator `self.denom * other.denom`.
    pub fn convolved_weight_at(&self, other: &Pmf, z: &BigInt) -> BigUint {
        let (small, large) = if self.support_len() <= other.support_len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = BigUint::zero();
        match z.to_i128() {
            Some(z) => {
                for (k, w) in small.entries_iter() {
                    let Some(k) = k.to_i128() else { continue };
                    if let Some(u) = large.weight_at_i128(z - k) {
                        acc += w * u;
                    }
                }
            }
            None => {
                for (k, w) in small.entries_iter() {
                    acc += w * large.weight_at(&(z - k));
                }
            }
        }
        acc
    }

    /// Pushes the distribution forward under `x -> c x`.
    pub fn scaled(&self, c: i64) -> Pmf {
        if c == 0 {
            return Pmf {
                denom: self.denom.clone(),
                support: Support::Lattice {
                    offset: 0,
                    stride: 0,
                    weights: vec![self.total()],
                },
            };
        }
        if let Support::Lattice {
            offset,
            stride,
            weights,
        } = &self.support
        {
            let last = *offset as i128 + *stride as i128 * (weights.len() as i128 - 1);
            let (lo, new_weights) = if c > 0 {
                (*offset as i128 * c as i128, weights.clone())
            } else {
                (last * c as i128, weights.iter().rev().cloned().collect())
            };
            let new_stride = (*stride as u128).checked_mul(c.unsigned_abs() as u128);
            let hi = lo + new_stride.unwrap_or(u128::MAX) as i128 * (weights.len() as i128 - 1);
            if let (Ok(lo), Some(Ok(st))) = (i64::try_from(lo), new_stride.map(u64::try_from)) {
                if i64::try_from(hi).is_ok() {
                    return Pmf {
                        denom: self.denom.clone(),
                        support: Support::Lattice {
                            offset: lo,
                            stride: st,
                            weights: new_weights,
                        },
                    };
                }
            }
        }
        let c = BigInt::from(c);
        let map = self.entries_iter().map(|(k, w)| (k * &c, w.clone())).collect();
        Pmf {
            denom: self.denom.clone(),
            support: Support::Sparse(map),
        }
    }

    /// True when `weight(x) == weight(-x)` for every `x`.
    pub fn is_symmetric(&self) -> bool {
        self.entries_iter()
            .all(|(k, w)| &self.weight_at(&(-k)) == w)
    }
}

impl PartialEq for Pmf {
    fn eq(&self, other: &Pmf) -> bool {
        if self.denom != other.denom {
            return false;
        }
        match (&self.support, &other.support) {
            (Support::Sparse(a), Support::Sparse(b)) => a == b,
            _ => self.entries() == other.entries(),
        }
    }
}

impl Eq for Pmf {}

impl From<&Pmf> for BTreeMap<BigInt, BigUint> {
    fn from(p: &Pmf) -> Self {
        p.to_sparse_map()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: i64) -> BigInt {
        BigInt::from(x)
    }

    fn u(x: u64) -> BigUint {
        BigUint::from(x)
    }

    fn walk(v: &[i64], mu: Density) -> Pmf {
        let mut pmf = Pmf::point(&b(0));
        for (i, x) in v.iter().enumerate() {
            pmf = pmf.lazy_step(&b(*x), mu, usize::MAX, i + 1).unwrap();
        }
        pmf
    }

    #[test]
    fn fair_coin_walk_uses_parity_lattice() {
        let pmf = walk(&[1, 2], Density::ONE);
        assert_eq!(
            pmf.entries(),
            vec![(b(-3), u(1)), (b(-1), u(1)), (b(1), u(1)), (b(3), u(1))]
        );
        assert_eq!(pmf.denom(), &u(4));
        assert!(matches!(pmf.support, Support::Lattice { stride: 2, .. }));
    }

    #[test]
    fn huge_steps_fall_back_to_sparse_support() {
        let big = BigInt::from(10u32).pow(30);
        let pmf = Pmf::point(&b(0))
            .lazy_step(&big, Density::HALF, 100, 1)
            .unwrap()
            .lazy_step(&b(1), Density::HALF, 100, 2)
            .unwrap();
        assert_eq!(pmf.support_len(), 9);
        assert_eq!(pmf.total(), u(16));
        assert_eq!(pmf.weight_at(&(&big + 1)), u(1));
        assert_eq!(pmf.weight_at(&b(0)), u(4));
        assert!(pmf.is_symmetric());
    }

    #[test]
    fn widely_spaced_steps_stay_sparse() {
        let pmf = walk(&[1, 1_000_000_000], Density::ONE);
        assert_eq!(pmf.support_len(), 4);
        assert!(matches!(pmf.support, Support::Sparse(_)));
        let lattice = walk(&[1, 3], Density::ONE);
        let sparse = Pmf::from_weights(lattice.entries(), lattice.denom().clone()).unwrap();
        assert_eq!(lattice, sparse);
    }

    #[test]
    fn cap_names_the_prefix() {
        let err = Pmf::point(&b(0))
            .lazy_step(&b(1), Density::HALF, 2, 7)
            .unwrap_err();
        assert!(matches!(err, Error::SupportCap { prefix: 7, size: 3, cap: 2 }));
    }

    #[test]
    fn convolution_matches_direct_sums() {
        let a = Pmf::from_weights([(b(0), u(1)), (b(3), u(2))], u(3)).unwrap();
        let c = Pmf::from_weights([(b(-1), u(1)), (b(1), u(1))], u(2)).unwrap();
        let s = a.convolve(&c, usize::MAX).unwrap();
        assert_eq!(
            s.entries(),
            vec![(b(-1), u(1)), (b(1), u(1)), (b(2), u(2)), (b(4), u(2))]
        );
        assert_eq!(s.denom(), &u(6));
        for z in -2..6 {
            assert_eq!(a.convolved_weight_at(&c, &b(z)), s.weight_at(&b(z)));
        }
    }

    #[test]
    fn scaling_reindexes_points() {
        let x = walk(&[1, 1], Density::HALF);
        let s = x.scaled(-5);
        assert_eq!(s.weight_at(&b(10)), x.weight_at(&b(-2)));
        assert_eq!(s.weight_at(&b(-5)), x.weight_at(&b(1)));
        assert_eq!(s.support_len(), 5);
        assert_eq!(x.scaled(0).entries(), vec![(b(0), u(16))]);
    }

    #[test]
    fn max_weight_reports_all_witnesses() {
        let pmf = walk(&[1, 1, 2], Density::ONE);
        let (w, at) = pmf.max_weight();
        assert_eq!(w, u(2));
        assert_eq!(at, vec![b(-2), b(0), b(2)]);
    }
}
