//! Exact rationals, densities and comparisons involving rational powers.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Density `mu = p/q` of a lazy coin flip: 0 with probability `1 - mu`,
/// `+1` and `-1` with probability `mu/2` each.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Density {
    p: u64,
    q: u64,
}

impl Density {
    pub const ONE: Density = Density { p: 1, q: 1 };
    pub const HALF: Density = Density { p: 1, q: 2 };

    /// Builds `p/q` in lowest terms. Requires `0 < p <= q`.
    pub fn new(p: u64, q: u64) -> Result<Self> {
        if p == 0 || q == 0 || p > q {
            return Err(Error::domain(format!("density {p}/{q} is not in (0, 1]")));
        }
        let g = p.gcd(&q);
        Ok(Density { p: p / g, q: q / g })
    }

    pub fn numer(&self) -> u64 {
        self.p
    }

    pub fn denom(&self) -> u64 {
        self.q
    }

    /// Denominator shared by all step weights: each step has weight
    /// `2(q - p)` at zero and `p` at each of `+v`, `-v`, over `2q`.
    pub fn base(&self) -> u64 {
        2 * self.q
    }

    pub fn zero_weight(&self) -> u64 {
        2 * (self.q - self.p)
    }

    pub fn sign_weight(&self) -> u64 {
        self.p
    }

    pub fn to_ratio(&self) -> BigRational {
        BigRational::new(BigInt::from(self.p), BigInt::from(self.q))
    }

    /// `mu / k`.
    pub fn divided_by(&self, k: u64) -> Result<Self> {
        let q = self
            .q
            .checked_mul(k)
            .ok_or_else(|| Error::Overflow(format!("density {self} divided by {k}")))?;
        Density::new(self.p, q)
    }

    pub fn at_most_half(&self) -> bool {
        2 * self.p <= self.q
    }

    pub fn from_ratio(r: &BigRational) -> Result<Self> {
        let p = r
            .numer()
            .to_u64()
            .ok_or_else(|| Error::domain(format!("density {r} is not in (0, 1]")))?;
        let q = r
            .denom()
            .to_u64()
            .ok_or_else(|| Error::Overflow(format!("density denominator of {r}")))?;
        Density::new(p, q)
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

impl FromStr for Density {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Density::from_ratio(&parse_rational(s)?)
    }
}

impl TryFrom<String> for Density {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Density> for String {
    fn from(d: Density) -> String {
        d.to_string()
    }
}

fn normalize_minus(s: &str) -> String {
    s.trim().replace('\u{2212}', "-")
}

/// Parses a decimal integer. Accepts the Unicode minus sign.
pub fn parse_int(s: &str) -> Result<BigInt> {
    let t = normalize_minus(s);
    BigInt::from_str(&t).map_err(|_| Error::domain(format!("not an integer: {s:?}")))
}

/// Parses `p/q`, an integer, or a finite decimal such as `0.6` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = normalize_minus(s);
    let bad = || Error::domain(format!("not a rational: {s:?}"));
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| bad())?
        };
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let frac_part = BigInt::from_str(frac).map_err(|_| bad())?;
        let magnitude = int_part.abs() * &scale + frac_part;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(BigRational::new(numer, scale));
    }
    Ok(BigRational::from_integer(BigInt::from_str(&t).map_err(|_| bad())?))
}

/// Canonical text form: `p/q`, or `p` for integers.
pub fn ratio_string(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn ratio_from_u(numer: &BigUint, denom: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(numer.clone()), BigInt::from(denom.clone()))
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn floor_to_i64(r: &BigRational) -> Result<i64> {
    r.floor()
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::Overflow(format!("floor of {r}")))
}

/// `floor(sqrt(r))` for a nonnegative rational.
pub fn floor_sqrt(r: &BigRational) -> BigUint {
    assert!(!r.is_negative(), "square root of a negative rational");
    let floor = r.floor().to_integer();
    floor.magnitude().sqrt()
}

/// One factor `base^exponent` of a product with rational exponents.
#[derive(Clone, Debug)]
pub struct PowFactor {
    pub base: BigRational,
    pub exponent: Ratio<i64>,
}

impl PowFactor {
    pub fn new(base: BigRational, exponent: Ratio<i64>) -> Self {
        PowFactor { base, exponent }
    }

    pub fn int(base: u64, numer: i64, denom: i64) -> Self {
        PowFactor {
            base: BigRational::from_integer(BigInt::from(base)),
            exponent: Ratio::new(numer, denom),
        }
    }
}

/// Exactly decides `lhs <= prod base_i^{e_i}` for positive bases and rational exponents
/// by raising both sides to the common denominator of the exponents.
pub fn le_rational_powers(lhs: &BigRational, factors: &[PowFactor]) -> bool {
    if !lhs.is_positive() {
        return true;
    }
    let l = factors
        .iter()
        .fold(1i64, |acc, f| acc.lcm(f.exponent.denom()));
    let mut left = lhs.pow(l as i32);
    let mut right = BigRational::one();
    for f in factors {
        assert!(f.base.is_positive(), "rational power of a nonpositive base");
        let e = (f.exponent * l).to_integer();
        if e >= 0 {
            right *= f.base.pow(e as i32);
        } else {
            left *= f.base.pow((-e) as i32);
        }
    }
    left <= right
}

/// Floating-point value of `prod base_i^{e_i}`, for reports only.
pub fn approx_rational_powers(factors: &[PowFactor]) -> f64 {
    factors
        .iter()
        .map(|f| {
            let b = f.base.to_f64().unwrap_or(f64::INFINITY);
            let e = *f.exponent.numer() as f64 / *f.exponent.denom() as f64;
            b.powf(e)
        })
        .product()
}

/// Largest `k >= 0` with `k <= n^e` for a rational exponent `e >= 0`.
pub fn floor_rational_power(n: u64, e: Ratio<i64>) -> u64 {
    assert!(*e.numer() >= 0);
    let (a, b) = (*e.numer() as u32, *e.denom() as u32);
    let target = BigUint::from(n).pow(a);
    let guess = (n as f64).powf(a as f64 / b as f64).floor() as u64;
    let fits = |k: u64| BigUint::from(k).pow(b) <= target;
    let mut k = guess.saturating_sub(2);
    while fits(k + 1) {
        k += 1;
    }
    while k > 0 && !fits(k) {
        k -= 1;
    }
    k
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k.min(n));
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Converts a small nonnegative rational exponent such as `0.1` into `Ratio<i64>`.
pub fn small_ratio(r: &BigRational) -> Result<Ratio<i64>> {
    let n = r
        .numer()
        .to_i64()
        .ok_or_else(|| Error::Overflow(format!("exponent {r}")))?;
    let d = r
        .denom()
        .to_i64()
        .ok_or_else(|| Error::Overflow(format!("exponent {r}")))?;
    Ok(Ratio::new(n, d))
}

/// Rational bounds `lo <= ln(k) <= hi` from `terms` terms of the series
/// `ln k = 2 sum z^{2j+1} / (2j+1)` with `z = (k-1)/(k+1)`.
pub fn ln_bounds(k: u64, terms: usize) -> (BigRational, BigRational) {
    assert!(k >= 1);
    let z = rat(k as i64 - 1, k as i64 + 1);
    let z2 = &z * &z;
    let mut power = z.clone();
    let mut lo = BigRational::zero();
    for j in 0..terms {
        lo += &power * rat(2, 2 * j as i64 + 1);
        power *= &z2;
    }
    // tail <= 2 z^{2N+1} / ((2N+1)(1 - z^2))
    let tail = &power * rat(2, 2 * terms as i64 + 1) / (BigRational::one() - &z2);
    let hi = &lo + tail;
    (lo, hi)
}

/// Exactly decides `x <= ln(k)` for rational `x` and integer `k >= 2`.
pub fn le_ln(x: &BigRational, k: u64) -> bool {
    assert!(k >= 2);
    let mut terms = 8;
    loop {
        let (lo, hi) = ln_bounds(k, terms);
        if *x <= lo {
            return true;
        }
        if *x > hi {
            return false;
        }
        terms *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_normalizes_and_validates() {
        assert_eq!(Density::new(2, 4).unwrap(), Density::HALF);
        assert!(Density::new(0, 3).is_err());
        assert!(Density::new(4, 3).is_err());
        assert_eq!("1/3".parse::<Density>().unwrap().base(), 6);
        assert_eq!("1".parse::<Density>().unwrap(), Density::ONE);
        assert_eq!(Density::HALF.divided_by(3).unwrap(), Density::new(1, 6).unwrap());
    }

    #[test]
    fn parses_decimals_and_unicode_minus() {
        assert_eq!(parse_rational("0.6").unwrap(), rat(3, 5));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(parse_rational("5/2").unwrap(), rat(5, 2));
        assert_eq!(parse_int("\u{2212}2").unwrap(), BigInt::from(-2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn rational_power_comparison() {
        // 3 <= 10^{1/2} but 4 > 10^{1/2}
        assert!(le_rational_powers(&rat(3, 1), &[PowFactor::int(10, 1, 2)]));
        assert!(!le_rational_powers(&rat(4, 1), &[PowFactor::int(10, 1, 2)]));
        // 1/1000 <= 100^{-3/2} = 1/1000, with equality
        assert!(le_rational_powers(&rat(1, 1000), &[PowFactor::int(100, -3, 2)]));
        assert!(!le_rational_powers(&rat(1, 999), &[PowFactor::int(100, -3, 2)]));
    }

    #[test]
    fn integer_part_of_rational_power() {
        assert_eq!(floor_rational_power(100, Ratio::new(2, 5)), 6);
        assert_eq!(floor_rational_power(100, Ratio::new(1, 2)), 10);
        assert_eq!(floor_rational_power(99, Ratio::new(1, 2)), 9);
        assert_eq!(floor_rational_power(1, Ratio::new(0, 1)), 1);
    }

    #[test]
    fn logarithm_bounds() {
        let (lo, hi) = ln_bounds(5, 20);
        let ln5 = 5f64.ln();
        assert!(lo.to_f64().unwrap() <= ln5 && ln5 <= hi.to_f64().unwrap());
        assert!(le_ln(&rat(1609, 1000), 5));
        assert!(!le_ln(&rat(1610, 1000), 5));
        assert!(le_ln(&rat(0, 1), 2));
    }

    #[test]
    fn binomials_and_roots() {
        assert_eq!(binomial(10, 5), BigUint::from(252u32));
        assert_eq!(binomial(6, 3), BigUint::from(20u32));
        assert_eq!(floor_sqrt(&rat(8, 1)), BigUint::from(2u32));
        assert_eq!(floor_sqrt(&rat(9, 1)), BigUint::from(3u32));
    }
}
