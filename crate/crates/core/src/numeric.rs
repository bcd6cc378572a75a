//! Scalar abstraction shared by the floating-point and exact-rational modes.
//!
//! Every algorithm in the crate is generic over [`Scalar`]. `f64` is the fast
//! default; [`Exact`] (an arbitrary-precision rational) is used by the oracle
//! when an equality has to be established without rounding.

use std::fmt::{Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::{BigRational, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational used in exact mode.
pub type Exact = BigRational;

/// Structural tolerance (capacity axioms, two-alternation) in floating mode.
pub const STRUCTURAL_TOL: f64 = 1e-12;
/// Tolerance for comparing optimization results in floating mode.
pub const OPTIM_TOL: f64 = 1e-9;

/// Hashable, totally ordered stand-in for a scalar, used to deduplicate
/// vertices. Floating values are snapped to a 1e-12 grid.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ScalarKey {
    Grid(i64),
    Exact(BigRational),
}

pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True for the exact-rational mode.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn to_f64(&self) -> f64;
    fn to_exact(&self) -> Exact;
    fn abs(&self) -> Self;

    /// Tolerance for structural checks (0 in exact mode).
    fn structural_tol() -> Self;
    /// Tolerance for optimization comparisons (0 in exact mode).
    fn optim_tol() -> Self;
    /// Smallest pivot magnitude the simplex accepts (0 in exact mode).
    fn pivot_tol() -> Self;

    fn key(&self) -> ScalarKey;

    /// Parses a literal such as `0.1`, `1e-3` or `3/7`. In exact mode decimal
    /// literals are read digit by digit, so `0.1` is exactly one tenth.
    fn parse_literal(s: &str) -> Option<Self>;

    /// JSON form: a number in floating mode, a `"num/den"` string in exact mode.
    fn to_json(&self) -> serde_json::Value;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn to_exact(&self) -> Exact {
        BigRational::from_float(*self).unwrap_or_else(<BigRational as Zero>::zero)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn structural_tol() -> Self {
        STRUCTURAL_TOL
    }
    fn optim_tol() -> Self {
        OPTIM_TOL
    }
    fn pivot_tol() -> Self {
        1e-12
    }
    fn key(&self) -> ScalarKey {
        ScalarKey::Grid((self / STRUCTURAL_TOL).round() as i64)
    }
    fn parse_literal(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: f64 = n.trim().parse().ok()?;
            let d: f64 = d.trim().parse().ok()?;
            return if d == 0.0 { None } else { Some(n / d) };
        }
        s.parse().ok().filter(|x: &f64| x.is_finite())
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
    fn one() -> Self {
        <BigRational as One>::one()
    }
    fn from_f64(x: f64) -> Self {
        // Shortest round-trip decimal, so 0.1 maps to 1/10 rather than the
        // binary expansion of the nearest double.
        parse_decimal(&format!("{x:e}")).unwrap_or_else(|| x.to_exact())
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn to_exact(&self) -> Exact {
        self.clone()
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn structural_tol() -> Self {
        <BigRational as Zero>::zero()
    }
    fn optim_tol() -> Self {
        <BigRational as Zero>::zero()
    }
    fn pivot_tol() -> Self {
        <BigRational as Zero>::zero()
    }
    fn key(&self) -> ScalarKey {
        ScalarKey::Exact(self.clone())
    }
    fn parse_literal(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n = parse_decimal(n.trim())?;
            let d = parse_decimal(d.trim())?;
            return if Zero::is_zero(&d) { None } else { Some(n / d) };
        }
        parse_decimal(s)
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format!("{}/{}", self.numer(), self.denom()))
    }
}

/// Exact value of a decimal literal with optional exponent (`-1.25e-3`).
fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&digits).ok()?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    let factor = num::pow::pow(ten, scale.unsigned_abs() as usize);
    if scale >= 0 {
        value *= factor;
    } else {
        value /= factor;
    }
    Some(if negative { -value } else { value })
}

/// `|a - b| <= tol`.
pub fn within<S: Scalar>(a: &S, b: &S, tol: &S) -> bool {
    (a.clone() - b.clone()).abs() <= *tol
}

pub fn sum<'a, S: Scalar>(values: impl IntoIterator<Item = &'a S>) -> S {
    values
        .into_iter()
        .fold(S::zero(), |acc, v| acc + v.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_literals_are_exact() {
        assert_eq!(Exact::parse_literal("0.1"), Some(Exact::from_ratio(1, 10)));
        assert_eq!(Exact::parse_literal("-1.25e-1"), Some(Exact::from_ratio(-1, 8)));
        assert_eq!(Exact::parse_literal("3/7"), Some(Exact::from_ratio(3, 7)));
        assert_eq!(Exact::parse_literal("2E2"), Some(Exact::from_ratio(200, 1)));
        assert_eq!(Exact::parse_literal("abc"), None);
        assert_eq!(Exact::parse_literal("1/0"), None);
    }

    #[test]
    fn exact_from_f64_uses_shortest_decimal() {
        assert_eq!(<Exact as Scalar>::from_f64(0.1), Exact::from_ratio(1, 10));
        assert_eq!(<Exact as Scalar>::from_f64(0.55), Exact::from_ratio(11, 20));
        assert_eq!(<Exact as Scalar>::from_f64(0.0), Exact::from_ratio(0, 1));
    }

    #[test]
    fn float_literals() {
        assert_eq!(f64::parse_literal("1/4"), Some(0.25));
        assert_eq!(f64::parse_literal("nan"), None);
        assert_eq!(Exact::from_ratio(4, 7).to_json(), serde_json::json!("4/7"));
    }
}
