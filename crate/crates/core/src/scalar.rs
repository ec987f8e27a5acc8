//! Number types the polyhedral kernel is generic over.
//!
//! `f64` compares against a fixed absolute tolerance, which is meaningful
//! because every direction and constraint row is normalized before it is
//! compared. `BigRational` is exact: zero means zero.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::{BigRational, One, Signed, ToPrimitive, Zero};

/// Absolute tolerance used by the floating-point kernel.
pub const FLOAT_TOL: f64 = 1e-9;

pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
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
    /// True for exact arithmetic.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn abs(&self) -> Self;

    /// Sign with the kernel tolerance applied: -1, 0 or 1.
    fn sign(&self) -> i8;

    /// Rescale a direction into its canonical representative: unit Euclidean
    /// norm for floats, primitive integer vector for rationals. Zero vectors
    /// are left untouched.
    fn normalize_dir(v: &mut [Self]);

    /// Rescale the constraint `a·z ≤ b` into canonical form (unit normal
    /// for floats, primitive integer row for rationals).
    fn normalize_row(a: &mut [Self], b: &mut Self);

    /// Parse a literal such as `-3`, `0.25` or `2/7`.
    fn parse_literal(s: &str) -> Option<Self>;

    /// Inverse of `parse_literal`.
    fn to_literal(&self) -> String;

    fn is_zero(&self) -> bool {
        self.sign() == 0
    }
    fn is_pos(&self) -> bool {
        self.sign() > 0
    }
    fn is_neg(&self) -> bool {
        self.sign() < 0
    }
    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).is_zero()
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
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn sign(&self) -> i8 {
        if *self > FLOAT_TOL {
            1
        } else if *self < -FLOAT_TOL {
            -1
        } else {
            0
        }
    }
    fn normalize_dir(v: &mut [Self]) {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            for x in v.iter_mut() {
                *x /= norm;
                if x.abs() < 1e-15 {
                    *x = 0.0;
                }
            }
        }
    }
    fn normalize_row(a: &mut [Self], b: &mut Self) {
        let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-300 {
            for x in a.iter_mut() {
                *x /= norm;
            }
            *b /= norm;
        }
    }
    fn to_literal(&self) -> String {
        format!("{self}")
    }
    fn parse_literal(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().ok()?;
            let q: f64 = q.trim().parse().ok()?;
            if q == 0.0 {
                return None;
            }
            return Some(p / q);
        }
        s.parse().ok()
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_f64(v: f64) -> Self {
        rational_from_f64(v)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn sign(&self) -> i8 {
        if self.is_positive() {
            1
        } else if self.is_negative() {
            -1
        } else {
            0
        }
    }
    fn normalize_dir(v: &mut [Self]) {
        if v.iter().all(Zero::is_zero) {
            return;
        }
        let mut lcm = BigInt::one();
        for x in v.iter() {
            lcm = num::integer::lcm(lcm, x.denom().clone());
        }
        let mut gcd = BigInt::zero();
        for x in v.iter() {
            let n = x.numer() * (&lcm / x.denom());
            gcd = num::integer::gcd(gcd, n);
        }
        for x in v.iter_mut() {
            let n = x.numer() * (&lcm / x.denom());
            *x = BigRational::from_integer(n / &gcd);
        }
    }
    fn normalize_row(a: &mut [Self], b: &mut Self) {
        let mut v: Vec<Self> = a.to_vec();
        v.push(b.clone());
        if a.iter().all(Zero::is_zero) {
            return;
        }
        Self::normalize_dir(&mut v);
        *b = v.pop().unwrap();
        a.clone_from_slice(&v);
    }
    fn to_literal(&self) -> String {
        self.to_string()
    }
    fn parse_literal(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            return Some(BigRational::new(p, q));
        }
        parse_decimal(s)
    }
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let all: String = format!("{int_part}{frac_part}");
    if !all.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let numer: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().ok()? };
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(numer);
    if scale >= 0 {
        r *= BigRational::from_integer(num::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

/// Best rational approximation with a modest denominator when one reproduces
/// the float to near machine precision (so `0.1` becomes `1/10`); the exact
/// binary value otherwise.
fn rational_from_f64(v: f64) -> BigRational {
    if !v.is_finite() {
        return <BigRational as Zero>::zero();
    }
    if v == v.trunc() && v.abs() < 9e15 {
        return BigRational::from_integer(BigInt::from(v as i64));
    }
    // continued fraction expansion
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut x = v;
    for _ in 0..40 {
        let a = x.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i128;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > 1_000_000_000 {
            break;
        }
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        let approx = h1 as f64 / k1 as f64;
        if (approx - v).abs() <= 4.0 * f64::EPSILON * v.abs().max(1.0) {
            return BigRational::new(BigInt::from(h1), BigInt::from(k1));
        }
        let frac = x - x.floor();
        if frac == 0.0 {
            break;
        }
        x = 1.0 / frac;
    }
    BigRational::from_float(v).unwrap_or_else(<BigRational as Zero>::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(d))
    }

    #[test]
    fn decimal_floats_become_small_fractions() {
        assert_eq!(<BigRational as Scalar>::from_f64(0.1), q(1, 10));
        assert_eq!(<BigRational as Scalar>::from_f64(-2.5), q(-5, 2));
        assert_eq!(<BigRational as Scalar>::from_f64(1.0 / 3.0), q(1, 3));
        assert_eq!(<BigRational as Scalar>::from_f64(7.0), q(7, 1));
    }

    #[test]
    fn parse_literals() {
        assert_eq!(BigRational::parse_literal("2/6"), Some(q(1, 3)));
        assert_eq!(BigRational::parse_literal("-0.125"), Some(q(-1, 8)));
        assert_eq!(BigRational::parse_literal("1.5e2"), Some(q(150, 1)));
        assert_eq!(f64::parse_literal("1/4"), Some(0.25));
        assert!(BigRational::parse_literal("abc").is_none());
    }

    #[test]
    fn normalization() {
        let mut v = vec![q(2, 3), q(-4, 3), q(0, 1)];
        BigRational::normalize_dir(&mut v);
        assert_eq!(v, vec![q(1, 1), q(-2, 1), q(0, 1)]);
        let mut w = vec![3.0, 4.0];
        f64::normalize_dir(&mut w);
        assert!((w[0] - 0.6).abs() < 1e-15 && (w[1] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn float_sign_uses_tolerance() {
        assert_eq!(1e-12f64.sign(), 0);
        assert_eq!((-1e-3f64).sign(), -1);
        assert_eq!(q(1, 1_000_000_000_000).sign(), 1);
    }
}
