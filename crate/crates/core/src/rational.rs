//! Scalar rings used as polynomial and structure-constant coefficients.
//!
//! Everything algebraic in this crate is generic over [`Ring`], which is
//! implemented for exact rationals ([`Q`]), for `f64`, and for polynomials
//! over either (see [`crate::poly::Poly`]). Exact arithmetic is the default;
//! floats only enter through quadrature and ODE integration.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{CarnotError, Result};

/// Exact rational numbers.
pub type Q = BigRational;

/// A commutative ring with unit that can absorb rational constants.
pub trait Ring: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_q(q: &Q) -> Self;

    fn from_i64(v: i64) -> Self {
        Self::from_q(&q_int(v))
    }

    fn scale_q(&self, q: &Q) -> Self {
        self.mul(&Self::from_q(q))
    }

    fn add_assign(&mut self, other: &Self) {
        *self = Ring::add(self, other);
    }
}

/// Coefficient fields that can be carried by polynomials.
pub trait Scalar: Ring + PartialOrd {
    fn to_f64(&self) -> f64;
    fn abs_val(&self) -> Self;
    fn div(&self, other: &Self) -> Self;
}

impl Ring for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_q(q: &Q) -> Self {
        q.clone()
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
}

impl Scalar for Q {
    fn to_f64(&self) -> f64 {
        q_to_f64(self)
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
}

impl Ring for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_q(q: &Q) -> Self {
        q_to_f64(q)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
}

impl Scalar for f64 {
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs_val(&self) -> Self {
        self.abs()
    }
    fn div(&self, other: &Self) -> Self {
        self / other
    }
}

pub fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn q_frac(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

pub fn q_to_f64(q: &Q) -> f64 {
    match (q.numer().to_f64(), q.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => {
            // Huge numerators/denominators: scale down by the bit-length gap.
            let shift = q.numer().bits().max(q.denom().bits()) as i64 - 900;
            let scale = BigInt::from(2).pow(shift.max(0) as u32);
            let n = (q.numer() / &scale).to_f64().unwrap_or(0.0);
            let d = (q.denom() / &scale).to_f64().unwrap_or(f64::INFINITY);
            n / d
        }
    }
}

/// Parses `num`, `num/den`, or `-num/den`.
pub fn parse_q(text: &str) -> Result<Q> {
    let text = text.trim();
    let bad = || CarnotError::Parse(format!("invalid rational `{text}`"));
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(n, d))
        }
        None => {
            let n: BigInt = text.parse().map_err(|_| bad())?;
            Ok(Q::from_integer(n))
        }
    }
}

/// Renders a rational as `n` or `n/d`.
pub fn fmt_q(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Closest small-denominator rational to `x` (denominator up to `max_den`).
pub fn q_from_f64_approx(x: f64, max_den: i64) -> Q {
    let mut best = q_int(x.round() as i64);
    let mut best_err = (x - x.round()).abs();
    for d in 2..=max_den {
        let n = (x * d as f64).round() as i64;
        let err = (x - n as f64 / d as f64).abs();
        if err < best_err - 1e-15 {
            best = q_frac(n, d);
            best_err = err;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_roundtrip() {
        assert_eq!(parse_q("3/6").unwrap(), q_frac(1, 2));
        assert_eq!(parse_q("-4").unwrap(), q_int(-4));
        assert_eq!(fmt_q(&q_frac(-2, 4)), "-1/2");
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("x").is_err());
    }

    #[test]
    fn huge_rationals_convert() {
        let big = Q::new(BigInt::from(3) * BigInt::from(10).pow(400), BigInt::from(10).pow(400));
        assert!((q_to_f64(&big) - 3.0).abs() < 1e-12);
    }
}
