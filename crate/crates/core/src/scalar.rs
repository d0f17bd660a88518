//! Exact rationals and the coefficient-domain trait shared by matrices.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical `p/q` form, denominator always present.
pub fn fmt_q(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn parse_q(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    let d: BigInt = d
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in {s:?}")));
    }
    Ok(Rational::new(n, d))
}

/// Human form: integers without denominator.
pub fn show_q(x: &Rational) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// A commutative differential ring with rational scalars.
pub trait Scalar: Clone + PartialEq + Debug {
    fn nil() -> Self;
    fn unit() -> Self;
    fn from_q(x: &Rational) -> Self;
    fn is_nil(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn scale(&self, x: &Rational) -> Self;
    fn derive(&self) -> Self;
    /// Multiplicative inverse when it exists in closed form.
    fn try_inverse(&self) -> Option<Self>;
    /// The value as a rational constant, if it is one.
    fn as_q(&self) -> Option<Rational>;

    fn pow(&self, k: u32) -> Self {
        let mut acc = Self::unit();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }
}

impl Scalar for Rational {
    fn nil() -> Self {
        Zero::zero()
    }
    fn unit() -> Self {
        One::one()
    }
    fn from_q(x: &Rational) -> Self {
        x.clone()
    }
    fn is_nil(&self) -> bool {
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
    fn scale(&self, x: &Rational) -> Self {
        self * x
    }
    fn derive(&self) -> Self {
        Zero::zero()
    }
    fn try_inverse(&self) -> Option<Self> {
        if Zero::is_zero(self) {
            None
        } else {
            Some(self.recip())
        }
    }
    fn as_q(&self) -> Option<Rational> {
        Some(self.clone())
    }
}

/// Exact k-th root of a positive or negative rational, when it exists.
pub fn exact_root(x: &Rational, k: u32) -> Option<Rational> {
    if k == 0 {
        return None;
    }
    if x.is_negative() && k % 2 == 0 {
        return None;
    }
    let root = |n: &BigInt| -> Option<BigInt> {
        let r = n.abs().nth_root(k);
        if r.pow(k) == n.abs() {
            Some(if n.is_negative() { -r } else { r })
        } else {
            None
        }
    };
    Some(Rational::new(root(x.numer())?, root(x.denom())?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_text_round_trip() {
        for s in ["-1/1", "3/4", "0/1", "-7/3"] {
            assert_eq!(fmt_q(&parse_q(s).unwrap()), s);
        }
        assert_eq!(parse_q("6/4").unwrap(), qf(3, 2));
        assert!(parse_q("1/0").is_err());
    }

    #[test]
    fn exact_roots() {
        assert_eq!(exact_root(&qf(8, 27), 3), Some(qf(2, 3)));
        assert_eq!(exact_root(&q(-8), 3), Some(q(-2)));
        assert_eq!(exact_root(&q(2), 2), None);
        assert_eq!(exact_root(&q(-4), 2), None);
    }
}
