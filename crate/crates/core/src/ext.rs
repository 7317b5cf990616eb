//! Exact rationals and the extended rational line.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational.
pub type Q = BigRational;

/// `n / d` as an exact rational. Panics on `d == 0`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Integer as an exact rational.
pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"-1.25"`.
pub fn parse_q(s: &str) -> Result<Q> {
    let t = s.trim();
    if let Ok(v) = Q::from_str(t) {
        return Ok(v);
    }
    if let Some((int, frac)) = t.split_once('.') {
        let neg = int.starts_with('-');
        let digits: String = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
            let n = BigInt::from_str(&digits).map_err(|_| Error::Parse(s.to_string()))?;
            let d = num::pow(BigInt::from(10), frac.len());
            let v = Q::new(n, d);
            return Ok(if neg { -v } else { v });
        }
    }
    Err(Error::Parse(s.to_string()))
}

/// Canonical `"p/q"` (or `"p"` for integers) rendering.
pub fn fmt_q(v: &Q) -> String {
    if v.is_integer() {
        v.numer().to_string()
    } else {
        format!("{}/{}", v.numer(), v.denom())
    }
}

/// Lossy conversion used only by reports and float oracles.
pub fn to_f64(v: &Q) -> f64 {
    use num::ToPrimitive;
    v.to_f64().unwrap_or(f64::NAN)
}

pub fn sign(v: &Q) -> Q {
    if v.is_positive() {
        Q::one()
    } else if v.is_negative() {
        -Q::one()
    } else {
        Q::zero()
    }
}

/// A point of the extended real line restricted to rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ext {
    NegInf,
    Fin(Q),
    PosInf,
}

impl Ext {
    pub fn zero() -> Ext {
        Ext::Fin(Q::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Ext::Fin(_))
    }

    pub fn finite(&self) -> Option<&Q> {
        match self {
            Ext::Fin(v) => Some(v),
            _ => None,
        }
    }

    pub fn into_finite(self) -> Option<Q> {
        match self {
            Ext::Fin(v) => Some(v),
            _ => None,
        }
    }

    /// Sum, or `None` for `+∞ + (−∞)`.
    pub fn checked_add(&self, other: &Ext) -> Option<Ext> {
        match (self, other) {
            (Ext::PosInf, Ext::NegInf) | (Ext::NegInf, Ext::PosInf) => None,
            (Ext::PosInf, _) | (_, Ext::PosInf) => Some(Ext::PosInf),
            (Ext::NegInf, _) | (_, Ext::NegInf) => Some(Ext::NegInf),
            (Ext::Fin(a), Ext::Fin(b)) => Some(Ext::Fin(a + b)),
        }
    }

    /// Scaling by a nonnegative weight with the measure-theoretic `0·(±∞) = 0`.
    pub fn scale_nonneg(&self, w: &Q) -> Ext {
        debug_assert!(!w.is_negative());
        if w.is_zero() {
            return Ext::zero();
        }
        match self {
            Ext::Fin(v) => Ext::Fin(v * w),
            other => other.clone(),
        }
    }

    /// Product with a finite rational of either sign; `0·(±∞) = 0`.
    pub fn mul_q(&self, w: &Q) -> Ext {
        if w.is_negative() {
            -self.scale_nonneg(&-w)
        } else {
            self.scale_nonneg(w)
        }
    }

    pub fn parse(s: &str) -> Result<Ext> {
        match s.trim() {
            "inf" | "+inf" | "Infinity" | "+Infinity" => Ok(Ext::PosInf),
            "-inf" | "-Infinity" => Ok(Ext::NegInf),
            other => parse_q(other).map(Ext::Fin),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Ext::NegInf => f64::NEG_INFINITY,
            Ext::PosInf => f64::INFINITY,
            Ext::Fin(v) => to_f64(v),
        }
    }

    pub fn cmp_q(&self, v: &Q) -> Ordering {
        match self {
            Ext::NegInf => Ordering::Less,
            Ext::PosInf => Ordering::Greater,
            Ext::Fin(a) => a.cmp(v),
        }
    }
}

impl From<Q> for Ext {
    fn from(v: Q) -> Self {
        Ext::Fin(v)
    }
}

impl From<&Q> for Ext {
    fn from(v: &Q) -> Self {
        Ext::Fin(v.clone())
    }
}

impl Neg for Ext {
    type Output = Ext;
    fn neg(self) -> Ext {
        match self {
            Ext::NegInf => Ext::PosInf,
            Ext::PosInf => Ext::NegInf,
            Ext::Fin(v) => Ext::Fin(-v),
        }
    }
}

impl Add for Ext {
    type Output = Ext;
    /// Panics on `+∞ + (−∞)`; use [`Ext::checked_add`] where that can occur.
    fn add(self, rhs: Ext) -> Ext {
        self.checked_add(&rhs).expect("+inf + -inf is undefined")
    }
}

impl fmt::Display for Ext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::NegInf => f.write_str("-inf"),
            Ext::PosInf => f.write_str("inf"),
            Ext::Fin(v) => f.write_str(&fmt_q(v)),
        }
    }
}

impl serde::Serialize for Ext {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Serializes a rational as its `"p/q"` string.
pub fn ser_q<S: serde::Serializer>(v: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_q(v))
}

/// Sum of extended values where `+∞` absorbs everything; `−∞` terms never occur
/// together with `+∞` in the functionals built here.
pub fn ext_sum<I: IntoIterator<Item = Ext>>(items: I) -> Ext {
    let mut acc = Ext::zero();
    let mut neg = false;
    for it in items {
        match it {
            Ext::PosInf => return Ext::PosInf,
            Ext::NegInf => neg = true,
            Ext::Fin(v) => {
                if let Ext::Fin(a) = &mut acc {
                    *a += v;
                }
            }
        }
    }
    if neg {
        Ext::NegInf
    } else {
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_decimals_and_infinities() {
        assert_eq!(parse_q("3/6").unwrap(), q(1, 2));
        assert_eq!(parse_q("-1.25").unwrap(), q(-5, 4));
        assert_eq!(parse_q("7").unwrap(), qi(7));
        assert!(parse_q("x/2").is_err());
        assert_eq!(Ext::parse("-inf").unwrap(), Ext::NegInf);
        assert_eq!(Ext::parse("inf").unwrap(), Ext::PosInf);
    }

    #[test]
    fn ordering_and_measure_convention() {
        assert!(Ext::NegInf < Ext::Fin(qi(-100)));
        assert!(Ext::Fin(qi(100)) < Ext::PosInf);
        assert_eq!(Ext::PosInf.scale_nonneg(&qi(0)), Ext::zero());
        assert_eq!(Ext::PosInf.mul_q(&qi(-2)), Ext::NegInf);
        assert_eq!(Ext::Fin(qi(1)).checked_add(&Ext::PosInf), Some(Ext::PosInf));
        assert_eq!(Ext::NegInf.checked_add(&Ext::PosInf), None);
        assert_eq!(fmt_q(&q(6, 4)), "3/2");
    }
}
