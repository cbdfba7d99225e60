//! Real scalar fields for the linear automaton models.
//!
//! Generalized and probabilistic automata run either over `f64` or over exact
//! arbitrary-precision rationals. Quantum models are always `f64`.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// An ordered field the linear automata can compute in.
pub trait Scalar:
    Clone + Debug + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// `true` when arithmetic is exact.
    const EXACT: bool;
    /// Name used in the `scalar_mode` field of serialized automata.
    const MODE: &'static str;

    fn to_f64(&self) -> f64;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Exact conversion from a float (every finite `f64` is a dyadic rational).
    fn from_f64(x: f64) -> Option<Self>;
    fn to_json(&self) -> Value;
    fn from_json(value: &Value) -> Result<Self>;

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    const MODE: &'static str = "float";

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn to_json(&self) -> Value {
        Value::from(*self)
    }

    fn from_json(value: &Value) -> Result<Self> {
        match value {
            Value::Number(n) => n
                .as_f64()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Format(format!("bad number {n}"))),
            Value::String(s) => parse_rational(s).map(|r| Scalar::to_f64(&r)),
            other => Err(Error::Format(format!("expected a number, got {other}"))),
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;
    const MODE: &'static str = "exact";

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(x: f64) -> Option<Self> {
        Rational::from_float(x)
    }

    fn to_json(&self) -> Value {
        if self.denom().is_one() {
            Value::String(format!("{}", self.numer()))
        } else {
            Value::String(format!("{}/{}", self.numer(), self.denom()))
        }
    }

    fn from_json(value: &Value) -> Result<Self> {
        match value {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Rational::from_i64(i).expect("i64 fits"))
                } else {
                    Err(Error::Format(format!(
                        "exact mode needs integers or \"p/q\" strings, got {n}"
                    )))
                }
            }
            other => Err(Error::Format(format!("expected a rational, got {other}"))),
        }
    }
}

/// Parse `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Format(format!("bad rational literal {s:?}"));
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num = BigInt::from_str_radix(num, 10).map_err(|_| bad())?;
    let den = BigInt::from_str_radix(den, 10).map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_json_round_trip() {
        let r = Rational::from_ratio(-3, 8);
        assert_eq!(r.to_json(), Value::String("-3/8".into()));
        assert_eq!(Rational::from_json(&r.to_json()).unwrap(), r);
        let two = Rational::from_ratio(4, 2);
        assert_eq!(two.to_json(), Value::String("2".into()));
        assert_eq!(Rational::from_json(&Value::from(5)).unwrap(), Rational::from_ratio(5, 1));
        assert!(Rational::from_json(&Value::from(0.5)).is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn float_accepts_rational_strings() {
        assert_eq!(f64::from_json(&Value::String("1/4".into())).unwrap(), 0.25);
        assert_eq!(f64::from_json(&Value::from(1.5)).unwrap(), 1.5);
    }
}
