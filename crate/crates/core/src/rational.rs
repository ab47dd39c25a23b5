//! Exact rational numbers and their text form.
//!
//! Every quantity in the library is a [`Rational`]; nothing is ever rounded.
//! Text input accepts `"p/q"`, integers and finite decimals (`"0.25"`,
//! `"-1.5e-3"` is not accepted). Output is always the canonical `"p/q"` form,
//! with integers printed without a denominator.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed, Zero};
use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use thiserror::Error;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational {input:?}: {reason}")]
pub struct ParseRationalError {
    pub input: String,
    pub reason: &'static str,
}

fn parse_error(input: &str, reason: &'static str) -> ParseRationalError {
    ParseRationalError {
        input: input.to_string(),
        reason,
    }
}

fn parse_int(s: &str, whole: &str) -> Result<BigInt, ParseRationalError> {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return Err(parse_error(whole, "expected decimal digits"));
    }
    s.parse::<BigInt>()
        .map_err(|_| parse_error(whole, "expected decimal digits"))
}

/// Parses `"p/q"`, `"-2"` or `"0.25"` exactly. Decimals become `k / 10^d`.
pub fn parse_rational(input: &str) -> Result<Rational, ParseRationalError> {
    let s = input.trim();
    if s.is_empty() {
        return Err(parse_error(input, "empty string"));
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = parse_int(num.trim(), input)?;
        let den_digits = den.trim();
        if den_digits.starts_with(['+', '-']) {
            return Err(parse_error(input, "denominator must be unsigned"));
        }
        let den = parse_int(den_digits, input)?;
        if den.is_zero() {
            return Err(parse_error(input, "zero denominator"));
        }
        return Ok(Rational::new(num, den));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let negative = int_part.starts_with('-');
        let int_digits = int_part.strip_prefix(['+', '-']).unwrap_or(int_part);
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(parse_error(input, "malformed decimal fraction"));
        }
        if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(parse_error(input, "malformed decimal integer part"));
        }
        let int_value = if int_digits.is_empty() {
            BigInt::zero()
        } else {
            parse_int(int_digits, input)?
        };
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac_value = parse_int(frac_part, input)?;
        let magnitude = Rational::new(int_value * &scale + frac_value, scale);
        return Ok(if negative { -magnitude } else { magnitude });
    }
    Ok(Rational::from_integer(parse_int(s, input)?))
}

/// Canonical text: `"p/q"` in lowest terms, or `"p"` when the denominator is one.
pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn sum<'a>(values: impl IntoIterator<Item = &'a Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn is_positive(q: &Rational) -> bool {
    q.is_positive()
}

/// Two to the power `-k`.
pub fn inv_pow2(k: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(2u32).pow(k))
}

/// Display adapter for slices of rationals, used by LP listings and diagnostics.
pub struct Row<'a>(pub &'a [Rational]);

impl fmt::Display for Row<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (k, q) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            f.write_str(&format_rational(q))?;
        }
        f.write_str("]")
    }
}

/// Serde helpers: rationals travel as strings.
pub mod serde_rational {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Rational;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational string such as \"3/7\", \"0.25\" or \"-2\"")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Rational, E> {
                parse_rational(v).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Rational, E> {
                Ok(int(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Rational, E> {
                Ok(Rational::from_integer(BigInt::from(v)))
            }
        }
        d.deserialize_any(V)
    }
}

/// Serde helpers for `Vec<Rational>`.
pub mod serde_vec {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "serde_rational")] Rational);

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw: Vec<Wrap> = Vec::deserialize(d)?;
        Ok(raw.into_iter().map(|w| w.0).collect())
    }
}

/// Serde helpers for `Vec<Vec<Rational>>`.
pub mod serde_matrix {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "serde_vec")] Vec<Rational>);

    pub fn serialize<S: Serializer>(m: &[Vec<Rational>], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(
            m.iter()
                .map(|row| row.iter().map(format_rational).collect::<Vec<_>>()),
        )
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec<Rational>>, D::Error> {
        let raw: Vec<Wrap> = Vec::deserialize(d)?;
        Ok(raw.into_iter().map(|w| w.0).collect())
    }
}

/// Serde helpers for `Option<Vec<Vec<Rational>>>`.
pub mod serde_opt_matrix {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "serde_matrix")] Vec<Vec<Rational>>);

    pub fn serialize<S: Serializer>(m: &Option<Vec<Vec<Rational>>>, s: S) -> Result<S::Ok, S::Error> {
        match m {
            Some(m) => super::serde_matrix::serialize(m, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        d: D,
    ) -> Result<Option<Vec<Vec<Rational>>>, D::Error> {
        let raw: Option<Wrap> = Option::deserialize(d)?;
        Ok(raw.map(|w| w.0))
    }
}

/// Serde helpers for `Option<Vec<Rational>>`.
pub mod serde_opt_vec {
    use super::*;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize)]
    struct Wrap(#[serde(with = "serde_vec")] Vec<Rational>);

    pub fn serialize<S: Serializer>(v: &Option<Vec<Rational>>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => super::serde_vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<Rational>>, D::Error> {
        let raw: Option<Wrap> = Option::deserialize(d)?;
        Ok(raw.map(|w| w.0))
    }
}
