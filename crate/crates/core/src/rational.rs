//! Exact rational helpers shared across modules.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::str::FromStr;

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

/// Formats as `p/q`, or `p` when the denominator is one.
pub fn format(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse rational literal `{0}`")]
pub struct ParseRationalError(pub String);

/// Parses `p/q`, `p`, or a terminating decimal such as `0.25`.
pub fn parse(s: &str) -> Result<Rational, ParseRationalError> {
    let t = s.trim();
    let err = || ParseRationalError(s.to_string());
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let negative = whole.starts_with('-');
        let whole = if whole.is_empty() || whole == "-" { "0" } else { whole };
        let w = BigInt::from_str(whole).map_err(|_| err())?;
        let f = BigInt::from_str(frac).map_err(|_| err())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let mut frac_part = BigRational::new(f, scale);
        if negative {
            frac_part = -frac_part;
        }
        return Ok(BigRational::from_integer(w) + frac_part);
    }
    BigInt::from_str(t).map(BigRational::from_integer).map_err(|_| err())
}

/// Parses a weight literal with the `ε` shorthand: `x`, `x+e`, `x-e`, `x+ke`, or `e`.
pub fn parse_with_epsilon(s: &str, epsilon: &Rational) -> Result<Rational, ParseRationalError> {
    let t = s.trim();
    if let Some(stripped) = t.strip_suffix('e') {
        if stripped.is_empty() {
            return Ok(epsilon.clone());
        }
        // split at the last sign that is not the leading one
        let split = stripped
            .char_indices()
            .rev()
            .find(|&(i, c)| i > 0 && (c == '+' || c == '-'))
            .map(|(i, _)| i);
        if let Some(i) = split {
            let base = parse(&stripped[..i])?;
            let sign = if &stripped[i..i + 1] == "-" { -Rational::one() } else { Rational::one() };
            let coeff_str = &stripped[i + 1..];
            let coeff = if coeff_str.is_empty() { Rational::one() } else { parse(coeff_str)? };
            return Ok(base + sign * coeff * epsilon);
        }
        let coeff = parse(stripped).map_err(|_| ParseRationalError(s.to_string()))?;
        return Ok(coeff * epsilon);
    }
    parse(t)
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

/// Serde adapter for a single rational as a `"p/q"` string.
pub mod as_string {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        format(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for `Vec<Rational>` as an array of `"p/q"` strings.
pub mod vec_as_strings {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(format).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse("3/6").unwrap(), rat(1, 2));
        assert_eq!(parse("-2").unwrap(), int(-2));
        assert_eq!(parse("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse("-1.5").unwrap(), rat(-3, 2));
        assert!(parse("1/0").is_err());
        assert!(parse("abc").is_err());
    }

    #[test]
    fn epsilon_shorthand() {
        let e = rat(1, 1000);
        assert_eq!(parse_with_epsilon("1/3+e", &e).unwrap(), rat(1, 3) + rat(1, 1000));
        assert_eq!(parse_with_epsilon("1/5-e", &e).unwrap(), rat(1, 5) - rat(1, 1000));
        assert_eq!(parse_with_epsilon("1/2+2e", &e).unwrap(), rat(1, 2) + rat(2, 1000));
        assert_eq!(parse_with_epsilon("e", &e).unwrap(), e);
        assert_eq!(parse_with_epsilon("3e", &e).unwrap(), rat(3, 1000));
        assert_eq!(parse_with_epsilon("1", &e).unwrap(), int(1));
    }

    #[test]
    fn formats_integers_without_denominator() {
        assert_eq!(format(&rat(4, 2)), "2");
        assert_eq!(format(&rat(-1, 3)), "-1/3");
    }
}
