//! Small helpers around [`BigRational`]: parsing, string serde and a
//! display-only decimal rendering.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parses `"p"` or `"p/q"`; a zero denominator is rejected.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("malformed rational {text:?}"));
    match t.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(t.parse().map_err(|_| bad())?)),
    }
}

/// Scientific-notation rendering for humans. Never used for decisions.
pub fn to_decimal(q: &Rational) -> String {
    if q.is_zero() {
        return "0".to_string();
    }
    match q.to_f64() {
        Some(f) if f.is_finite() && f != 0.0 => format!("{f:.6e}"),
        _ => {
            // magnitude beyond f64: estimate the exponent from digit counts
            let n = q.numer().abs().to_string().len() as i64;
            let d = q.denom().to_string().len() as i64;
            let sign = if q.is_negative() { "-" } else { "" };
            format!("{sign}~1e{}", n - d)
        }
    }
}

/// Serde adapter storing a rational as its exact `"p/q"` string.
pub mod serde_string {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&q.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let text = String::deserialize(d)?;
        parse_rational(&text).map_err(serde::de::Error::custom)
    }

    pub mod option {
        use super::*;

        pub fn serialize<S: Serializer>(q: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
            match q {
                Some(q) => s.serialize_some(&q.to_string()),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
            let text = Option::<String>::deserialize(d)?;
            text.map(|t| parse_rational(&t).map_err(serde::de::Error::custom)).transpose()
        }
    }
}
