//! Exact rational helpers and the `"num/den"` wire format.
//!
//! All probabilities in the measure-theoretic layer are `BigRational`s and
//! serialize as `"num/den"` strings (`"3/5"`, `"1"`), never as floats.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{CournotError, Result};

/// Parses `"num/den"` or a bare integer into an exact rational.
pub fn parse_rational(input: &str) -> Result<BigRational> {
    let s = input.trim();
    let err = || CournotError::RationalParse {
        input: input.to_string(),
    };
    if s.is_empty() {
        return Err(err());
    }
    match s.split_once('/') {
        Some((num, den)) => {
            let num: BigInt = num.trim().parse().map_err(|_| err())?;
            let den: BigInt = den.trim().parse().map_err(|_| err())?;
            if den.is_zero() {
                return Err(err());
            }
            Ok(BigRational::new(num, den))
        }
        None => {
            let num: BigInt = s.parse().map_err(|_| err())?;
            Ok(BigRational::from_integer(num))
        }
    }
}

/// Formats a rational as `"num/den"`, collapsing integer values to `"num"`.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational from a finite `f64` (every finite float is a dyadic rational).
pub fn from_f64_exact(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or(CournotError::InvalidParameter {
        name: "float",
        reason: format!("{x} is not finite"),
    })
}

pub fn is_unit_range(r: &BigRational) -> bool {
    !r.is_negative() && *r <= BigRational::one()
}

/// `#[serde(serialize_with = ...)]` helper: rationals as `"num/den"`.
pub fn serialize_rational_string<S>(
    r: &BigRational,
    serializer: S,
) -> std::result::Result<S::Ok, S::Error>
where
    S: serde::Serializer,
{
    serializer.serialize_str(&format_rational(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3/5", "1", "0", "7/3", "-1/2"] {
            let r = parse_rational(s).unwrap();
            assert_eq!(format_rational(&r), s);
        }
    }

    #[test]
    fn parse_normalizes() {
        assert_eq!(parse_rational("2/4").unwrap(), ratio(1, 2));
        assert_eq!(format_rational(&parse_rational("4/2").unwrap()), "2");
    }

    #[test]
    fn parse_rejects_garbage() {
        for s in ["", "1/0", "a/b", "1.5", "1/2/3"] {
            assert!(parse_rational(s).is_err(), "accepted {s:?}");
        }
    }

    #[test]
    fn dyadic_floats_are_exact() {
        let r = from_f64_exact(0.375).unwrap();
        assert_eq!(r, ratio(3, 8));
    }
}
