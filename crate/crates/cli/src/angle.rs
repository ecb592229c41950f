//! Angle literals: plain decimals or multiples of `pi` such as `pi/2`,
//! `-3pi/4`, `2*pi/3`, `0.5pi`. `π` is accepted as a synonym for `pi`.

use std::f64::consts::PI;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angle(pub f64);

impl Angle {
    pub fn radians(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid angle literal `{0}`")]
pub struct AngleParseError(String);

fn parse_number(s: &str, whole: &str) -> Result<f64, AngleParseError> {
    let err = || AngleParseError(whole.to_string());
    if let Some((num, den)) = s.split_once('/') {
        let (n, d): (f64, f64) = (
            num.parse().map_err(|_| err())?,
            den.parse().map_err(|_| err())?,
        );
        if d == 0.0 {
            return Err(err());
        }
        return Ok(n / d);
    }
    let v: f64 = s.parse().map_err(|_| err())?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(err())
    }
}

pub fn parse_angle(text: &str) -> Result<f64, AngleParseError> {
    let compact: String = text
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_ascii_lowercase()
        .replace('π', "pi");
    let err = || AngleParseError(text.to_string());
    let (sign, body) = match compact.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, compact.strip_prefix('+').unwrap_or(&compact)),
    };
    if body.is_empty() {
        return Err(err());
    }
    let Some((coeff, rest)) = body.split_once("pi") else {
        return parse_number(body, text).map(|v| sign * v);
    };
    let coeff = coeff.strip_suffix('*').unwrap_or(coeff);
    let coeff = if coeff.is_empty() {
        1.0
    } else {
        parse_number(coeff, text)?
    };
    let base = sign * coeff * PI;
    if rest.is_empty() {
        Ok(base)
    } else if let Some(den) = rest.strip_prefix('/') {
        let d: f64 = den.parse().map_err(|_| err())?;
        if d == 0.0 {
            return Err(err());
        }
        Ok(base / d)
    } else if let Some(factor) = rest.strip_prefix('*') {
        factor.parse::<f64>().map(|f| base * f).map_err(|_| err())
    } else {
        Err(err())
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct AngleVisitor;

        impl Visitor<'_> for AngleVisitor {
            type Value = Angle;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or an angle literal such as \"pi/2\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Angle, E> {
                Ok(Angle(v))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Angle, E> {
                Ok(Angle(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Angle, E> {
                parse_angle(v).map(Angle).map_err(E::custom)
            }
        }

        deserializer.deserialize_any(AngleVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        let cases = [
            ("pi", PI),
            ("pi/2", PI / 2.0),
            ("-pi/3", -PI / 3.0),
            ("3pi/4", 3.0 * PI / 4.0),
            ("2*pi/3", 2.0 * PI / 3.0),
            ("0.5pi", 0.5 * PI),
            ("pi*0.25", 0.25 * PI),
            ("π/6", PI / 6.0),
            (" 1.25 ", 1.25),
            ("1/3 pi", PI / 3.0),
            ("0", 0.0),
        ];
        for (text, expected) in cases {
            assert!(
                (parse_angle(text).unwrap() - expected).abs() < 1e-15,
                "{text}"
            );
        }
    }

    #[test]
    fn common_fractions_are_bit_exact() {
        assert_eq!(parse_angle("pi/2").unwrap(), std::f64::consts::FRAC_PI_2);
        assert_eq!(parse_angle("pi/3").unwrap(), PI / 3.0);
        assert_eq!(parse_angle("-pi/4").unwrap(), -std::f64::consts::FRAC_PI_4);
    }

    #[test]
    fn rejects_garbage() {
        for text in ["", "-", "pie", "pi/0", "tau", "pi/2/2", "1e999", "pi^2"] {
            assert!(parse_angle(text).is_err(), "{text}");
        }
    }
}
