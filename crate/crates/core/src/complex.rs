//! Complex-number helpers shared across the crate: the `C64` alias, the
//! `[re, im]` JSON encoding and the `a+bi` literal parser used by the CLI.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

/// `1 / (2πi)`
pub fn inv_two_pi_i() -> C64 {
    C64::new(0.0, -1.0 / std::f64::consts::TAU)
}

pub fn is_finite(z: C64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Parses `a+bi`, `a-bi`, `a`, `bi`, `i`, `-i`, with exponents allowed in
/// both parts (`1e-3+2.5e1i`).
pub fn parse_complex(text: &str) -> Result<C64> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty complex literal".into()));
    }
    let bad = || Error::Parse(format!("invalid complex literal `{text}`"));
    if let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) {
        // Find the sign separating the real and imaginary parts, skipping a
        // leading sign and signs that belong to an exponent.
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            let c = bytes[k];
            if (c == b'+' || c == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                split = Some(k);
                break;
            }
        }
        let imag = |t: &str| -> Result<f64> {
            match t {
                "" | "+" => Ok(1.0),
                "-" => Ok(-1.0),
                _ => t.parse::<f64>().map_err(|_| bad()),
            }
        };
        match split {
            Some(k) => {
                let re = body[..k].parse::<f64>().map_err(|_| bad())?;
                Ok(C64::new(re, imag(&body[k..])?))
            }
            None => Ok(C64::new(0.0, imag(body)?)),
        }
    } else {
        s.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad())
    }
}

/// Serde adapters storing complex numbers as `[re, im]`.
pub mod serde_pair {
    use super::C64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }

    pub mod vec {
        use super::C64;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(v: &[C64], s: S) -> Result<S::Ok, S::Error> {
            let pairs: Vec<[f64; 2]> = v.iter().map(|z| [z.re, z.im]).collect();
            pairs.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<C64>, D::Error> {
            let pairs = Vec::<[f64; 2]>::deserialize(d)?;
            Ok(pairs.into_iter().map(|[re, im]| C64::new(re, im)).collect())
        }
    }

    pub mod option_vec {
        use super::C64;
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(v: &Option<Vec<C64>>, s: S) -> Result<S::Ok, S::Error> {
            v.as_ref()
                .map(|v| v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
                .serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<C64>>, D::Error> {
            let pairs = Option::<Vec<[f64; 2]>>::deserialize(d)?;
            Ok(pairs.map(|v| v.into_iter().map(|[re, im]| C64::new(re, im)).collect()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_literals() {
        assert_eq!(parse_complex("2").unwrap(), C64::new(2.0, 0.0));
        assert_eq!(parse_complex("1+2i").unwrap(), C64::new(1.0, 2.0));
        assert_eq!(parse_complex("-1.5-0.25i").unwrap(), C64::new(-1.5, -0.25));
        assert_eq!(parse_complex("i").unwrap(), C64::new(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), C64::new(0.0, -1.0));
        assert_eq!(parse_complex("3i").unwrap(), C64::new(0.0, 3.0));
        assert_eq!(parse_complex("1e-3+2e1i").unwrap(), C64::new(1e-3, 20.0));
        assert_eq!(parse_complex("-2e-1-i").unwrap(), C64::new(-0.2, -1.0));
        assert!(parse_complex("1+2").is_err());
        assert!(parse_complex("").is_err());
        assert!(parse_complex("x").is_err());
    }
}
