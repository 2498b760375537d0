//! Complex local-oscillator amplitudes, `alpha = x + i y`.

use alloc::string::ToString;
use core::fmt;
use core::str::FromStr;
#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::Error;

/// A dimensionless complex displacement amplitude (one measurement setting).
///
/// With the `serde` feature it serializes as its display string, `a+bi`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Amplitude(pub Complex64);

impl Amplitude {
    pub const ZERO: Amplitude = Amplitude(Complex64::new(0.0, 0.0));

    pub const fn new(re: f64, im: f64) -> Self {
        Amplitude(Complex64::new(re, im))
    }

    pub fn from_polar(r: f64, theta: f64) -> Self {
        Amplitude(Complex64::from_polar(r, theta))
    }

    #[inline]
    pub fn re(self) -> f64 {
        self.0.re
    }

    #[inline]
    pub fn im(self) -> f64 {
        self.0.im
    }

    /// `|alpha|^2`
    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.0.norm_sqr()
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.0.norm()
    }

    pub fn is_finite(self) -> bool {
        self.0.re.is_finite() && self.0.im.is_finite()
    }

    /// Total order on `(re, im)`, used for deterministic tie-breaking.
    pub fn total_cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.0.re.total_cmp(&other.0.re).then(self.0.im.total_cmp(&other.0.im))
    }
}

impl From<Complex64> for Amplitude {
    fn from(c: Complex64) -> Self {
        Amplitude(c)
    }
}

impl From<f64> for Amplitude {
    fn from(re: f64) -> Self {
        Amplitude::new(re, 0.0)
    }
}

impl From<Amplitude> for Complex64 {
    fn from(a: Amplitude) -> Self {
        a.0
    }
}

impl fmt::Display for Amplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (re, im) = (self.0.re, self.0.im);
        if im.is_sign_negative() {
            write!(f, "{re}-{}i", -im)
        } else {
            write!(f, "{re}+{im}i")
        }
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for Amplitude {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for Amplitude {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct Visitor;
        impl serde::de::Visitor<'_> for Visitor {
            type Value = Amplitude;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a complex amplitude such as \"1.5-0.5i\"")
            }
            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Amplitude, E> {
                v.parse().map_err(E::custom)
            }
        }
        d.deserialize_str(Visitor)
    }
}

fn parse_real(s: &str, whole: &str) -> Result<f64, Error> {
    match s {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => s.parse::<f64>().map_err(|_| Error::Parse(whole.to_string())),
    }
}

/// Parses `a+bi`, `a-bi`, `a`, `bi` (no whitespace). Exponents such as
/// `1e-3+2i` are accepted.
impl FromStr for Amplitude {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || Error::Parse(s.to_string());
        if s.is_empty() || s.contains(char::is_whitespace) {
            return Err(err());
        }
        let Some(body) = s.strip_suffix('i') else {
            let re: f64 = s.parse().map_err(|_| err())?;
            return finite(Amplitude::new(re, 0.0), s);
        };
        let bytes = body.as_bytes();
        // last sign that is not the leading one and not part of an exponent
        let split =
            (1..bytes.len()).rev().find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
        let (re, im) = match split {
            Some(k) => {
                let re: f64 = body[..k].parse().map_err(|_| err())?;
                (re, parse_real(&body[k..], s)?)
            }
            None => (0.0, parse_real(body, s)?),
        };
        finite(Amplitude::new(re, im), s)
    }
}

fn finite(a: Amplitude, s: &str) -> Result<Amplitude, Error> {
    if a.is_finite() {
        Ok(a)
    } else {
        Err(Error::Parse(s.to_string()))
    }
}
