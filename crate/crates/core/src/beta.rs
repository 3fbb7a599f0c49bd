//! Extended-real inverse temperature.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A finite real or negative infinity. Positive infinity and NaN are
/// unrepresentable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Beta(f64);

impl Beta {
    pub const NEG_INFINITY: Beta = Beta(f64::NEG_INFINITY);
    pub const ZERO: Beta = Beta(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_nan() || value == f64::INFINITY {
            return Err(Error::param(format!("beta must be finite or -inf, got {value}")));
        }
        Ok(Beta(value))
    }

    /// Panics on `+inf` or NaN; for literals and values already known valid.
    pub fn finite(value: f64) -> Self {
        assert!(value.is_finite(), "finite beta expected, got {value}");
        Beta(value)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_neg_infinite(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// Midpoint of `[self, other]`; any interval starting at `-inf` has
    /// midpoint `-inf`.
    pub fn midpoint(self, other: Beta) -> Beta {
        if self.is_neg_infinite() || other.is_neg_infinite() {
            Beta::NEG_INFINITY
        } else {
            Beta(0.5 * (self.0 + other.0))
        }
    }
}

impl Eq for Beta {}

impl PartialOrd for Beta {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Beta {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_neg_infinite() {
            f.write_str("-inf")
        } else {
            // shortest representation that round-trips exactly
            write!(f, "{:?}", self.0)
        }
    }
}

impl FromStr for Beta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("-inf") || t.eq_ignore_ascii_case("-infinity") {
            return Ok(Beta::NEG_INFINITY);
        }
        let v: f64 = t
            .parse()
            .map_err(|_| Error::param(format!("cannot parse beta from {t:?}")))?;
        Beta::new(v)
    }
}

impl TryFrom<f64> for Beta {
    type Error = Error;

    fn try_from(v: f64) -> Result<Self> {
        Beta::new(v)
    }
}

impl Serialize for Beta {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_neg_infinite() {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Beta {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct BetaVisitor;

        impl Visitor<'_> for BetaVisitor {
            type Value = Beta;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a finite number or the string \"-inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<Beta, E> {
                Beta::new(v).map_err(E::custom)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Beta, E> {
                Ok(Beta(v as f64))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Beta, E> {
                Ok(Beta(v as f64))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Beta, E> {
                v.parse().map_err(E::custom)
            }
        }

        d.deserialize_any(BetaVisitor)
    }
}
