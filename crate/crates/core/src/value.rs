use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A nonnegative extended real: the value of a kappa-norm, a directed
/// distance, the metric D, or a kappa-form. `+inf` is reserved for empty
/// set arguments and unbounded suprema.
#[derive(Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct KappaValue(f64);

impl KappaValue {
    pub const ZERO: KappaValue = KappaValue(0.0);
    pub const INFINITY: KappaValue = KappaValue(f64::INFINITY);

    /// Clamps tiny negative round-off to zero.
    ///
    /// Panics on NaN or on values below `-1e-9`, both of which indicate a
    /// bug upstream.
    pub fn new(v: f64) -> Self {
        assert!(!v.is_nan(), "kappa value is NaN");
        assert!(v >= -1e-9, "kappa value {v} is negative");
        KappaValue(v.max(0.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn max(self, other: KappaValue) -> KappaValue {
        if self.0 >= other.0 {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: KappaValue) -> KappaValue {
        if self.0 <= other.0 {
            self
        } else {
            other
        }
    }

    pub fn total_cmp(&self, other: &KappaValue) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl std::ops::Add for KappaValue {
    type Output = KappaValue;
    fn add(self, rhs: KappaValue) -> KappaValue {
        KappaValue(self.0 + rhs.0)
    }
}

impl From<KappaValue> for f64 {
    fn from(v: KappaValue) -> f64 {
        v.0
    }
}

impl fmt::Debug for KappaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for KappaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for KappaValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        extended::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for KappaValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = extended::deserialize(d)?;
        if v.is_nan() || v < 0.0 {
            return Err(de::Error::custom("kappa value must be nonnegative"));
        }
        Ok(KappaValue(v))
    }
}

/// Serde helpers for `f64` fields that may be infinite. JSON has no infinity
/// literal, so `+inf` / `-inf` are written as the strings `"inf"` / `"-inf"`.
pub mod extended {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_infinite() {
            s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct ExtVisitor;
        impl<'de> Visitor<'de> for ExtVisitor {
            type Value = f64;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a number or \"inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v {
                    "inf" | "+inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    _ => Err(E::custom(format!("unexpected string {v:?}"))),
                }
            }
        }
        d.deserialize_any(ExtVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_round_trips_through_json() {
        let s = serde_json::to_string(&KappaValue::INFINITY).unwrap();
        assert_eq!(s, "\"inf\"");
        let back: KappaValue = serde_json::from_str(&s).unwrap();
        assert!(back.is_infinite());
        let v: KappaValue = serde_json::from_str("2.5").unwrap();
        assert_eq!(v.value(), 2.5);
    }

    #[test]
    fn negative_values_are_rejected() {
        assert!(serde_json::from_str::<KappaValue>("-1.0").is_err());
    }

    #[test]
    fn round_off_is_clamped() {
        assert_eq!(KappaValue::new(-1e-17).value(), 0.0);
    }
}
