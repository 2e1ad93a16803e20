use std::fmt;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A real number or `+∞`.
///
/// `+∞` only comes out of support violations (relative entropy) and
/// divergent level laws. Any sum with a `+∞` term is `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    PosInfinity,
}

impl ExtendedReal {
    pub const ZERO: Self = ExtendedReal::Finite(0.0);

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            ExtendedReal::PosInfinity => None,
        }
    }

    /// The finite value; panics on `+∞`.
    pub fn unwrap(self) -> f64 {
        self.finite().expect("ExtendedReal is +inf")
    }

    /// `f64::INFINITY` for the marker.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    pub fn max(self, other: Self) -> Self {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a.max(b)),
            _ => ExtendedReal::PosInfinity,
        }
    }

    /// `self − x` for finite `x`.
    pub fn minus(self, x: f64) -> Self {
        match self {
            ExtendedReal::Finite(a) => ExtendedReal::Finite(a - x),
            ExtendedReal::PosInfinity => ExtendedReal::PosInfinity,
        }
    }
}

impl From<f64> for ExtendedReal {
    fn from(x: f64) -> Self {
        ExtendedReal::Finite(x)
    }
}

impl Add for ExtendedReal {
    type Output = ExtendedReal;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => ExtendedReal::Finite(a + b),
            _ => ExtendedReal::PosInfinity,
        }
    }
}

impl Sub<f64> for ExtendedReal {
    type Output = ExtendedReal;
    fn sub(self, rhs: f64) -> Self {
        self.minus(rhs)
    }
}

/// Scaling by a nonnegative real; `0 · ∞ = 0` as in the cone convention.
impl Mul<ExtendedReal> for f64 {
    type Output = ExtendedReal;
    fn mul(self, rhs: ExtendedReal) -> ExtendedReal {
        match rhs {
            ExtendedReal::Finite(b) => ExtendedReal::Finite(self * b),
            ExtendedReal::PosInfinity if self == 0.0 => ExtendedReal::Finite(0.0),
            ExtendedReal::PosInfinity => ExtendedReal::PosInfinity,
        }
    }
}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        use std::cmp::Ordering::*;
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a.partial_cmp(b),
            (ExtendedReal::PosInfinity, ExtendedReal::PosInfinity) => Some(Equal),
            (ExtendedReal::PosInfinity, _) => Some(Greater),
            (_, ExtendedReal::PosInfinity) => Some(Less),
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::PosInfinity => write!(f, "+inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(x) => s.serialize_f64(*x),
            ExtendedReal::PosInfinity => s.serialize_str("+inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtendedReal {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(ExtendedReal::Finite(x)),
            Raw::Str(s) if s == "+inf" => Ok(ExtendedReal::PosInfinity),
            Raw::Str(s) => Err(serde::de::Error::custom(format!("bad extended real `{s}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinity_absorbs_sums() {
        let x = ExtendedReal::Finite(1.0) + ExtendedReal::PosInfinity;
        assert_eq!(x, ExtendedReal::PosInfinity);
        assert_eq!(0.0 * ExtendedReal::PosInfinity, ExtendedReal::ZERO);
        assert!(ExtendedReal::PosInfinity > ExtendedReal::Finite(1e300));
    }

    #[test]
    fn serde_round_trip() {
        let v = vec![ExtendedReal::Finite(0.5), ExtendedReal::PosInfinity];
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"[0.5,"+inf"]"#);
        let back: Vec<ExtendedReal> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
    }
}
