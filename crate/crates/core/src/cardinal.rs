//! Cardinal arithmetic restricted to the naturals plus omega.

use std::fmt;
use std::ops::{Add, AddAssign, Mul};

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A natural number or the first infinite cardinal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolicCardinal {
    Finite(u64),
    Omega,
}

pub use SymbolicCardinal::{Finite, Omega};

impl SymbolicCardinal {
    pub fn is_finite(self) -> bool {
        matches!(self, Finite(_))
    }

    pub fn is_omega(self) -> bool {
        matches!(self, Omega)
    }

    pub fn finite_value(self) -> Option<u64> {
        match self {
            Finite(n) => Some(n),
            Omega => None,
        }
    }
}

impl Add for SymbolicCardinal {
    type Output = SymbolicCardinal;

    fn add(self, rhs: SymbolicCardinal) -> SymbolicCardinal {
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite(a + b),
            _ => Omega,
        }
    }
}

impl AddAssign for SymbolicCardinal {
    fn add_assign(&mut self, rhs: SymbolicCardinal) {
        *self = *self + rhs;
    }
}

impl Mul for SymbolicCardinal {
    type Output = SymbolicCardinal;

    /// Cardinal multiplication: omega times zero is zero.
    fn mul(self, rhs: SymbolicCardinal) -> SymbolicCardinal {
        match (self, rhs) {
            (Finite(a), Finite(b)) => Finite(a * b),
            (Omega, Finite(0)) | (Finite(0), Omega) => Finite(0),
            _ => Omega,
        }
    }
}

impl fmt::Display for SymbolicCardinal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finite(n) => write!(f, "{n}"),
            Omega => write!(f, "omega"),
        }
    }
}

impl Serialize for SymbolicCardinal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Finite(n) => serializer.serialize_u64(*n),
            Omega => serializer.serialize_str("omega"),
        }
    }
}

impl<'de> Deserialize<'de> for SymbolicCardinal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            Number(u64),
            Text(String),
        }
        match Wire::deserialize(deserializer)? {
            Wire::Number(n) => Ok(Finite(n)),
            Wire::Text(s) if s == "omega" => Ok(Omega),
            Wire::Text(s) => Err(D::Error::custom(format!(
                "multiplicity must be a natural number or \"omega\", got {s:?}"
            ))),
        }
    }
}
