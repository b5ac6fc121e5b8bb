//! The four-valued qualitative sign and its two combination operators.
//!
//! `product` (⊗) chains signs along a trail, `sum` (⊕) merges signs arriving
//! over parallel trails. Both are total, commutative and associative.
//!
//! ```text
//!  ⊗ | +  -  0  ?        ⊕ | +  -  0  ?
//!  --+-----------        --+-----------
//!  + | +  -  0  ?        + | +  ?  +  ?
//!  - | -  +  0  ?        - | ?  -  -  ?
//!  0 | 0  0  0  0        0 | +  -  0  ?
//!  ? | ?  ?  0  ?        ? | ?  ?  ?  ?
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A qualitative sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    /// `+`
    Plus,
    /// `-`
    Minus,
    /// `0`
    Zero,
    /// `?`
    Ambiguous,
}

/// All four signs in table order.
pub const ALL_SIGNS: [Sign; 4] = [Sign::Plus, Sign::Minus, Sign::Zero, Sign::Ambiguous];

impl Sign {
    /// The ⊗-operator.
    pub fn product(self, other: Sign) -> Sign {
        use Sign::*;
        match (self, other) {
            (Zero, _) | (_, Zero) => Zero,
            (Ambiguous, _) | (_, Ambiguous) => Ambiguous,
            (Plus, s) | (s, Plus) => s,
            (Minus, Minus) => Plus,
        }
    }

    /// The ⊕-operator.
    pub fn sum(self, other: Sign) -> Sign {
        use Sign::*;
        match (self, other) {
            (Zero, s) | (s, Zero) => s,
            (a, b) if a == b => a,
            _ => Ambiguous,
        }
    }

    /// Sign of an observed value: `+` for true, `-` for false.
    pub fn from_bool(value: bool) -> Sign {
        if value {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    /// Sign of a real difference, with `|value| <= tolerance` mapped to `0`.
    pub fn of_difference(value: f64, tolerance: f64) -> Sign {
        if value > tolerance {
            Sign::Plus
        } else if value < -tolerance {
            Sign::Minus
        } else {
            Sign::Zero
        }
    }

    /// Whether a quantity whose exact sign is `actual` is correctly described by
    /// `self` under the weak reading (`+` means `>= 0`, `-` means `<= 0`).
    pub fn admits(self, actual: Sign) -> bool {
        match self {
            Sign::Ambiguous => true,
            Sign::Zero => actual == Sign::Zero,
            s => actual == s || actual == Sign::Zero,
        }
    }

    /// True for `+` and `-`.
    pub fn is_strict(self) -> bool {
        matches!(self, Sign::Plus | Sign::Minus)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
            Sign::Zero => "0",
            Sign::Ambiguous => "?",
        }
    }
}

/// Free-function form of [`Sign::product`].
pub fn product(a: Sign, b: Sign) -> Sign {
    a.product(b)
}

/// Free-function form of [`Sign::sum`].
pub fn sum(a: Sign, b: Sign) -> Sign {
    a.sum(b)
}

/// Left fold of ⊕ with identity `0`.
pub fn sum_all<I: IntoIterator<Item = Sign>>(signs: I) -> Sign {
    signs.into_iter().fold(Sign::Zero, Sign::sum)
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid sign {0:?}: expected one of \"+\", \"-\", \"0\", \"?\"")]
pub struct ParseSignError(pub String);

impl FromStr for Sign {
    type Err = ParseSignError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "+" => Ok(Sign::Plus),
            "-" => Ok(Sign::Minus),
            "0" => Ok(Sign::Zero),
            "?" => Ok(Sign::Ambiguous),
            other => Err(ParseSignError(other.to_string())),
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
