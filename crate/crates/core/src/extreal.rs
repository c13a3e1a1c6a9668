//! Values in `ℝ ∪ {+∞}` with the arithmetic conventions used by divergence
//! integrands.
//!
//! `+∞` is a tag, not an IEEE infinity: `0 · (+∞)` must be `0`, which raw
//! floating-point arithmetic would turn into NaN.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An extended real in `(−∞, +∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Wraps a finite real. NaN and IEEE infinities are rejected.
    pub fn finite(x: f64) -> Result<Self> {
        if x.is_finite() {
            Ok(ExtReal::Finite(x))
        } else {
            Err(Error::NonFinite(format!("{x} is not a finite real")))
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtReal::PosInf)
    }

    pub fn is_finite(self) -> bool {
        !self.is_infinite()
    }

    /// The finite payload, or `None` for `+∞`.
    pub fn as_finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            ExtReal::PosInf => None,
        }
    }

    /// Lossy view as an IEEE double (`+∞` becomes `f64::INFINITY`).
    pub fn to_f64(self) -> f64 {
        self.as_finite().unwrap_or(f64::INFINITY)
    }
}

impl Default for ExtReal {
    fn default() -> Self {
        ExtReal::ZERO
    }
}

/// `a + b`; `+∞` absorbs.
pub fn ext_add(a: ExtReal, b: ExtReal) -> ExtReal {
    match (a, b) {
        (ExtReal::Finite(x), ExtReal::Finite(y)) => ExtReal::Finite(x + y),
        _ => ExtReal::PosInf,
    }
}

/// `c · a` for `c ≥ 0`, with `0 · (+∞) = 0` and `c · (+∞) = +∞` for `c > 0`.
pub fn ext_scale(c: f64, a: ExtReal) -> Result<ExtReal> {
    if c.is_nan() || c < 0.0 || c.is_infinite() {
        return Err(Error::InvalidScale(c));
    }
    Ok(match a {
        ExtReal::Finite(x) => ExtReal::Finite(c * x),
        ExtReal::PosInf if c == 0.0 => ExtReal::ZERO,
        ExtReal::PosInf => ExtReal::PosInf,
    })
}

impl std::ops::Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        ext_add(self, rhs)
    }
}

impl std::iter::Sum for ExtReal {
    fn sum<I: Iterator<Item = ExtReal>>(iter: I) -> ExtReal {
        iter.fold(ExtReal::ZERO, ext_add)
    }
}

impl From<f64> for ExtReal {
    /// `f64::INFINITY` maps to `+∞`. Panics on NaN or `−∞`.
    fn from(x: f64) -> Self {
        assert!(!x.is_nan() && x != f64::NEG_INFINITY, "{x} is not in (-inf, +inf]");
        if x == f64::INFINITY {
            ExtReal::PosInf
        } else {
            ExtReal::Finite(x)
        }
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Finite(x), ExtReal::Finite(y)) => x.partial_cmp(y),
            (ExtReal::Finite(_), ExtReal::PosInf) => Some(Ordering::Less),
            (ExtReal::PosInf, ExtReal::Finite(_)) => Some(Ordering::Greater),
            (ExtReal::PosInf, ExtReal::PosInf) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => fmt::Display::fmt(x, f),
            // width and alignment apply, precision does not truncate
            ExtReal::PosInf => match (f.width(), f.align()) {
                (None, _) => f.write_str("+inf"),
                (Some(w), Some(fmt::Alignment::Left)) => write!(f, "{:<w$}", "+inf"),
                (Some(w), Some(fmt::Alignment::Center)) => write!(f, "{:^w$}", "+inf"),
                (Some(w), _) => write!(f, "{:>w$}", "+inf"),
            },
        }
    }
}

impl FromStr for ExtReal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "+inf" {
            return Ok(ExtReal::PosInf);
        }
        let x: f64 = s.parse().map_err(|_| Error::NonFinite(format!("cannot parse {s:?} as an extended real")))?;
        ExtReal::finite(x)
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExtReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
