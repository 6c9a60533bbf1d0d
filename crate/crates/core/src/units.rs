//! Logarithm bases and the extended-real values returned by divergences.

use std::fmt;
use std::ops::Add;

/// Output base for information quantities. Everything is computed in nats
/// and converted on the way out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogBase {
    #[default]
    Natural,
    Two,
    Ten,
}

impl LogBase {
    pub fn ln_base(self) -> f64 {
        match self {
            LogBase::Natural => 1.0,
            LogBase::Two => std::f64::consts::LN_2,
            LogBase::Ten => std::f64::consts::LN_10,
        }
    }

    /// Convert a value measured in nats to this base.
    pub fn from_nats(self, nats: f64) -> f64 {
        match self {
            LogBase::Natural => nats,
            _ => nats / self.ln_base(),
        }
    }

    pub fn parse(s: &str) -> Option<LogBase> {
        match s {
            "e" | "nat" | "nats" | "natural" => Some(LogBase::Natural),
            "2" | "bit" | "bits" => Some(LogBase::Two),
            "10" | "dit" | "dits" => Some(LogBase::Ten),
            _ => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            LogBase::Natural => "e",
            LogBase::Two => "2",
            LogBase::Ten => "10",
        }
    }
}

/// A value in `ℝ ∪ {+∞}`.
///
/// Divergences are `+∞` when absolute continuity fails. That outcome is kept
/// as a tag instead of an `f64::INFINITY` so it never leaks into arithmetic
/// as a NaN; addition saturates at `PosInf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            ExtReal::PosInf => None,
        }
    }

    /// Lossy view as `f64`, mapping the tag to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            ExtReal::PosInf => f64::INFINITY,
        }
    }

    /// Multiply by a finite nonnegative factor. `0 · ∞` is taken as `∞`
    /// only when the factor is positive.
    pub fn scale(self, factor: f64) -> ExtReal {
        debug_assert!(factor >= 0.0 && factor.is_finite());
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(v * factor),
            ExtReal::PosInf if factor > 0.0 => ExtReal::PosInf,
            ExtReal::PosInf => ExtReal::ZERO,
        }
    }

    pub fn in_base(self, base: LogBase) -> ExtReal {
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(base.from_nats(v)),
            ExtReal::PosInf => ExtReal::PosInf,
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::Finite(a + b),
            _ => ExtReal::PosInf,
        }
    }
}

impl Add<f64> for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: f64) -> ExtReal {
        self + ExtReal::Finite(rhs)
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> ExtReal {
        if v == f64::INFINITY {
            ExtReal::PosInf
        } else {
            ExtReal::Finite(v)
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            ExtReal::PosInf => write!(f, "+inf"),
        }
    }
}

/// `x log x` with the convention `0 log 0 = 0`.
#[inline]
pub(crate) fn xlogx(x: f64) -> f64 {
    if x > 0.0 {
        x * x.ln()
    } else {
        0.0
    }
}
