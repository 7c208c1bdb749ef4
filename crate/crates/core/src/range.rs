use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid range: expected lo <= mid <= hi, got ({lo}, {mid}, {hi})")]
pub struct InvalidRange {
    pub lo: f64,
    pub mid: f64,
    pub hi: f64,
}

/// Low / central / high triple, used both for sensitivity inputs and for
/// projected output envelopes. Always ordered `lo <= mid <= hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawRange")]
pub struct ProjectionRange {
    pub lo: f64,
    pub mid: f64,
    pub hi: f64,
}

/// Sensitivity bounds on an input share the output type.
pub type Bounds = ProjectionRange;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRange {
    lo: f64,
    mid: f64,
    hi: f64,
}

impl TryFrom<RawRange> for ProjectionRange {
    type Error = InvalidRange;

    fn try_from(raw: RawRange) -> Result<Self, Self::Error> {
        ProjectionRange::new(raw.lo, raw.mid, raw.hi)
    }
}

/// Which corner of a sensitivity box to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corner {
    Lo,
    Mid,
    Hi,
}

impl ProjectionRange {
    pub fn new(lo: f64, mid: f64, hi: f64) -> Result<Self, InvalidRange> {
        if lo <= mid && mid <= hi {
            Ok(Self { lo, mid, hi })
        } else {
            Err(InvalidRange { lo, mid, hi })
        }
    }

    pub fn point(value: f64) -> Self {
        Self {
            lo: value,
            mid: value,
            hi: value,
        }
    }

    pub fn pick(&self, corner: Corner) -> f64 {
        match corner {
            Corner::Lo => self.lo,
            Corner::Mid => self.mid,
            Corner::Hi => self.hi,
        }
    }

    /// Builds a range from three evaluations that need not be ordered;
    /// `mid` must lie between the other two.
    pub fn from_unordered(a: f64, mid: f64, b: f64) -> Result<Self, InvalidRange> {
        Self::new(a.min(b), mid, a.max(b))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self, InvalidRange> {
        Self::from_unordered(f(self.lo), f(self.mid), f(self.hi))
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lo <= value && value <= self.hi
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }
}

impl fmt::Display for ProjectionRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.2} [{:.2}, {:.2}]", self.mid, self.lo, self.hi)
    }
}
