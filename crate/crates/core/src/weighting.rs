use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Per-neighbor weight used in the least-squares fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WeightKind {
    /// Every neighbor inside the cutoff counts equally.
    Uniform,
    /// MPS kernel `r_cut / dist - 1`, vanishing at the cutoff.
    Mps,
}

impl WeightKind {
    pub fn weight(self, dist: f64, r_cut: f64) -> Result<f64> {
        if !(r_cut.is_finite() && r_cut > 0.0) {
            return Err(Error::InvalidRadius(r_cut));
        }
        if dist <= 0.0 || dist.is_nan() {
            return Err(Error::SingularWeight(dist));
        }
        if dist >= r_cut {
            return Ok(0.0);
        }
        Ok(match self {
            WeightKind::Uniform => 1.0,
            WeightKind::Mps => r_cut / dist - 1.0,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            WeightKind::Uniform => "none",
            WeightKind::Mps => "mps",
        }
    }
}

impl fmt::Display for WeightKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "none" | "uniform" => Ok(WeightKind::Uniform),
            "mps" => Ok(WeightKind::Mps),
            other => Err(format!("unknown weight {other:?} (expected none or mps)")),
        }
    }
}
