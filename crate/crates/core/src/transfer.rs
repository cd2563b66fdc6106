//! Antisymmetric transfer functions applied to similarity differences.
//!
//! The ramp family `clamp(s·x, -1, 1)` runs from the clipped identity
//! (`s = 1`) to the sign function (`s → ∞`).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Slopes of the default ramp family.
pub const DEFAULT_SLOPES: [f64; 6] = [1.0, 5.0, 10.0, 50.0, 100.0, 1000.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TransferFunction {
    Ramp {
        slope: f64,
    },
    Sign,
    /// Clipped identity, `clamp(x, -1, 1)`.
    Identity,
}

impl TransferFunction {
    pub fn ramp(slope: f64) -> Result<Self> {
        if slope > 0.0 && slope.is_finite() {
            Ok(TransferFunction::Ramp { slope })
        } else {
            Err(Error::Argument(format!(
                "ramp slope must be positive and finite, got {slope}"
            )))
        }
    }

    #[inline]
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            TransferFunction::Ramp { slope } => (slope * x).clamp(-1.0, 1.0),
            TransferFunction::Identity => x.clamp(-1.0, 1.0),
            TransferFunction::Sign => {
                if x > 0.0 {
                    1.0
                } else if x < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Effective slope used for tie-breaking: identity counts as 1, sign as
    /// infinitely steep.
    pub fn slope(&self) -> f64 {
        match *self {
            TransferFunction::Ramp { slope } => slope,
            TransferFunction::Identity => 1.0,
            TransferFunction::Sign => f64::INFINITY,
        }
    }
}

impl fmt::Display for TransferFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TransferFunction::Ramp { slope } => write!(f, "ramp:{slope}"),
            TransferFunction::Sign => f.write_str("sign"),
            TransferFunction::Identity => f.write_str("identity"),
        }
    }
}

impl FromStr for TransferFunction {
    type Err = Error;

    /// Parses `ramp:<slope>`, `sign` or `identity`.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "sign" => Ok(TransferFunction::Sign),
            "identity" => Ok(TransferFunction::Identity),
            other => {
                let slope = other
                    .strip_prefix("ramp:")
                    .ok_or_else(|| Error::Argument(format!("unknown transfer {other:?}")))?;
                let slope: f64 = slope
                    .trim()
                    .parse()
                    .map_err(|_| Error::Argument(format!("bad ramp slope {slope:?}")))?;
                TransferFunction::ramp(slope)
            }
        }
    }
}

impl Serialize for TransferFunction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TransferFunction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A non-empty ordered list of distinct transfer functions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<TransferFunction>", into = "Vec<TransferFunction>")]
pub struct TransferFamily {
    members: Vec<TransferFunction>,
}

impl TransferFamily {
    pub fn new(members: Vec<TransferFunction>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::Argument("transfer family is empty".into()));
        }
        for (i, a) in members.iter().enumerate() {
            if members[..i].contains(a) {
                return Err(Error::Argument(format!("duplicate transfer {a}")));
            }
        }
        Ok(TransferFamily { members })
    }

    /// Ramps with slopes {1, 5, 10, 50, 100, 1000}, ascending.
    pub fn default_family() -> Self {
        TransferFamily {
            members: DEFAULT_SLOPES
                .iter()
                .map(|&slope| TransferFunction::Ramp { slope })
                .collect(),
        }
    }

    pub fn members(&self) -> &[TransferFunction] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

impl TryFrom<Vec<TransferFunction>> for TransferFamily {
    type Error = Error;

    fn try_from(members: Vec<TransferFunction>) -> Result<Self> {
        TransferFamily::new(members)
    }
}

impl From<TransferFamily> for Vec<TransferFunction> {
    fn from(family: TransferFamily) -> Self {
        family.members
    }
}

impl FromStr for TransferFamily {
    type Err = Error;

    /// Parses `default` or `ramp:<s1,s2,...>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "default" {
            return Ok(TransferFamily::default_family());
        }
        let slopes = s
            .strip_prefix("ramp:")
            .ok_or_else(|| Error::Argument(format!("unknown family {s:?}")))?;
        let members = slopes
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Argument(format!("bad ramp slope {v:?}")))
                    .and_then(TransferFunction::ramp)
            })
            .collect::<Result<Vec<_>>>()?;
        TransferFamily::new(members)
    }
}

pub fn default_family() -> TransferFamily {
    TransferFamily::default_family()
}

/// Spread `max f(v) − min f(v)` of `f` over observed kernel values.
pub fn c_f(f: &TransferFunction, observed_values: &[f64]) -> Result<f64> {
    if observed_values.is_empty() {
        return Err(Error::Argument(
            "c_f needs at least one observed value".into(),
        ));
    }
    let (lo, hi) = spread(f, observed_values.iter().copied());
    Ok(hi - lo)
}

/// `(min, max)` of `f` over `values`; `(+∞, −∞)` when empty.
pub(crate) fn spread(f: &TransferFunction, values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        let y = f.apply(v);
        (lo.min(y), hi.max(y))
    })
}
