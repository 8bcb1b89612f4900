//! Arithmetic backends.
//!
//! Every time value and payoff in this crate is computed through the
//! [`Scalar`] trait, with two implementations: `f64` for fast mode and
//! [`BigRational`] for exact mode. In exact mode a stored weight is
//! interpreted as the exact rational value of its binary floating-point
//! representation, so every comparison is decided with zero tolerance.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Which arithmetic backend a solve runs under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum NumericMode {
    /// Binary 64-bit floating point; sign comparisons taken as-is.
    #[default]
    Fast,
    /// Arbitrary-precision rational arithmetic.
    Exact,
}

impl fmt::Display for NumericMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NumericMode::Fast => write!(f, "fast"),
            NumericMode::Exact => write!(f, "exact"),
        }
    }
}

impl FromStr for NumericMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "fast" => Ok(NumericMode::Fast),
            "exact" => Ok(NumericMode::Exact),
            other => Err(format!(
                "unknown numeric mode `{other}` (expected fast|exact)"
            )),
        }
    }
}

/// Arithmetic shared by fast and exact mode.
pub trait Scalar:
    Clone
    + PartialEq
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + fmt::Debug
{
    fn zero() -> Self;

    fn from_int(v: u64) -> Self;

    /// Lifts a stored weight into the backend.
    fn from_weight(w: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Sign relative to zero. All values in this crate are finite, so the
    /// comparison is total.
    fn sign(&self) -> Ordering {
        self.partial_cmp(&Self::zero())
            .expect("scalar values must be comparable")
    }
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }

    fn from_int(v: u64) -> Self {
        v as f64
    }

    fn from_weight(w: f64) -> Self {
        w
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Scalar for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }

    fn from_int(v: u64) -> Self {
        BigRational::from_integer(v.into())
    }

    fn from_weight(w: f64) -> Self {
        BigRational::from_f64(w).expect("weights are finite")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            // Magnitudes here stay far inside f64 range; fall back on sign.
            if self.is_negative() {
                f64::NEG_INFINITY
            } else {
                f64::INFINITY
            }
        })
    }
}
