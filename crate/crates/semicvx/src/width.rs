//! Funnel width functions.
//!
//! A width is a positive concave function on `(0, inf)` describing the
//! half-opening of a funnel domain `{(x, y): x > 0, |y| < width(x)}`.
//! Concavity and positivity make widths automatically non-decreasing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piecewise::PiecewiseAffine;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WidthSpec {
    /// `width(x) = c`.
    Constant { c: f64 },
    /// `width(x) = (shift + x)^beta` with `beta` in `(0, 1)`, `shift > 0`.
    PowerShift { beta: f64, shift: f64 },
    /// `width(x) = slope * x + intercept`.
    Affine { slope: f64, intercept: f64 },
    /// Concave non-decreasing piecewise-affine width, constant past the last
    /// breakpoint.
    Piecewise { pwa: PiecewiseAffine },
}

impl WidthSpec {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::Parameter(format!("constant width {c} must be > 0")));
        }
        Ok(Self::Constant { c })
    }

    pub fn power_shift(beta: f64, shift: f64) -> Result<Self> {
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::Parameter(format!("width exponent {beta} outside (0, 1)")));
        }
        if !(shift > 0.0) {
            return Err(Error::Parameter(format!("width shift {shift} must be > 0")));
        }
        Ok(Self::PowerShift { beta, shift })
    }

    pub fn affine(slope: f64, intercept: f64) -> Result<Self> {
        if !(slope >= 0.0) || !(intercept > 0.0) {
            return Err(Error::Parameter(
                "affine width requires slope >= 0 and intercept > 0".into(),
            ));
        }
        Ok(Self::Affine { slope, intercept })
    }

    /// Piecewise-affine width. The graph must be concave and non-decreasing
    /// with positive values past the first breakpoint; the first breakpoint
    /// must be 0 (a width of 0 exactly at the apex is allowed).
    pub fn piecewise(pwa: PiecewiseAffine) -> Result<Self> {
        if pwa.first() != 0.0 {
            return Err(Error::Parameter("piecewise width must start at x = 0".into()));
        }
        if !pwa.is_concave(0.0) {
            return Err(Error::Parameter("piecewise width not concave".into()));
        }
        if !pwa.is_non_decreasing() {
            return Err(Error::Parameter("piecewise width not non-decreasing".into()));
        }
        if pwa.values().iter().skip(1).any(|&v| v <= 0.0) {
            return Err(Error::Parameter("piecewise width not positive past the apex".into()));
        }
        if pwa.values()[0] < 0.0 {
            return Err(Error::Parameter("piecewise width negative at the apex".into()));
        }
        Ok(Self::Piecewise { pwa })
    }

    /// Evaluate the width at `x > 0`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0) {
            return Err(Error::Domain(format!("width argument {x} must be > 0")));
        }
        match self {
            Self::Constant { c } => Ok(*c),
            Self::PowerShift { beta, shift } => Ok((shift + x).powf(*beta)),
            Self::Affine { slope, intercept } => Ok(slope * x + intercept),
            Self::Piecewise { pwa } => {
                if x >= pwa.last() {
                    Ok(*pwa.values().last().unwrap())
                } else {
                    pwa.eval(x)
                }
            }
        }
    }
}
