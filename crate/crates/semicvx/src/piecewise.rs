//! Continuous piecewise-affine functions on a closed interval.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A continuous piecewise-affine function given by breakpoint/value pairs.
///
/// Breakpoints are strictly increasing; evaluation between breakpoints is
/// linear interpolation and queries outside `[first, last]` are range errors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseAffine {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl PiecewiseAffine {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.len() != values.len() {
            return Err(Error::Parameter(format!(
                "breakpoint/value length mismatch: {} vs {}",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.len() < 2 {
            return Err(Error::Parameter(
                "piecewise-affine function needs at least 2 breakpoints".into(),
            ));
        }
        for w in breakpoints.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Parameter(format!(
                    "breakpoints not strictly increasing at {} -> {}",
                    w[0], w[1]
                )));
            }
        }
        if breakpoints.iter().chain(values.iter()).any(|v| !v.is_finite()) {
            return Err(Error::Parameter("non-finite breakpoint or value".into()));
        }
        Ok(Self { breakpoints, values })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn first(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn last(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the segment `[b_i, b_{i+1}]` containing `x`, preferring the
    /// left segment at interior breakpoints.
    fn segment_index(&self, x: f64) -> Result<usize> {
        if !(x >= self.first() && x <= self.last()) {
            return Err(Error::Range(format!(
                "{} outside [{}, {}]",
                x,
                self.first(),
                self.last()
            )));
        }
        let i = match self
            .breakpoints
            .binary_search_by(|b| b.partial_cmp(&x).unwrap())
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        Ok(i.min(self.breakpoints.len() - 2))
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let i = self.segment_index(x)?;
        let (x0, x1) = (self.breakpoints[i], self.breakpoints[i + 1]);
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        if x == x0 {
            return Ok(y0);
        }
        if x == x1 {
            return Ok(y1);
        }
        Ok(y0 + (x - x0) * (y1 - y0) / (x1 - x0))
    }

    pub fn segment_slope(&self, i: usize) -> f64 {
        (self.values[i + 1] - self.values[i]) / (self.breakpoints[i + 1] - self.breakpoints[i])
    }

    /// Slope of the segment to the right of `x`. At a breakpoint this is the
    /// slope of the following segment; at or past the last breakpoint it is a
    /// range error.
    pub fn right_slope(&self, x: f64) -> Result<f64> {
        if !(x >= self.first() && x < self.last()) {
            return Err(Error::Range(format!(
                "{} outside [{}, {})",
                x,
                self.first(),
                self.last()
            )));
        }
        let i = match self
            .breakpoints
            .binary_search_by(|b| b.partial_cmp(&x).unwrap())
        {
            Ok(i) => i.min(self.breakpoints.len() - 2),
            Err(i) => i - 1,
        };
        Ok(self.segment_slope(i))
    }

    /// Slope of the segment to the left of `x`; range error at or before the
    /// first breakpoint.
    pub fn left_slope(&self, x: f64) -> Result<f64> {
        if !(x > self.first() && x <= self.last()) {
            return Err(Error::Range(format!(
                "{} outside ({}, {}]",
                x,
                self.first(),
                self.last()
            )));
        }
        let i = match self
            .breakpoints
            .binary_search_by(|b| b.partial_cmp(&x).unwrap())
        {
            Ok(i) => i.max(1) - 1,
            Err(i) => i - 1,
        };
        Ok(self.segment_slope(i))
    }

    /// Exact integral over `[from, to]` (trapezoid rule is exact segmentwise).
    pub fn integral(&self, from: f64, to: f64) -> Result<f64> {
        if from > to {
            return Ok(-self.integral(to, from)?);
        }
        let _ = self.segment_index(from)?;
        let _ = self.segment_index(to)?;
        let mut acc = 0.0;
        let mut x = from;
        let mut y = self.eval(from)?;
        let mut i = self.segment_index(from)?;
        while self.breakpoints[i + 1] < to {
            let x1 = self.breakpoints[i + 1];
            let y1 = self.values[i + 1];
            acc += 0.5 * (y + y1) * (x1 - x);
            x = x1;
            y = y1;
            i += 1;
        }
        let y_to = self.eval(to)?;
        acc += 0.5 * (y + y_to) * (to - x);
        Ok(acc)
    }

    /// True iff successive segment slopes are non-increasing up to `tol`.
    pub fn is_concave(&self, tol: f64) -> bool {
        (1..self.breakpoints.len() - 1)
            .all(|i| self.segment_slope(i) <= self.segment_slope(i - 1) + tol)
    }

    /// True iff values are non-decreasing.
    pub fn is_non_decreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chord() -> PiecewiseAffine {
        PiecewiseAffine::new(vec![0.0, 2.0], vec![0.0, 2.0]).unwrap()
    }

    #[test]
    fn eval_interpolates_and_rejects_outside() {
        let f = PiecewiseAffine::new(vec![0.0, 1.0, 3.0], vec![0.0, 2.0, 2.0]).unwrap();
        assert_eq!(f.eval(0.5).unwrap(), 1.0);
        assert_eq!(f.eval(1.0).unwrap(), 2.0);
        assert_eq!(f.eval(2.0).unwrap(), 2.0);
        assert!(f.eval(-0.1).is_err());
        assert!(f.eval(3.1).is_err());
    }

    #[test]
    fn right_slope_of_chord() {
        assert_eq!(chord().right_slope(0.5).unwrap(), 1.0);
        assert_eq!(chord().right_slope(0.0).unwrap(), 1.0);
        assert!(chord().right_slope(2.0).is_err());
    }

    #[test]
    fn slopes_at_breakpoints_take_correct_side() {
        let f = PiecewiseAffine::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 1.5]).unwrap();
        assert_eq!(f.right_slope(1.0).unwrap(), 0.5);
        assert_eq!(f.left_slope(1.0).unwrap(), 1.0);
        assert_eq!(f.left_slope(2.0).unwrap(), 0.5);
    }

    #[test]
    fn integral_is_exact() {
        let f = PiecewiseAffine::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 1.0]).unwrap();
        assert!((f.integral(0.0, 2.0).unwrap() - 1.5).abs() < 1e-15);
        assert!((f.integral(0.5, 1.5).unwrap() - (0.375 + 0.5)).abs() < 1e-15);
        assert!((f.integral(1.5, 0.5).unwrap() + 0.875).abs() < 1e-15);
    }

    #[test]
    fn concavity_check() {
        let f = PiecewiseAffine::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 1.5]).unwrap();
        assert!(f.is_concave(0.0));
        let g = PiecewiseAffine::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 3.0]).unwrap();
        assert!(!g.is_concave(0.0));
    }

    #[test]
    fn rejects_bad_breakpoints() {
        assert!(PiecewiseAffine::new(vec![0.0, 0.0], vec![0.0, 1.0]).is_err());
        assert!(PiecewiseAffine::new(vec![0.0], vec![0.0]).is_err());
    }
}
