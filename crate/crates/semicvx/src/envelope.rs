//! Upper concave envelopes of sampled functions.
//!
//! The envelope of the partition modulus drives the whole counterexample
//! construction: its right derivative supplies the dyadic slope profile, and
//! the growth inequalities checked here are what the construction consumes.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modulus::{GridFunction, ModulusSpec};
use crate::piecewise::PiecewiseAffine;
use crate::report::VerificationReport;
use crate::width::WidthSpec;

/// Upper hull of a point set with strictly increasing abscissae, as a
/// piecewise-affine function. Collinear points are merged, so segment slopes
/// are strictly decreasing and the result is exactly concave.
pub fn upper_hull_points(xs: &[f64], ys: &[f64]) -> Result<PiecewiseAffine> {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 2 {
        return Err(Error::Parameter("hull needs at least 2 points".into()));
    }
    let cross = |o: usize, a: usize, b: usize| -> f64 {
        (xs[a] - xs[o]) * (ys[b] - ys[o]) - (ys[a] - ys[o]) * (xs[b] - xs[o])
    };
    let mut hull: Vec<usize> = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], i) >= 0.0 {
            hull.pop();
        }
        hull.push(i);
    }
    let bx: Vec<f64> = hull.iter().map(|&i| xs[i]).collect();
    let by: Vec<f64> = hull.iter().map(|&i| ys[i]).collect();
    PiecewiseAffine::new(bx, by)
}

/// Least concave majorant of `f` on its grid span, computed as the upper
/// hull of the node set.
pub fn upper_concave_envelope(f: &GridFunction) -> Result<PiecewiseAffine> {
    upper_hull_points(f.xs(), f.ys())
}

/// A computed envelope together with its source nodes, with slope queries.
#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeResult {
    pub envelope: PiecewiseAffine,
}

impl EnvelopeResult {
    pub fn from_grid(source: &GridFunction) -> Result<Self> {
        let envelope = upper_concave_envelope(source)?;
        Ok(Self { envelope })
    }

    /// Right derivative of the envelope at `x` (slope of the segment to the
    /// right; range error at or past the last breakpoint).
    pub fn slope_at(&self, x: f64) -> Result<f64> {
        self.envelope.right_slope(x)
    }
}

/// Checks `f <= envelope <= 2 f` at every node of `f`. The factor-2 bound is
/// what subadditivity of the source guarantees; exceeding it means the
/// source was not subadditive at grid resolution.
pub fn check_envelope_sandwich(f: &GridFunction, envelope: &PiecewiseAffine) -> Result<VerificationReport> {
    let scale = f.ys().iter().copied().fold(1.0f64, f64::max);
    let mut rep = VerificationReport::from_violations("envelope_sandwich", 0.0);
    for (&x, &y) in f.xs().iter().zip(f.ys()) {
        let e = envelope.eval(x)?;
        let below = y - e; // > 0 means envelope dipped under the source
        let above = e - 2.0 * y; // > 0 means majorant exceeds twice the source
        rep.record(below.max(above) - 1e-12 * scale, &[x, y, e]);
    }
    Ok(rep.finish())
}

/// Checks the envelope growth inequality
/// `envelope(t + width(t)) <= envelope(t) + 2 w(width(t))` on the given
/// sample abscissae. Samples with `width(t) > t` fall outside the
/// hypothesis and are skipped, as are samples leaving the envelope domain.
/// `slack` absorbs the discretization error carried by the envelope.
pub fn check_envelope_growth(
    envelope: &PiecewiseAffine,
    w: &ModulusSpec,
    width: &WidthSpec,
    ts: &[f64],
    slack: impl Fn(f64) -> f64,
) -> Result<VerificationReport> {
    let mut rep = VerificationReport::from_violations("envelope_growth", 0.0);
    for &t in ts {
        if !(t > 0.0) {
            rep.skip();
            continue;
        }
        let eta_t = width.eval(t)?;
        if eta_t > t || t + eta_t > envelope.last() {
            rep.skip();
            continue;
        }
        let lhs = envelope.eval(t + eta_t)? - envelope.eval(t)?;
        let rhs = 2.0 * w.eval(eta_t)?;
        rep.record(lhs - rhs - slack(t + eta_t), &[t, eta_t, lhs, rhs]);
    }
    Ok(rep.finish())
}

/// Checks the uniform growth bound
/// `envelope(x+h) - envelope(x) <= 4 max(1, h / width(x+h)) w(h)` over
/// sampled pairs, again with grid slack.
pub fn check_uniform_growth_bound(
    envelope: &PiecewiseAffine,
    w: &ModulusSpec,
    width: &WidthSpec,
    pairs: &[(f64, f64)],
    slack: impl Fn(f64) -> f64,
) -> Result<VerificationReport> {
    let mut rep = VerificationReport::from_violations("envelope_uniform_growth", 0.0);
    for &(x, h) in pairs {
        if !(x > 0.0 && h > 0.0) || x + h > envelope.last() {
            rep.skip();
            continue;
        }
        let lhs = envelope.eval(x + h)? - envelope.eval(x)?;
        let factor = (h / width.eval(x + h)?).max(1.0);
        let rhs = 4.0 * factor * w.eval(h)?;
        rep.record(lhs - rhs - slack(x + h), &[x, h, lhs, rhs]);
    }
    Ok(rep.finish())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent quadratic-time hull oracle: the envelope value at a node
    /// is the best chord value over all node pairs spanning it.
    fn hull_oracle(xs: &[f64], ys: &[f64], x: f64) -> f64 {
        let mut best = f64::NEG_INFINITY;
        for i in 0..xs.len() {
            for j in i..xs.len() {
                let (xi, xj) = (xs[i], xs[j]);
                if !(xi <= x && x <= xj) {
                    continue;
                }
                let v = if i == j {
                    ys[i]
                } else {
                    ys[i] + (x - xi) * (ys[j] - ys[i]) / (xj - xi)
                };
                best = best.max(v);
            }
        }
        best
    }

    #[test]
    fn envelope_of_concave_input_is_input() {
        let f = GridFunction::sample((0..9).map(|i| i as f64 * 0.5).collect(), |x| x.sqrt()).unwrap();
        let e = upper_concave_envelope(&f).unwrap();
        for (&x, &y) in f.xs().iter().zip(f.ys()) {
            assert!((e.eval(x).unwrap() - y).abs() < 1e-15);
        }
    }

    #[test]
    fn two_point_hull_is_chord() {
        let f = GridFunction::new(vec![0.0, 1.0, 2.0], vec![0.0, 0.0, 2.0]).unwrap();
        let e = upper_concave_envelope(&f).unwrap();
        assert_eq!(e.eval(1.0).unwrap(), 1.0);
        assert_eq!(e.breakpoints().len(), 2);
    }

    #[test]
    fn hull_matches_oracle_on_wiggly_input() {
        let xs: Vec<f64> = (0..40).map(|i| i as f64 * 0.25).collect();
        let ys: Vec<f64> = xs
            .iter()
            .map(|&x| if x == 0.0 { 0.0 } else { x.sqrt() + 0.3 * (3.0 * x).sin().abs() })
            .collect();
        let e = upper_hull_points(&xs, &ys).unwrap();
        for &x in &xs {
            let got = e.eval(x).unwrap();
            let want = hull_oracle(&xs, &ys, x);
            assert!((got - want).abs() < 1e-12, "hull at {x}: {got} vs oracle {want}");
        }
        assert!(e.is_concave(0.0));
    }

    #[test]
    fn envelope_idempotent() {
        let xs: Vec<f64> = (0..30).map(|i| i as f64 * 0.3).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| (x * 1.3).min(2.0 + 0.1 * x)).collect();
        let e1 = upper_hull_points(&xs, &ys).unwrap();
        let resampled: Vec<f64> = xs.iter().map(|&x| e1.eval(x).unwrap()).collect();
        let e2 = upper_hull_points(&xs, &resampled).unwrap();
        for &x in &xs {
            assert!((e1.eval(x).unwrap() - e2.eval(x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn sandwich_detects_fabricated_violation() {
        let f = GridFunction::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 1.2]).unwrap();
        let e = upper_concave_envelope(&f).unwrap();
        assert!(check_envelope_sandwich(&f, &e).unwrap().pass);
        // Triple the envelope: the factor-2 bound must flag it.
        let tripled = PiecewiseAffine::new(
            e.breakpoints().to_vec(),
            e.values().iter().map(|v| 3.0 * v).collect(),
        )
        .unwrap();
        assert!(!check_envelope_sandwich(&f, &tripled).unwrap().pass);
    }

    #[test]
    fn envelope_of_partition_modulus_strictly_above_near_the_kink() {
        use crate::partition_modulus::{build_grid, compute_partition_modulus, GridParams, Pruning};
        use crate::width::WidthSpec;
        let w = ModulusSpec::power(0.5).unwrap();
        let eta = WidthSpec::constant(1.0).unwrap();
        let grid = build_grid(&eta, &GridParams::new(100.0, 1.05, 4.0)).unwrap();
        let pm = compute_partition_modulus(&w, &eta, &grid, Pruning::On).unwrap();
        let psi = upper_concave_envelope(pm.values()).unwrap();
        // the values switch from sqrt-like to linear growth near h = 1, so
        // the hull must rise strictly above them there, while staying below
        // twice the values everywhere
        let gap = grid
            .nodes()
            .iter()
            .enumerate()
            .skip(1)
            .take_while(|(_, &h)| h <= 3.0)
            .map(|(k, &h)| psi.eval(h).unwrap() - pm.value_at_node(k))
            .fold(0.0f64, f64::max);
        assert!(gap > 0.1, "hull should clear the kink region, max gap {gap}");
        assert!(check_envelope_sandwich(pm.values(), &psi).unwrap().pass);
    }

    #[test]
    fn slope_integral_reconstructs_the_envelope() {
        use crate::partition_modulus::{build_grid, compute_partition_modulus, GridParams, Pruning};
        use crate::width::WidthSpec;
        let w = ModulusSpec::power(0.5).unwrap();
        let eta = WidthSpec::constant(1.0).unwrap();
        let grid = build_grid(&eta, &GridParams::new(100.0, 1.1, 4.0)).unwrap();
        let pm = compute_partition_modulus(&w, &eta, &grid, Pruning::On).unwrap();
        let psi = upper_concave_envelope(pm.values()).unwrap();
        let mut acc = psi.values()[0];
        for i in 0..psi.breakpoints().len() - 1 {
            acc += psi.segment_slope(i) * (psi.breakpoints()[i + 1] - psi.breakpoints()[i]);
        }
        let total = *psi.values().last().unwrap();
        assert!(
            (acc - total).abs() <= 1e-12 * total,
            "slope integral {acc} vs envelope value {total}"
        );
    }

    #[test]
    fn growth_check_flags_a_tripled_envelope() {
        use crate::partition_modulus::{build_grid, compute_partition_modulus, GridParams, Pruning};
        use crate::width::WidthSpec;
        let w = ModulusSpec::power(0.5).unwrap();
        let eta = WidthSpec::power_shift(0.4, 1.0).unwrap();
        let grid = build_grid(&eta, &GridParams::new(5e4, 1.1, 4.0)).unwrap();
        let pm = compute_partition_modulus(&w, &eta, &grid, Pruning::On).unwrap();
        let psi = upper_concave_envelope(pm.values()).unwrap();
        // the true envelope sits near half the bound, so it passes even with
        // no slack while the tripled one lands at 1.5x the bound
        let ts: Vec<f64> = (0..200).map(|i| 2.0 * 1.05f64.powi(i)).filter(|&t| t < 2e4).collect();
        let ok = check_envelope_growth(&psi, &w, &eta, &ts, |_| 0.0).unwrap();
        assert!(ok.pass, "true envelope must satisfy the growth inequality");
        let tripled = PiecewiseAffine::new(
            psi.breakpoints().to_vec(),
            psi.values().iter().map(|v| 3.0 * v).collect(),
        )
        .unwrap();
        let flagged = check_envelope_growth(&tripled, &w, &eta, &ts, |_| 0.0).unwrap();
        assert!(!flagged.pass, "triple-scaled envelope must violate the growth inequality");
    }

    #[test]
    fn hull_slopes_strictly_decreasing_after_merge() {
        let xs: Vec<f64> = (0..=10).map(|i| i as f64).collect();
        // collinear run then a kink
        let ys: Vec<f64> = xs.iter().map(|&x| if x <= 5.0 { x } else { 5.0 + 0.5 * (x - 5.0) }).collect();
        let e = upper_hull_points(&xs, &ys).unwrap();
        assert_eq!(e.breakpoints(), &[0.0, 5.0, 10.0]);
        for i in 1..e.breakpoints().len() - 1 {
            assert!(e.segment_slope(i) < e.segment_slope(i - 1));
        }
    }
}
