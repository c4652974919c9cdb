//! Moduli of continuity.
//!
//! A modulus is a non-decreasing function `w: [0, inf) -> [0, inf)` with
//! `w(0) = 0`. This module provides the closed-form families used throughout
//! the crate (power, power-log, linear-over-log), sampled grid functions,
//! structural checkers (concavity, subadditivity), the concave majorant of a
//! subadditive modulus, and the numerical estimator of the scaling condition
//!
//! ```text
//! inf_n ( liminf_{h -> inf}  w(h) / (n w(h/n)) ) = 0
//! ```
//!
//! which decides whether the counterexample construction applies.

use serde::{Deserialize, Serialize};

use crate::envelope::upper_concave_envelope;
use crate::error::{Error, Result};
use crate::piecewise::PiecewiseAffine;

/// A non-negative sampled function on `[0, xs.last()]` with `f(0) = 0`,
/// linearly interpolated between nodes. Queries past the last node are range
/// errors rather than extrapolations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl GridFunction {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Parameter(format!(
                "grid length mismatch: {} abscissae vs {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.is_empty() || xs[0] != 0.0 {
            return Err(Error::Parameter("grid must start at x = 0".into()));
        }
        if ys[0] != 0.0 {
            return Err(Error::Parameter("grid value at 0 must be 0".into()));
        }
        for w in xs.windows(2) {
            if !(w[0] < w[1]) {
                return Err(Error::Parameter(format!(
                    "grid abscissae not strictly increasing at {} -> {}",
                    w[0], w[1]
                )));
            }
        }
        if xs.iter().any(|v| !v.is_finite()) || ys.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Parameter("grid values must be finite and non-negative".into()));
        }
        Ok(Self { xs, ys })
    }

    /// Sample `f` at the given abscissae (which must start at 0 where `f` is
    /// expected to vanish).
    pub fn sample(xs: Vec<f64>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let ys = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, ys)
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last_x(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("modulus argument {t} < 0")));
        }
        if t > self.last_x() {
            return Err(Error::Range(format!(
                "{} beyond last grid node {}",
                t,
                self.last_x()
            )));
        }
        let i = match self.xs.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => return Ok(self.ys[i]),
            Err(i) => i - 1,
        };
        let (x0, x1) = (self.xs[i], self.xs[i + 1]);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        Ok(y0 + (t - x0) * (y1 - y0) / (x1 - x0))
    }
}

/// A modulus of continuity, either closed-form or sampled.
///
/// The power-log and linear-over-log families follow their closed form only
/// above a knee `h0`; below it they are continued by the chord from the
/// origin to `(h0, value(h0))`, which keeps the function concave and zero at
/// zero. Constructors pick the smallest knee for which this works.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModulusSpec {
    /// `w(h) = h^alpha`, `alpha` in `(0, 1]`.
    Power { alpha: f64 },
    /// `w(h) = h^alpha ln(h)^beta + offset` for `h >= knee`, chord below.
    PowerLog { alpha: f64, beta: f64, offset: f64, knee: f64 },
    /// `w(h) = h / ln(h)^beta + offset` for `h >= knee`, chord below.
    LinearOverLog { beta: f64, offset: f64, knee: f64 },
    /// Linearly interpolated samples; evaluation past the last node errors.
    Sampled { grid: GridFunction },
}

impl ModulusSpec {
    pub fn power(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Parameter(format!("power exponent {alpha} outside (0, 1]")));
        }
        Ok(Self::Power { alpha })
    }

    /// Power-log modulus with automatically chosen knee.
    ///
    /// `ln(knee) = beta / (1 - alpha)` makes the closed form concave beyond
    /// the knee and its derivative there no larger than the chord slope, so
    /// the chord continuation needs no additive offset.
    pub fn power_log(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha < 1.0) {
            return Err(Error::Parameter(format!("power-log exponent {alpha} outside [0, 1)")));
        }
        if !(beta > 0.0) {
            return Err(Error::Parameter(format!("power-log exponent beta {beta} must be > 0")));
        }
        let knee = (beta / (1.0 - alpha)).exp();
        let spec = Self::PowerLog { alpha, beta, offset: 0.0, knee };
        spec.validate_log_family()?;
        Ok(spec)
    }

    pub fn power_log_with(alpha: f64, beta: f64, offset: f64, knee: f64) -> Result<Self> {
        if !(alpha >= 0.0 && alpha < 1.0) || !(beta > 0.0) || !(offset >= 0.0) || !(knee > 1.0) {
            return Err(Error::Parameter(
                "power-log requires alpha in [0,1), beta > 0, offset >= 0, knee > 1".into(),
            ));
        }
        let spec = Self::PowerLog { alpha, beta, offset, knee };
        spec.validate_log_family()?;
        Ok(spec)
    }

    /// Linear-over-log modulus with automatically chosen knee
    /// `ln(knee) = beta + 1`.
    pub fn linear_over_log(beta: f64) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(Error::Parameter(format!("exponent beta {beta} must be > 0")));
        }
        let knee = (beta + 1.0).exp();
        let spec = Self::LinearOverLog { beta, offset: 0.0, knee };
        spec.validate_log_family()?;
        Ok(spec)
    }

    pub fn linear_over_log_with(beta: f64, offset: f64, knee: f64) -> Result<Self> {
        if !(beta > 0.0) || !(offset >= 0.0) || !(knee > 1.0) {
            return Err(Error::Parameter(
                "linear-over-log requires beta > 0, offset >= 0, knee > 1".into(),
            ));
        }
        let spec = Self::LinearOverLog { beta, offset, knee };
        spec.validate_log_family()?;
        Ok(spec)
    }

    pub fn sampled(grid: GridFunction) -> Self {
        Self::Sampled { grid }
    }

    /// Closed-form value without the chord continuation. Only meaningful for
    /// the log families at `t >= knee`.
    fn raw_log_family(&self, t: f64) -> f64 {
        match *self {
            Self::PowerLog { alpha, beta, offset, .. } => {
                t.powf(alpha) * t.ln().powf(beta) + offset
            }
            Self::LinearOverLog { beta, offset, .. } => t / t.ln().powf(beta) + offset,
            _ => unreachable!(),
        }
    }

    fn raw_log_family_derivative(&self, t: f64) -> f64 {
        let u = t.ln();
        match *self {
            Self::PowerLog { alpha, beta, .. } => {
                t.powf(alpha - 1.0) * u.powf(beta - 1.0) * (alpha * u + beta)
            }
            Self::LinearOverLog { beta, .. } => (u - beta) / u.powf(beta + 1.0),
            _ => unreachable!(),
        }
    }

    /// Checks that the closed form is concave and non-decreasing beyond the
    /// knee and that the chord continuation does not break concavity at it.
    fn validate_log_family(&self) -> Result<()> {
        let knee = match *self {
            Self::PowerLog { knee, .. } | Self::LinearOverLog { knee, .. } => knee,
            _ => return Ok(()),
        };
        let u = knee.ln();
        let concave_beyond = match *self {
            Self::PowerLog { alpha, beta, .. } => {
                // Second derivative sign is that of
                // a(a-1) u^2 + b(2a-1) u + b(b-1), a downward parabola in u
                // (or linear for a = 0); non-positive from the knee on iff it
                // is non-positive at the knee and the knee is past its vertex.
                let p = alpha * (alpha - 1.0) * u * u
                    + beta * (2.0 * alpha - 1.0) * u
                    + beta * (beta - 1.0);
                let past_vertex = if alpha > 0.0 {
                    u >= beta * (2.0 * alpha - 1.0) / (2.0 * alpha * (1.0 - alpha))
                } else {
                    true
                };
                p <= 1e-12 * (1.0 + u * u) && past_vertex
            }
            Self::LinearOverLog { beta, .. } => u >= beta + 1.0 - 1e-12,
            _ => true,
        };
        if !concave_beyond {
            return Err(Error::Parameter(format!(
                "knee {knee} too small: closed form not concave beyond it"
            )));
        }
        let value = self.raw_log_family(knee);
        let chord_slope = value / knee;
        let deriv = self.raw_log_family_derivative(knee);
        if deriv > chord_slope * (1.0 + 1e-12) {
            return Err(Error::Parameter(format!(
                "knee {knee} too small: chord continuation would not be concave"
            )));
        }
        if deriv < 0.0 {
            return Err(Error::Parameter(format!(
                "knee {knee} in a decreasing region of the closed form"
            )));
        }
        Ok(())
    }

    /// Evaluate the modulus. Negative arguments are domain errors; sampled
    /// moduli additionally error past their last node.
    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("modulus argument {t} < 0")));
        }
        if t == 0.0 {
            return Ok(0.0);
        }
        match self {
            Self::Power { alpha } => Ok(t.powf(*alpha)),
            Self::PowerLog { knee, .. } | Self::LinearOverLog { knee, .. } => {
                if t >= *knee {
                    Ok(self.raw_log_family(t))
                } else {
                    Ok(t * self.raw_log_family(*knee) / *knee)
                }
            }
            Self::Sampled { grid } => grid.eval(t),
        }
    }

    /// Largest argument this modulus can be evaluated at.
    pub fn max_argument(&self) -> f64 {
        match self {
            Self::Sampled { grid } => grid.last_x(),
            _ => f64::INFINITY,
        }
    }
}

/// True iff successive chord slopes of `f` are non-increasing up to the
/// additive tolerance `tol`. Grids with fewer than 3 nodes are trivially
/// concave.
pub fn is_concave_on_grid(f: &GridFunction, tol: f64) -> bool {
    if f.len() < 3 {
        return true;
    }
    let xs = f.xs();
    let ys = f.ys();
    let mut prev = (ys[1] - ys[0]) / (xs[1] - xs[0]);
    for i in 1..xs.len() - 1 {
        let slope = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
        if slope > prev + tol {
            return false;
        }
        prev = slope;
    }
    true
}

/// Outcome of sampling `w(x+h) - w(x) - w(h)` over a pair set.
#[derive(Debug, Clone, Serialize)]
pub struct SubadditivityReport {
    pub samples: usize,
    pub max_violation: f64,
    pub worst_pair: (f64, f64),
}

impl SubadditivityReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_violation <= tol
    }
}

/// Samples the subadditivity defect of `w` over the given `(x, h)` pairs.
pub fn is_subadditive_sampled(w: &ModulusSpec, pairs: &[(f64, f64)]) -> Result<SubadditivityReport> {
    if pairs.is_empty() {
        return Err(Error::Parameter("no sample pairs".into()));
    }
    let mut max_violation = f64::NEG_INFINITY;
    let mut worst = pairs[0];
    for &(x, h) in pairs {
        if !(x > 0.0 && h > 0.0) {
            return Err(Error::Domain(format!("subadditivity pair ({x}, {h}) not positive")));
        }
        let v = w.eval(x + h)? - w.eval(x)? - w.eval(h)?;
        if v > max_violation {
            max_violation = v;
            worst = (x, h);
        }
    }
    Ok(SubadditivityReport { samples: pairs.len(), max_violation, worst_pair: worst })
}

/// Concave majorant of a subadditive sampled modulus.
///
/// Returns the upper concave envelope `phi` of `w` on its grid span and
/// checks the two-sided bound `w <= phi <= 2 w` at every node. A node where
/// `phi > 2 w` means the input was not genuinely subadditive at grid
/// resolution and is reported as such.
pub fn stechkin_concave_majorant(w: &GridFunction) -> Result<PiecewiseAffine> {
    let phi = upper_concave_envelope(w)?;
    let scale = w.ys().iter().copied().fold(0.0f64, f64::max).max(1.0);
    for (&x, &y) in w.xs().iter().zip(w.ys()) {
        let p = phi.eval(x)?;
        if p < y - 1e-12 * scale {
            return Err(Error::Inconsistency(format!(
                "envelope below input at {x}: {p} < {y}"
            )));
        }
        if p > 2.0 * y + 1e-12 * scale {
            return Err(Error::SubadditivityViolation(format!(
                "majorant {p} exceeds twice the value {y} at {x}"
            )));
        }
    }
    Ok(phi)
}

/// Verdict of the scaling-condition estimate on a finite window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionVerdict {
    /// The infimum estimate dropped below the configured threshold.
    Holds,
    /// Every per-n ratio stays above the threshold and is non-decreasing in
    /// `h` across the window, so the window gives no route to zero.
    FailsOnWindow,
    /// Neither of the above; a finite window cannot decide.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConditionStarReport {
    /// `(n, min over the window of w(h) / (n w(h/n)))` for each divisor count.
    pub per_n: Vec<(u32, f64)>,
    pub infimum_estimate: f64,
    pub verdict: ConditionVerdict,
}

/// Estimates the scaling condition by minimizing `w(h) / (n w(h/n))` over a
/// log-spaced window for each `n <= n_max`.
///
/// The liminf at infinity is approximated by the window minimum; the verdict
/// is three-valued because finite data cannot certify a limit.
pub fn condition_star_estimate(
    w: &ModulusSpec,
    n_max: u32,
    window: (f64, f64),
    samples: usize,
    eps_star: f64,
) -> Result<ConditionStarReport> {
    let (h_lo, h_hi) = window;
    if !(h_lo > 0.0 && h_lo < h_hi) {
        return Err(Error::Parameter(format!("bad window [{h_lo}, {h_hi}]")));
    }
    if n_max < 2 {
        return Err(Error::Parameter("n_max must be at least 2".into()));
    }
    if samples < 2 {
        return Err(Error::Parameter("need at least 2 window samples".into()));
    }
    if h_hi > w.max_argument() {
        return Err(Error::Range(format!(
            "window end {h_hi} beyond evaluable domain {}",
            w.max_argument()
        )));
    }
    let log_lo = h_lo.ln();
    let step = (h_hi.ln() - log_lo) / (samples - 1) as f64;
    let hs: Vec<f64> = (0..samples).map(|i| (log_lo + step * i as f64).exp()).collect();

    let mut per_n = Vec::with_capacity(n_max as usize);
    let mut infimum = f64::INFINITY;
    let mut all_trends_up = true;
    for n in 1..=n_max {
        let mut min_ratio = f64::INFINITY;
        let mut prev = f64::NEG_INFINITY;
        let mut trend_up = true;
        for &h in &hs {
            let denom = w.eval(h / n as f64)?;
            if denom == 0.0 {
                return Err(Error::DegenerateModulus(format!(
                    "w({}) = 0 while estimating the scaling condition",
                    h / n as f64
                )));
            }
            let r = w.eval(h)? / (n as f64 * denom);
            min_ratio = min_ratio.min(r);
            if r < prev * (1.0 - 1e-9) {
                trend_up = false;
            }
            prev = r;
        }
        per_n.push((n, min_ratio));
        infimum = infimum.min(min_ratio);
        all_trends_up &= trend_up;
    }

    let verdict = if infimum < eps_star {
        ConditionVerdict::Holds
    } else if all_trends_up {
        ConditionVerdict::FailsOnWindow
    } else {
        ConditionVerdict::Inconclusive
    };
    Ok(ConditionStarReport { per_n, infimum_estimate: infimum, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_eval_examples() {
        let w = ModulusSpec::power(0.5).unwrap();
        assert_eq!(w.eval(4.0).unwrap(), 2.0);
        assert_eq!(w.eval(0.0).unwrap(), 0.0);
        let id = ModulusSpec::power(1.0).unwrap();
        assert_eq!(id.eval(7.0).unwrap(), 7.0);
        assert!(w.eval(-1.0).is_err());
    }

    #[test]
    fn power_rejects_bad_exponent() {
        assert!(ModulusSpec::power(0.0).is_err());
        assert!(ModulusSpec::power(1.5).is_err());
    }

    #[test]
    fn log_families_are_concave_and_monotone_on_samples() {
        for w in [
            ModulusSpec::power_log(0.5, 1.0).unwrap(),
            ModulusSpec::power_log(0.0, 2.0).unwrap(),
            ModulusSpec::linear_over_log(1.0).unwrap(),
            ModulusSpec::linear_over_log(3.0).unwrap(),
        ] {
            let xs: Vec<f64> = (0..400).map(|i| i as f64 * 0.7).collect();
            let g = GridFunction::sample(xs, |x| w.eval(x).unwrap()).unwrap();
            assert!(is_concave_on_grid(&g, 1e-9), "{w:?} not concave on samples");
            assert!(g.ys().windows(2).all(|p| p[0] <= p[1] + 1e-12), "{w:?} not monotone");
        }
    }

    #[test]
    fn log_family_continuous_at_knee() {
        let w = ModulusSpec::power_log(0.5, 1.0).unwrap();
        let knee = match w {
            ModulusSpec::PowerLog { knee, .. } => knee,
            _ => unreachable!(),
        };
        let below = w.eval(knee * (1.0 - 1e-9)).unwrap();
        let at = w.eval(knee).unwrap();
        assert!((below - at).abs() < 1e-6 * at);
    }

    #[test]
    fn concavity_checker_examples() {
        let sqrt = GridFunction::sample(
            (0..9).map(|i| i as f64 * 0.5).collect(),
            |x| x.sqrt(),
        )
        .unwrap();
        assert!(is_concave_on_grid(&sqrt, 0.0));
        let bent = GridFunction::new(vec![0.0, 1.0, 2.0], vec![0.0, 1.0, 3.0]).unwrap();
        assert!(!is_concave_on_grid(&bent, 0.0));
        let two = GridFunction::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        assert!(is_concave_on_grid(&two, 0.0));
    }

    #[test]
    fn subadditivity_reports() {
        let w = ModulusSpec::power(0.5).unwrap();
        let mut pairs = Vec::new();
        for i in 1..=50 {
            for j in 1..=50 {
                pairs.push((0.2 * i as f64, 0.2 * j as f64));
            }
        }
        let rep = is_subadditive_sampled(&w, &pairs).unwrap();
        assert!(rep.max_violation <= 0.0, "concave modulus must be subadditive");

        let id = ModulusSpec::power(1.0).unwrap();
        let rep = is_subadditive_sampled(&id, &pairs).unwrap();
        assert!(rep.max_violation.abs() < 1e-12, "linear modulus is exactly additive");

        let sq = GridFunction::sample(
            (0..=40).map(|i| i as f64 * 0.1).collect(),
            |x| x * x,
        )
        .unwrap();
        let rep = is_subadditive_sampled(&ModulusSpec::sampled(sq), &[(1.0, 1.0)]).unwrap();
        assert!((rep.max_violation - 2.0).abs() < 1e-12);
        assert_eq!(rep.worst_pair, (1.0, 1.0));
    }

    #[test]
    fn majorant_of_concave_input_is_identity() {
        let sqrt = GridFunction::sample(
            (0..9).map(|i| i as f64 * 0.5).collect(),
            |x| x.sqrt(),
        )
        .unwrap();
        let phi = stechkin_concave_majorant(&sqrt).unwrap();
        for (&x, &y) in sqrt.xs().iter().zip(sqrt.ys()) {
            assert!((phi.eval(x).unwrap() - y).abs() < 1e-12);
        }
    }

    #[test]
    fn majorant_of_subadditive_staircase() {
        // min(h, 1) + min(max(h - 2, 0), 1): subadditive but far from concave
        let f = |h: f64| h.min(1.0) + (h - 2.0).max(0.0).min(1.0);
        let xs: Vec<f64> = (0..=60).map(|i| i as f64 * 0.1).collect();
        let g = GridFunction::sample(xs, f).unwrap();

        // confirm subadditivity on all node pairs first
        let mut pairs = Vec::new();
        for &x in g.xs().iter().skip(1) {
            for &h in g.xs().iter().skip(1) {
                if x + h <= g.last_x() {
                    pairs.push((x, h));
                }
            }
        }
        let sub = is_subadditive_sampled(&ModulusSpec::sampled(g.clone()), &pairs).unwrap();
        assert!(sub.max_violation <= 1e-12, "staircase not subadditive: {sub:?}");

        let phi = stechkin_concave_majorant(&g).unwrap();
        assert!(phi.is_concave(0.0));
        // brute-force hull oracle: best chord value over node pairs
        for (&x, &y) in g.xs().iter().zip(g.ys()) {
            let mut best = f64::NEG_INFINITY;
            for i in 0..g.len() {
                for j in i..g.len() {
                    let (xi, xj) = (g.xs()[i], g.xs()[j]);
                    if !(xi <= x && x <= xj) {
                        continue;
                    }
                    let v = if i == j {
                        g.ys()[i]
                    } else {
                        g.ys()[i] + (x - xi) * (g.ys()[j] - g.ys()[i]) / (xj - xi)
                    };
                    best = best.max(v);
                }
            }
            let p = phi.eval(x).unwrap();
            assert!((p - best).abs() < 1e-12, "hull vs oracle at {x}");
            assert!(y <= p + 1e-12 && p <= 2.0 * y + 1e-12, "sandwich at {x}: {y} {p}");
        }
    }

    #[test]
    fn majorant_rejects_convex_input() {
        let sq = GridFunction::sample(
            (0..=20).map(|i| i as f64 * 0.1).collect(),
            |x| x * x,
        )
        .unwrap();
        match stechkin_concave_majorant(&sq) {
            Err(Error::SubadditivityViolation(_)) => {}
            other => panic!("expected subadditivity violation, got {other:?}"),
        }
    }

    #[test]
    fn condition_star_power_matches_closed_form() {
        let w = ModulusSpec::power(0.5).unwrap();
        let rep = condition_star_estimate(&w, 16, (1e2, 1e6), 64, 0.05).unwrap();
        for &(n, est) in &rep.per_n {
            let expect = (n as f64).powf(-0.5);
            assert!(
                (est - expect).abs() < 1e-12,
                "n = {n}: {est} vs {expect}"
            );
        }
    }

    #[test]
    fn condition_star_verdicts() {
        let w = ModulusSpec::power(0.5).unwrap();
        let rep = condition_star_estimate(&w, 512, (1e3, 1e6), 48, 0.05).unwrap();
        assert_eq!(rep.verdict, ConditionVerdict::Holds);

        let id = ModulusSpec::power(1.0).unwrap();
        let rep = condition_star_estimate(&id, 64, (1e3, 1e6), 48, 0.05).unwrap();
        assert_eq!(rep.verdict, ConditionVerdict::FailsOnWindow);
        assert!(rep.per_n.iter().all(|&(_, e)| (e - 1.0).abs() < 1e-12));

        let lol = ModulusSpec::linear_over_log(1.0).unwrap();
        let rep = condition_star_estimate(&lol, 64, (1e3, 1e9), 48, 0.05).unwrap();
        assert_eq!(rep.verdict, ConditionVerdict::FailsOnWindow);
        assert!(rep.infimum_estimate > 0.05);
    }

    #[test]
    fn condition_star_degenerate_modulus() {
        let zero = GridFunction::new(vec![0.0, 1.0, 1e7], vec![0.0, 0.0, 0.0]).unwrap();
        let w = ModulusSpec::sampled(zero);
        match condition_star_estimate(&w, 4, (1e2, 1e6), 16, 0.05) {
            Err(Error::DegenerateModulus(_)) => {}
            other => panic!("expected degenerate modulus, got {other:?}"),
        }
    }

    #[test]
    fn sampled_modulus_range_error() {
        let g = GridFunction::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let w = ModulusSpec::sampled(g);
        assert!(w.eval(0.5).is_ok());
        assert!(w.eval(1.5).is_err());
    }

    #[test]
    fn eval_zero_is_zero_for_every_kind() {
        let grid = GridFunction::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        for w in [
            ModulusSpec::power(0.7).unwrap(),
            ModulusSpec::power_log(0.3, 2.0).unwrap(),
            ModulusSpec::linear_over_log(0.5).unwrap(),
            ModulusSpec::sampled(grid),
        ] {
            assert_eq!(w.eval(0.0).unwrap(), 0.0);
        }
    }
}
