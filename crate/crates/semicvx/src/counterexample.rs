//! The explicit counterexample on a funnel domain.
//!
//! Given a concave positive modulus `w` and width `eta`, the construction
//! takes the concave envelope of the partition modulus, interpolates its
//! right slopes at doubling abscissae into a profile `delta`, integrates it
//! into a concave positive `g` with `g'(x) = delta(a + x) / b`, and studies
//!
//! ```text
//! f(x, y) = g(x) * y
//! ```
//!
//! on the funnel `{ x > 0, |y| < eta(x) }`. The function is semiconvex and
//! semiconcave with modulus `w` (constant 1), yet the growth of
//! `|g(x) - g(1)| / w(x - 1)` along the axis shows its gradient admits no
//! modulus `C w`.

use serde::Serialize;

use crate::envelope::EnvelopeResult;
use crate::error::{Error, Result};
use crate::modulus::{GridFunction, ModulusSpec};
use crate::partition_modulus::PartitionModulus;
use crate::piecewise::PiecewiseAffine;
use crate::report::VerificationReport;
use crate::width::WidthSpec;

/// The open funnel `{(x, y): 0 < x <= x_max, |y| < width(x)}`.
#[derive(Debug, Clone)]
pub struct FunnelDomain {
    pub width: WidthSpec,
    pub x_max: f64,
}

impl FunnelDomain {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        if !(x > 0.0 && x <= self.x_max) {
            return false;
        }
        match self.width.eval(x) {
            Ok(w) => y.abs() < w,
            Err(_) => false,
        }
    }
}

/// Everything needed to evaluate and audit the counterexample.
#[derive(Debug, Clone)]
pub struct CounterexampleBundle {
    omega: ModulusSpec,
    eta: WidthSpec,
    /// Base abscissa `a`: the smallest grid node past `a_min` where the
    /// envelope still climbs at `4a`.
    base: f64,
    /// `q = max(1, eta(a) / a)`.
    aspect: f64,
    /// Normalizer `b = 1280 q^2`.
    norm: f64,
    /// `delta`: envelope right slopes at `a, 2a, 4a, ...`, affine between,
    /// constant past the last doubling node.
    slope_profile: PiecewiseAffine,
    /// Exact integral of `delta` from `a` to each of its breakpoints.
    cumulative: Vec<f64>,
    envelope: PiecewiseAffine,
    modulus_values: GridFunction,
    x_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BundleSummary {
    pub omega: ModulusSpec,
    pub eta: WidthSpec,
    pub a: f64,
    pub q: f64,
    pub b: f64,
    pub delta_breakpoints: Vec<f64>,
    pub delta_values: Vec<f64>,
    pub x_max: f64,
}

impl CounterexampleBundle {
    /// Builds the bundle from a computed partition modulus and its envelope.
    ///
    /// `a` is chosen as the smallest grid node at or past `a_min` whose
    /// quadrupled abscissa still sees a positive envelope slope (threshold
    /// `eps_pos`, defaulting to 1e-12 of the largest slope). Keeping `a`
    /// small keeps the aspect `q` and normalizer `b` modest.
    pub fn build(
        pm: &PartitionModulus,
        env: &EnvelopeResult,
        a_min: f64,
        eps_pos: Option<f64>,
    ) -> Result<Self> {
        let psi = &env.envelope;
        let t_max = psi.last();
        let slope_scale = psi.segment_slope(0);
        let eps = eps_pos.unwrap_or(1e-12 * slope_scale.max(f64::MIN_POSITIVE));

        let base = pm
            .grid()
            .nodes()
            .iter()
            .copied()
            .find(|&x| x >= a_min && 4.0 * x < t_max)
            .ok_or(Error::FlatEnvelope { a_min })?;
        // Envelope slopes only decrease, so if the smallest candidate fails
        // every later one fails too.
        if psi.right_slope(4.0 * base)? < eps {
            return Err(Error::FlatEnvelope { a_min });
        }
        if base >= 1.0 + t_max / 4.0 {
            return Err(Error::Parameter(format!("base {base} leaves no room below t_max/4")));
        }

        let aspect = (pm.eta().eval(base)? / base).max(1.0);
        let norm = 1280.0 * aspect * aspect;

        let mut bps = Vec::new();
        let mut vals = Vec::new();
        let mut s = base;
        while s <= t_max * (1.0 + 1e-12) {
            let slope = if s < t_max { psi.right_slope(s)? } else { psi.left_slope(t_max)? };
            bps.push(s.min(t_max));
            vals.push(slope);
            s *= 2.0;
        }
        if *bps.last().unwrap() < t_max {
            bps.push(t_max);
            vals.push(*vals.last().unwrap());
        }
        let slope_profile = PiecewiseAffine::new(bps, vals)?;
        if !slope_profile.values().windows(2).all(|w| w[1] <= w[0]) {
            return Err(Error::Inconsistency("slope profile must be non-increasing".into()));
        }
        if slope_profile.min_value() < 0.0 {
            return Err(Error::Inconsistency("slope profile must be non-negative".into()));
        }

        let mut cumulative = vec![0.0f64; slope_profile.len()];
        for i in 1..slope_profile.len() {
            let (x0, x1) = (slope_profile.breakpoints()[i - 1], slope_profile.breakpoints()[i]);
            let (y0, y1) = (slope_profile.values()[i - 1], slope_profile.values()[i]);
            cumulative[i] = cumulative[i - 1] + 0.5 * (y0 + y1) * (x1 - x0);
        }

        Ok(Self {
            omega: pm.omega().clone(),
            eta: pm.eta().clone(),
            base,
            aspect,
            norm,
            slope_profile,
            cumulative,
            envelope: psi.clone(),
            modulus_values: pm.values().clone(),
            x_max: t_max - base,
        })
    }

    pub fn omega(&self) -> &ModulusSpec {
        &self.omega
    }

    pub fn eta(&self) -> &WidthSpec {
        &self.eta
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn aspect(&self) -> f64 {
        self.aspect
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn envelope(&self) -> &PiecewiseAffine {
        &self.envelope
    }

    pub fn slope_profile(&self) -> &PiecewiseAffine {
        &self.slope_profile
    }

    pub fn domain(&self) -> FunnelDomain {
        FunnelDomain { width: self.eta.clone(), x_max: self.x_max }
    }

    pub fn summary(&self) -> BundleSummary {
        BundleSummary {
            omega: self.omega.clone(),
            eta: self.eta.clone(),
            a: self.base,
            q: self.aspect,
            b: self.norm,
            delta_breakpoints: self.slope_profile.breakpoints().to_vec(),
            delta_values: self.slope_profile.values().to_vec(),
            x_max: self.x_max,
        }
    }

    fn check_x(&self, x: f64) -> Result<()> {
        if !(x > 0.0 && x <= self.x_max) {
            return Err(Error::Domain(format!("x = {x} outside (0, {}]", self.x_max)));
        }
        Ok(())
    }

    /// `g(x) = (1/b) * integral of delta over [a, a + x]`, exact piecewise
    /// quadratic (trapezoids of an affine integrand carry no quadrature
    /// error).
    pub fn profile(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        let s = self.base + x;
        let bps = self.slope_profile.breakpoints();
        let i = match bps.binary_search_by(|b| b.partial_cmp(&s).unwrap()) {
            Ok(i) => return Ok(self.cumulative[i] / self.norm),
            Err(i) => (i - 1).min(bps.len() - 2),
        };
        let y0 = self.slope_profile.values()[i];
        let ys = self.slope_profile.eval(s)?;
        Ok((self.cumulative[i] + 0.5 * (y0 + ys) * (s - bps[i])) / self.norm)
    }

    /// `g'(x) = delta(a + x) / b`, evaluated from the quadratic piece
    /// coefficients (a second arithmetic route to the same value).
    pub fn profile_slope(&self, x: f64) -> Result<f64> {
        self.check_x(x)?;
        let s = self.base + x;
        let bps = self.slope_profile.breakpoints();
        let i = match bps.binary_search_by(|b| b.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(bps.len() - 2),
            Err(i) => i - 1,
        };
        let m = self.slope_profile.segment_slope(i);
        Ok((self.slope_profile.values()[i] + m * (s - bps[i])) / self.norm)
    }

    /// `delta(a + x)`, via the piecewise-affine representation directly.
    pub fn slope_profile_at(&self, s: f64) -> Result<f64> {
        self.slope_profile.eval(s)
    }

    pub fn modulus_values(&self) -> &GridFunction {
        &self.modulus_values
    }
}

/// Reports for the three growth inequalities of the profile `g`.
#[derive(Debug, Clone, Serialize)]
pub struct GConditionReports {
    /// `g(x+h) - g(x) <= (8/b) max(1, h/eta(x+h)) w(h)`.
    pub increment: VerificationReport,
    /// `eta(x) g'(x) <= (8q/b) w(eta(x))`.
    pub slope_width: VerificationReport,
    /// `eta(x) (g'(x) - g'(x+h)) <= w(h) / 5`.
    pub slope_drop: VerificationReport,
}

impl GConditionReports {
    pub fn pass(&self) -> bool {
        self.increment.pass && self.slope_width.pass && self.slope_drop.pass
    }
}

/// Samples the three profile inequalities over `(x, h)` pairs. The profile
/// is built from the envelope of grid values, so each inequality carries the
/// grid slack `slack(t)` (in envelope units) scaled into its own units.
pub fn verify_g_conditions(
    bundle: &CounterexampleBundle,
    pairs: &[(f64, f64)],
    slack: impl Fn(f64) -> f64,
) -> Result<GConditionReports> {
    let a = bundle.base();
    let q = bundle.aspect();
    let b = bundle.norm();
    let w = bundle.omega().clone();
    let eta = bundle.eta().clone();
    let mut inc = VerificationReport::from_violations("profile_increment", 0.0);
    let mut sw = VerificationReport::from_violations("profile_slope_width", 0.0);
    let mut sd = VerificationReport::from_violations("profile_slope_drop", 0.0);
    for &(x, h) in pairs {
        if !(x > 0.0 && h > 0.0) || x + h > bundle.x_max() {
            inc.skip();
            sw.skip();
            sd.skip();
            continue;
        }
        let eta_sum = eta.eval(x + h)?;
        let lhs = bundle.profile(x + h)? - bundle.profile(x)?;
        let rhs = (8.0 / b) * (h / eta_sum).max(1.0) * w.eval(h)?;
        inc.record(lhs - rhs - (4.0 / b) * slack((a + x + h) / 2.0), &[x, h]);

        let eta_x = eta.eval(x)?;
        let lhs = eta_x * bundle.profile_slope(x)?;
        let rhs = (8.0 * q / b) * w.eval(eta_x)?;
        sw.record(lhs - rhs - (4.0 * q / b) * slack((a + x) / 2.0), &[x, h]);

        let lhs = eta_x * (bundle.profile_slope(x)? - bundle.profile_slope(x + h)?);
        let rhs = w.eval(h)? / 5.0;
        sd.record(lhs - rhs - (8.0 * q / b) * slack(a + x + h), &[x, h]);
    }
    Ok(GConditionReports { increment: inc.finish(), slope_width: sw.finish(), slope_drop: sd.finish() })
}

/// Checks the identity `g'(x) * b = delta(a + x)` through the two distinct
/// arithmetic routes, to relative 1e-15.
pub fn check_profile_slope_identity(
    bundle: &CounterexampleBundle,
    xs: &[f64],
) -> Result<VerificationReport> {
    let mut rep = VerificationReport::from_violations("profile_slope_identity", 0.0);
    for &x in xs {
        if !(x > 0.0 && x <= bundle.x_max()) {
            rep.skip();
            continue;
        }
        let lhs = bundle.profile_slope(x)? * bundle.norm();
        let rhs = bundle.slope_profile_at(bundle.base() + x)?;
        let scale = rhs.abs().max(f64::MIN_POSITIVE);
        rep.record((lhs - rhs).abs() - 1e-15 * scale, &[x, lhs, rhs]);
    }
    Ok(rep.finish())
}

/// A planar C^1 field on a funnel-shaped domain; the interface the sampled
/// verifiers work against.
pub trait PlanarField {
    fn contains(&self, x: f64, y: f64) -> bool;
    fn value(&self, x: f64, y: f64) -> Result<f64>;
    fn gradient(&self, x: f64, y: f64) -> Result<(f64, f64)>;
}

impl PlanarField for CounterexampleBundle {
    fn contains(&self, x: f64, y: f64) -> bool {
        self.domain().contains(x, y)
    }

    fn value(&self, x: f64, y: f64) -> Result<f64> {
        if !self.contains(x, y) {
            return Err(Error::Domain(format!("({x}, {y}) outside the funnel")));
        }
        Ok(self.profile(x)? * y)
    }

    fn gradient(&self, x: f64, y: f64) -> Result<(f64, f64)> {
        if !self.contains(x, y) {
            return Err(Error::Domain(format!("({x}, {y}) outside the funnel")));
        }
        Ok((self.profile_slope(x)? * y, self.profile(x)?))
    }
}

/// One sampled convex-combination instance.
#[derive(Debug, Clone, Copy)]
pub struct Triple {
    pub p: (f64, f64),
    pub q: (f64, f64),
    pub lambda: f64,
}

/// Checks the defining semiconvexity/semiconcavity inequality with
/// constant `c`:
///
/// ```text
/// |f(l p + (1-l) q) - l f(p) - (1-l) f(q)|  <=  c l (1-l) |p-q| w(|p-q|)
/// ```
///
/// over the sampled triples, with absolute tolerance `tol_scale` times the
/// local value scale. Both signs are taken, covering semiconvexity and
/// semiconcavity at once.
pub fn verify_semiconvexity(
    field: &dyn PlanarField,
    w: &ModulusSpec,
    triples: &[Triple],
    c: f64,
    tol_scale: f64,
) -> Result<VerificationReport> {
    let mut rep = VerificationReport::from_violations("semiconvexity", 0.0);
    for t in triples {
        let (px, py) = t.p;
        let (qx, qy) = t.q;
        let l = t.lambda;
        if !(0.0..=1.0).contains(&l) || !field.contains(px, py) || !field.contains(qx, qy) {
            return Err(Error::SamplerContract(format!(
                "triple p=({px},{py}) q=({qx},{qy}) lambda={l} outside the domain"
            )));
        }
        let (mx, my) = (l * px + (1.0 - l) * qx, l * py + (1.0 - l) * qy);
        if !field.contains(mx, my) {
            return Err(Error::SamplerContract(format!(
                "combination ({mx},{my}) left the (convex) domain"
            )));
        }
        let fp = field.value(px, py)?;
        let fq = field.value(qx, qy)?;
        let fm = field.value(mx, my)?;
        let d = ((px - qx).powi(2) + (py - qy).powi(2)).sqrt();
        let bound = c * l * (1.0 - l) * d * w.eval(d)?;
        let defect = fm - l * fp - (1.0 - l) * fq;
        let violation = (defect - bound).max(-defect - bound);
        let scale = fp.abs().max(fq.abs()).max(fm.abs()).max(1.0);
        rep.record(violation - tol_scale * scale, &[px, py, qx, qy, l]);
    }
    Ok(rep.finish())
}

/// Measures the empirical first-order Taylor constant
/// `max |f(z) - f(p) - grad f(p) . (z - p)| / (|z-p| w(|z-p|))` and checks it
/// is finite and stable: the constant over the full sample set must stay
/// within a factor 1.5 of the constant over the first half.
pub fn verify_taylor_bound(
    field: &dyn PlanarField,
    w: &ModulusSpec,
    pairs: &[((f64, f64), (f64, f64))],
) -> Result<VerificationReport> {
    let mut rep = VerificationReport::from_violations("taylor_bound", 0.0);
    let mut c_half = 0.0f64;
    let mut c_full = 0.0f64;
    let mut used = 0usize;
    for (i, &(p, z)) in pairs.iter().enumerate() {
        if !field.contains(p.0, p.1) || !field.contains(z.0, z.1) {
            return Err(Error::SamplerContract(format!("pair {p:?} -> {z:?} outside the domain")));
        }
        let h = (z.0 - p.0, z.1 - p.1);
        let hn = (h.0 * h.0 + h.1 * h.1).sqrt();
        if hn == 0.0 {
            rep.skip();
            continue;
        }
        let g = field.gradient(p.0, p.1)?;
        let remainder = (field.value(z.0, z.1)? - field.value(p.0, p.1)? - g.0 * h.0 - g.1 * h.1).abs();
        let ratio = remainder / (hn * w.eval(hn)?);
        c_full = c_full.max(ratio);
        if i < pairs.len() / 2 {
            c_half = c_half.max(ratio);
        }
        used += 1;
        rep.record(-1.0, &[p.0, p.1, z.0, z.1]);
    }
    let mut rep = rep;
    rep.empirical_constant(c_full);
    let stability = if c_half > 0.0 { c_full / c_half } else { 1.0 };
    let unstable = !(c_full.is_finite() && stability < 1.5) && used > 0;
    if unstable {
        rep.record(stability - 1.5, &[c_half, c_full]);
    }
    Ok(rep.finish())
}

/// A line trace with pre-sampled parameter pairs `t < t'` whose points stay
/// inside the domain.
#[derive(Debug, Clone)]
pub struct LinePairs {
    pub origin: (f64, f64),
    pub dir: (f64, f64),
    pub t_pairs: Vec<(f64, f64)>,
}

/// Measures the empirical modulus constant of the directional derivative
/// along sampled lines: `max |grad f(a+t'v).v - grad f(a+tv).v| / w(t'-t)`.
pub fn verify_line_modulus(
    field: &dyn PlanarField,
    w: &ModulusSpec,
    lines: &[LinePairs],
) -> Result<VerificationReport> {
    let mut rep = VerificationReport::from_violations("line_modulus", 0.0);
    let mut c_max = 0.0f64;
    for line in lines {
        let (ox, oy) = line.origin;
        let (vx, vy) = line.dir;
        let norm = (vx * vx + vy * vy).sqrt();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::SamplerContract(format!("direction ({vx}, {vy}) not unit")));
        }
        for &(t0, t1) in &line.t_pairs {
            if !(t1 > t0) {
                rep.skip();
                continue;
            }
            let p0 = (ox + t0 * vx, oy + t0 * vy);
            let p1 = (ox + t1 * vx, oy + t1 * vy);
            if !field.contains(p0.0, p0.1) || !field.contains(p1.0, p1.1) {
                return Err(Error::SamplerContract("line pair left the domain".into()));
            }
            let g0 = field.gradient(p0.0, p0.1)?;
            let g1 = field.gradient(p1.0, p1.1)?;
            let diff = ((g1.0 - g0.0) * vx + (g1.1 - g0.1) * vy).abs();
            let ratio = diff / w.eval(t1 - t0)?;
            c_max = c_max.max(ratio);
            rep.record(if ratio.is_finite() { -1.0 } else { 1.0 }, &[ox, oy, vx, vy, t0, t1]);
        }
    }
    let mut rep = rep;
    rep.empirical_constant(c_max);
    Ok(rep.finish())
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessRow {
    pub x: f64,
    /// `W(x) = |g(x) - g(1)| / w(x - 1)`.
    pub growth: f64,
    /// `(v(x) - envelope(2(a+1)) - slack) / (2 b w(x))`, the floor the
    /// construction guarantees for `W(x)`.
    pub lower_bound: f64,
}

/// Tabulated growth of the gradient-modulus witness along the axis. If the
/// scaling condition holds, `growth` is unbounded in `x`; a finite window
/// reports the growth ratio across it.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub rows: Vec<WitnessRow>,
    pub skipped: usize,
    pub lower_bound_ok: bool,
    /// `W(last probe) / W(first probe)`.
    pub growth_ratio: f64,
}

/// Evaluates the divergence witness at the given probes (entries at or below
/// 1, or outside the domain, are skipped).
pub fn divergence_witness(
    bundle: &CounterexampleBundle,
    probes: &[f64],
    slack: impl Fn(f64) -> f64,
) -> Result<WitnessReport> {
    let b = bundle.norm();
    let ref_x = 2.0 * (bundle.base() + 1.0);
    if ref_x > bundle.envelope().last() {
        return Err(Error::Parameter(format!(
            "envelope span too short for the witness reference at {ref_x}"
        )));
    }
    if bundle.x_max() <= 1.0 {
        return Err(Error::Parameter("domain too short: no probes past x = 1".into()));
    }
    let g1 = bundle.profile(1.0)?;
    let psi_ref = bundle.envelope().eval(ref_x)?;

    let mut rows = Vec::new();
    let mut skipped = 0usize;
    let mut ok = true;
    for &x in probes {
        if !(x > 1.0 && x <= bundle.x_max()) {
            skipped += 1;
            continue;
        }
        let growth = (bundle.profile(x)? - g1).abs() / bundle.omega().eval(x - 1.0)?;
        let lower = (bundle.modulus_values().eval(x)? - psi_ref - slack(x))
            / (2.0 * b * bundle.omega().eval(x)?);
        if growth < lower - 1e-12 * lower.abs().max(1.0) {
            ok = false;
        }
        rows.push(WitnessRow { x, growth, lower_bound: lower });
    }
    if rows.is_empty() {
        return Err(Error::Parameter("no usable witness probes".into()));
    }
    let growth_ratio = rows.last().unwrap().growth / rows.first().unwrap().growth;
    Ok(WitnessReport { rows, skipped, lower_bound_ok: ok, growth_ratio })
}

/// Samples the slope-profile sandwich
/// `envelope_slope(2x) <= delta(x) <= envelope_slope(x/2)` at the given
/// abscissae (valid for `x` between the base and half the envelope span).
pub fn check_slope_profile_sandwich(
    bundle: &CounterexampleBundle,
    xs: &[f64],
) -> Result<VerificationReport> {
    let psi = bundle.envelope();
    let scale = psi.segment_slope(0).max(f64::MIN_POSITIVE);
    let mut rep = VerificationReport::from_violations("slope_profile_sandwich", 0.0);
    for &x in xs {
        if !(x >= bundle.base() && 2.0 * x < psi.last()) {
            rep.skip();
            continue;
        }
        let d = bundle.slope_profile_at(x)?;
        let lo = psi.right_slope(2.0 * x)?;
        let hi = psi.right_slope(x / 2.0)?;
        let violation = (lo - d).max(d - hi);
        rep.record(violation - 1e-12 * scale, &[x, d, lo, hi]);
    }
    Ok(rep.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::EnvelopeResult;
    use crate::partition_modulus::{build_grid, compute_partition_modulus, GridParams, Pruning};

    fn standard_bundle(t_max: f64) -> CounterexampleBundle {
        let w = ModulusSpec::power(0.5).unwrap();
        let eta = WidthSpec::power_shift(0.4, 1.0).unwrap();
        let grid = build_grid(&eta, &GridParams::new(t_max, 1.1, 4.0).with_anchors(vec![1.0])).unwrap();
        let pm = compute_partition_modulus(&w, &eta, &grid, Pruning::On).unwrap();
        let env = EnvelopeResult::from_grid(pm.values()).unwrap();
        CounterexampleBundle::build(&pm, &env, 1.0, None).unwrap()
    }

    #[test]
    fn constants_follow_their_formulas() {
        let b = standard_bundle(2e4);
        assert_eq!(b.base(), 1.0);
        let q = (b.eta().eval(1.0).unwrap() / 1.0).max(1.0);
        assert_eq!(b.aspect(), q);
        assert_eq!(b.norm(), 1280.0 * q * q);
        // eta(1) = 2^0.4 so q ~ 1.3195 and b ~ 2228.61
        assert!((b.aspect() - 2.0f64.powf(0.4)).abs() < 1e-15);
        assert!((b.norm() - 2228.609).abs() < 1e-2);
    }

    #[test]
    fn profile_slope_matches_delta_exactly() {
        let b = standard_bundle(2e4);
        let mut state = 123456789u64;
        for _ in 0..1000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let u = (state >> 11) as f64 / (1u64 << 53) as f64;
            let x = (u * (b.x_max().ln() - (-3.0f64).exp().ln()) + (-3.0f64).exp().ln()).exp();
            let x = x.clamp(1e-3, b.x_max());
            let lhs = b.profile_slope(x).unwrap() * b.norm();
            let rhs = b.slope_profile_at(b.base() + x).unwrap();
            assert!(
                (lhs - rhs).abs() <= 1e-15 * rhs.abs().max(1e-300),
                "profile slope mismatch at {x}: {lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn profile_positive_concave_increasing() {
        let b = standard_bundle(2e4);
        let xs: Vec<f64> = (1..200).map(|i| b.x_max() * i as f64 / 200.0).collect();
        assert!(b.profile(xs[0]).unwrap() > 0.0);
        let mut prev_slope = f64::INFINITY;
        let mut prev_val = 0.0;
        for &x in &xs {
            let v = b.profile(x).unwrap();
            let s = b.profile_slope(x).unwrap();
            assert!(v >= prev_val, "profile must be non-decreasing");
            assert!(s <= prev_slope + 1e-15, "profile slope must be non-increasing");
            assert!(s >= 0.0);
            prev_val = v;
            prev_slope = s;
        }
    }

    #[test]
    fn profile_integral_reconstruction() {
        let b = standard_bundle(2e4);
        for &x in &[0.5, 3.0, 77.0, 1.9e4] {
            if x >= b.x_max() {
                continue;
            }
            let direct = b.profile(x).unwrap();
            let via_integral =
                b.slope_profile().integral(b.base(), b.base() + x).unwrap() / b.norm();
            assert!(
                (direct - via_integral).abs() <= 1e-14 * direct.abs().max(1e-300),
                "integral reconstruction at {x}"
            );
        }
    }

    #[test]
    fn field_is_odd_and_vanishes_on_axis() {
        let b = standard_bundle(2e4);
        let x = 10.0;
        let y = 0.5 * b.eta().eval(x).unwrap();
        assert_eq!(b.value(x, 0.0).unwrap(), 0.0);
        assert_eq!(b.value(x, y).unwrap(), -b.value(x, -y).unwrap());
        // d f / d y on the axis recovers the profile
        let (_, gy) = b.gradient(x, 0.0).unwrap();
        assert_eq!(gy, b.profile(x).unwrap());
        assert!(b.value(x, 2.0 * b.eta().eval(x).unwrap()).is_err());
    }

    #[test]
    fn slope_profile_sandwich_holds() {
        let b = standard_bundle(2e4);
        let xs: Vec<f64> = (0..1000)
            .map(|i| {
                let t = i as f64 / 999.0;
                b.base() * (1.0 - t) + (b.envelope().last() / 2.0) * t
            })
            .collect();
        let rep = check_slope_profile_sandwich(&b, &xs).unwrap();
        assert!(rep.pass, "sandwich violated: {rep:?}");
        assert!(rep.samples > 900);
    }

    #[test]
    fn g_conditions_hold_on_log_uniform_pairs() {
        let b = standard_bundle(2e4);
        let pairs = crate::sample::positive_pairs(99, 1e-3, 9e3, 2000);
        let rep = verify_g_conditions(&b, &pairs, |_| 0.0).unwrap();
        assert!(rep.pass(), "profile inequalities violated even without slack: {rep:#?}");
    }

    #[test]
    fn slope_drop_vanishes_for_small_h() {
        // g' is affine between doubling nodes, so the drop is linear in h
        let b = standard_bundle(2e4);
        let x = 7.0;
        let eta_x = b.eta().eval(x).unwrap();
        for h in [1e-6, 1e-9, 1e-12] {
            let drop = eta_x * (b.profile_slope(x).unwrap() - b.profile_slope(x + h).unwrap());
            assert!(drop >= 0.0, "profile slope must not increase");
            assert!(drop <= 1e-3 * h + 1e-18, "h={h}: {drop}");
        }
    }

    #[test]
    fn profile_slope_identity_check_passes() {
        let b = standard_bundle(2e4);
        let xs: Vec<f64> = (1..=1000).map(|i| b.x_max() * i as f64 / 1001.0).collect();
        let rep = check_profile_slope_identity(&b, &xs).unwrap();
        assert!(rep.pass, "{rep:?}");
    }

    #[test]
    fn semiconvexity_endpoints_have_zero_slack() {
        let b = standard_bundle(2e4);
        let p = (5.0, 0.3);
        let q = (50.0, -1.0);
        for lambda in [0.0, 1.0] {
            let rep = verify_semiconvexity(
                &b,
                &ModulusSpec::power(0.5).unwrap(),
                &[Triple { p, q, lambda }],
                1.0,
                0.0,
            )
            .unwrap();
            assert!(rep.max_violation <= 0.0, "endpoint lambda={lambda}: {rep:?}");
        }
    }

    /// A bilinear field on a widening funnel violates semiconvexity for any
    /// small constant; the verifier must flag it.
    struct BilinearOnWideningFunnel;

    impl PlanarField for BilinearOnWideningFunnel {
        fn contains(&self, x: f64, y: f64) -> bool {
            x > 0.0 && x <= 1e4 && y.abs() < 1.0 + x
        }
        fn value(&self, x: f64, y: f64) -> Result<f64> {
            Ok(x * y)
        }
        fn gradient(&self, x: f64, y: f64) -> Result<(f64, f64)> {
            let _ = (x, y);
            Ok((y, x))
        }
    }

    #[test]
    fn semiconvexity_fault_injection_is_flagged() {
        let field = BilinearOnWideningFunnel;
        let triple = Triple { p: (1.0, 0.5), q: (101.0, -49.5), lambda: 0.5 };
        let rep = verify_semiconvexity(&field, &ModulusSpec::power(0.5).unwrap(), &[triple], 1.0, 1e-9)
            .unwrap();
        assert!(!rep.pass);
        assert!(rep.max_violation > 100.0, "expected a gross violation, got {rep:?}");
    }

    #[test]
    fn sampler_contract_enforced() {
        let b = standard_bundle(2e4);
        let bad = Triple { p: (10.0, 1e9), q: (1.0, 0.0), lambda: 0.5 };
        match verify_semiconvexity(&b, &ModulusSpec::power(0.5).unwrap(), &[bad], 1.0, 1e-9) {
            Err(Error::SamplerContract(_)) => {}
            other => panic!("expected sampler contract error, got {other:?}"),
        }
    }

    /// `x^2 + y^2` on a bounded strip with the linear modulus: the Taylor
    /// remainder is exactly `|h|^2`, so the empirical constant is 1.
    struct Quadratic;

    impl PlanarField for Quadratic {
        fn contains(&self, x: f64, y: f64) -> bool {
            x > 0.0 && x <= 10.0 && y.abs() < 1.0
        }
        fn value(&self, x: f64, y: f64) -> Result<f64> {
            Ok(x * x + y * y)
        }
        fn gradient(&self, x: f64, y: f64) -> Result<(f64, f64)> {
            Ok((2.0 * x, 2.0 * y))
        }
    }

    #[test]
    fn taylor_constant_of_quadratic_is_one() {
        let mut pairs = Vec::new();
        let mut state = 42u64;
        let mut rand = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..2000 {
            let p = (0.5 + 9.0 * rand(), -0.9 + 1.8 * rand());
            let z = (0.5 + 9.0 * rand(), -0.9 + 1.8 * rand());
            pairs.push((p, z));
        }
        let rep = verify_taylor_bound(&Quadratic, &ModulusSpec::power(1.0).unwrap(), &pairs).unwrap();
        assert!(rep.pass);
        let c3 = rep.empirical_constant.unwrap();
        assert!((c3 - 1.0).abs() < 1e-9, "empirical constant {c3}");
    }

    #[test]
    fn taylor_remainder_vanishes_along_vertical_moves() {
        let b = standard_bundle(2e4);
        let x = 20.0;
        let w = b.eta().eval(x).unwrap();
        let pairs = vec![((x, -0.5 * w), (x, 0.5 * w))];
        let rep = verify_taylor_bound(&b, &ModulusSpec::power(0.5).unwrap(), &pairs).unwrap();
        // f is affine in y at fixed x, so the remainder is exactly 0
        assert_eq!(rep.empirical_constant.unwrap(), 0.0);
    }

    #[test]
    fn line_modulus_trivial_directions() {
        let b = standard_bundle(2e4);
        let w = ModulusSpec::power(0.5).unwrap();
        // vertical line: derivative along it is the profile, constant in t
        let x = 30.0;
        let half = b.eta().eval(x).unwrap() * 0.9;
        let vertical = LinePairs {
            origin: (x, 0.0),
            dir: (0.0, 1.0),
            t_pairs: vec![(-half, half * 0.5), (0.0, half)],
        };
        // axis line: the y-partial is g but the direction picks the x-partial,
        // which vanishes on the axis
        let axis = LinePairs {
            origin: (1.0, 0.0),
            dir: (1.0, 0.0),
            t_pairs: vec![(1.0, 100.0), (5.0, 5000.0)],
        };
        let rep = verify_line_modulus(&b, &w, &[vertical]).unwrap();
        assert!(rep.empirical_constant.unwrap() < 1e-12);
        let rep = verify_line_modulus(&b, &w, &[axis]).unwrap();
        assert!(rep.empirical_constant.unwrap() < 1e-12);
    }

    #[test]
    fn witness_grows_for_root_modulus() {
        let b = standard_bundle(2e4);
        let probes: Vec<f64> = (0..13).map(|i| 10f64.powf(i as f64 / 3.0)).collect();
        let rep = divergence_witness(&b, &probes, |_| 0.0).unwrap();
        assert!(rep.lower_bound_ok, "witness floor violated: {rep:?}");
        // W ~ x^0.3, so over three decades the ratio is near 10^0.9 ~ 7.9
        assert!(rep.growth_ratio > 3.0, "growth ratio {}", rep.growth_ratio);
        assert_eq!(rep.skipped, 1, "probe at x = 1 must be skipped");
    }

    #[test]
    fn witness_flat_for_linear_modulus() {
        let w = ModulusSpec::power(1.0).unwrap();
        let eta = WidthSpec::power_shift(0.4, 1.0).unwrap();
        let grid = build_grid(&eta, &GridParams::new(2e4, 1.1, 4.0).with_anchors(vec![1.0])).unwrap();
        let pm = compute_partition_modulus(&w, &eta, &grid, Pruning::On).unwrap();
        let env = EnvelopeResult::from_grid(pm.values()).unwrap();
        let b = CounterexampleBundle::build(&pm, &env, 1.0, None).unwrap();
        let probes: Vec<f64> = (1..=4).map(|i| 10f64.powi(i)).collect();
        let rep = divergence_witness(&b, &probes, |_| 0.0).unwrap();
        assert!(rep.lower_bound_ok);
        assert!(
            rep.growth_ratio < 1.5,
            "linear modulus should keep the witness bounded, got {}",
            rep.growth_ratio
        );
    }

    #[test]
    fn flat_envelope_reported() {
        // a huge constant width with a flat sampled modulus makes the
        // partition modulus constant past its first step, so the envelope
        // has no positive slope at any admissible base point
        let xs: Vec<f64> = (0..=1000).map(|i| i as f64 * 0.1).collect();
        let flat = GridFunction::sample(xs, |x| if x > 0.0 { 1.0 } else { 0.0 }).unwrap();
        let w = ModulusSpec::sampled(flat);
        let eta = WidthSpec::constant(100.0).unwrap();
        let grid = build_grid(&eta, &GridParams::new(9.0, 1.2, 4.0).with_anchors(vec![1.0])).unwrap();
        let pm = compute_partition_modulus(&w, &eta, &grid, Pruning::On).unwrap();
        let env = EnvelopeResult::from_grid(pm.values()).unwrap();
        match CounterexampleBundle::build(&pm, &env, 1.0, Some(1e-6)) {
            Err(Error::FlatEnvelope { .. }) => {}
            other => panic!("expected flat envelope, got {other:?}"),
        }
    }
}
