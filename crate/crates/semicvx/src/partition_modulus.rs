//! The partition modulus of a funnel.
//!
//! For a modulus `w` and width `eta`, the partition modulus at `h` is the
//! infimum over partitions `0 = x_0 < x_1 < ... < x_n = h` of
//!
//! ```text
//! sum_j  max(1, (x_j - x_{j-1}) / eta(x_j)) * w(x_j - x_{j-1})
//! ```
//!
//! This module computes it by dynamic programming with partition points
//! restricted to an adaptive grid. The grid-restricted value over-estimates
//! the true infimum; the analytic sandwich
//!
//! ```text
//! h w(eta(h)) / eta(h)  <=  true value  <=  max(1, h / eta(h)) w(h)
//! ```
//!
//! is certified at every node, and nested grid refinement can only lower the
//! computed values.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::modulus::{GridFunction, ModulusSpec};
use crate::report::VerificationReport;
use crate::width::WidthSpec;

pub const DEFAULT_NODE_CAP: usize = 200_000;

/// Parameters for the adaptive grid.
#[derive(Debug, Clone)]
pub struct GridParams {
    pub t_max: f64,
    /// Geometric growth ratio; successive steps past the first node satisfy
    /// `step <= (gamma - 1) * x`.
    pub gamma: f64,
    /// Width coupling; every step satisfies `step <= eta(right end) / rho`.
    pub rho: f64,
    pub cap: usize,
    /// Abscissae forced to be nodes (probe points, the construction base).
    pub anchors: Vec<f64>,
}

impl GridParams {
    pub fn new(t_max: f64, gamma: f64, rho: f64) -> Self {
        Self { t_max, gamma, rho, cap: DEFAULT_NODE_CAP, anchors: Vec::new() }
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn with_anchors(mut self, anchors: Vec<f64>) -> Self {
        self.anchors = anchors;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.t_max > 0.0 && self.t_max.is_finite()) {
            return Err(Error::Parameter(format!("t_max {} must be positive", self.t_max)));
        }
        if !(self.gamma > 1.0) {
            return Err(Error::Parameter(format!("gamma {} must be > 1", self.gamma)));
        }
        if !(self.rho >= 2.0) {
            return Err(Error::Parameter(format!("rho {} must be >= 2", self.rho)));
        }
        if self.cap < 2 {
            return Err(Error::Parameter("node cap too small".into()));
        }
        Ok(())
    }
}

/// Strictly increasing grid starting at 0 with geometric growth capped by
/// the local width.
#[derive(Debug, Clone, Serialize)]
pub struct AdaptiveGrid {
    nodes: Vec<f64>,
    gamma: f64,
    rho: f64,
}

impl AdaptiveGrid {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn t_max(&self) -> f64 {
        *self.nodes.last().unwrap()
    }

    /// Largest node index `i` with `nodes[i] <= x`.
    pub fn floor_index(&self, x: f64) -> Result<usize> {
        if !(x >= 0.0 && x <= self.t_max()) {
            return Err(Error::Range(format!("{x} outside grid span [0, {}]", self.t_max())));
        }
        Ok(match self.nodes.binary_search_by(|n| n.partial_cmp(&x).unwrap()) {
            Ok(i) => i,
            Err(i) => i - 1,
        })
    }

    /// Index of the node equal to `x` up to relative 1e-12; range error if
    /// `x` is not a node.
    pub fn node_index(&self, x: f64) -> Result<usize> {
        let i = self.floor_index(x)?;
        let tol = 1e-12 * (1.0 + x.abs());
        if (self.nodes[i] - x).abs() <= tol {
            return Ok(i);
        }
        if i + 1 < self.nodes.len() && (self.nodes[i + 1] - x).abs() <= tol {
            return Ok(i + 1);
        }
        Err(Error::Range(format!("{x} is not a grid node")))
    }

    /// New grid with the midpoint of every step inserted. The refined node
    /// set contains the original one, so partitions available to the DP can
    /// only grow.
    pub fn refine_midpoints(&self) -> AdaptiveGrid {
        let mut nodes = Vec::with_capacity(self.nodes.len() * 2 - 1);
        for w in self.nodes.windows(2) {
            nodes.push(w[0]);
            nodes.push(0.5 * (w[0] + w[1]));
        }
        nodes.push(*self.nodes.last().unwrap());
        AdaptiveGrid { nodes, gamma: self.gamma, rho: self.rho }
    }
}

/// Builds the adaptive grid for `eta` on `[0, t_max]`.
///
/// The first positive node is the fixed point of `x = eta(x) / rho`; past
/// it, steps grow geometrically with ratio `gamma` but never exceed
/// `eta(right end) / rho`.
pub fn build_grid(eta: &WidthSpec, params: &GridParams) -> Result<AdaptiveGrid> {
    params.validate()?;
    let t_max = params.t_max;

    let mut anchors: Vec<f64> = params
        .anchors
        .iter()
        .copied()
        .filter(|&a| a > 0.0 && a < t_max)
        .collect();
    anchors.sort_by(|a, b| a.partial_cmp(b).unwrap());
    anchors.dedup();

    // First node: iterate x <- eta(x)/rho downward to its fixed point.
    let mut x1 = (eta.eval(t_max)? / params.rho).min(t_max);
    for _ in 0..200 {
        let next = (eta.eval(x1)? / params.rho).min(t_max);
        if (next - x1).abs() <= 1e-12 * x1 {
            x1 = next;
            break;
        }
        x1 = next;
    }
    if !(x1 > t_max * 1e-12) {
        return Err(Error::Parameter(
            "width vanishes too fast at the origin for a positive first grid step".into(),
        ));
    }
    if let Some(&a) = anchors.first() {
        x1 = x1.min(a);
    }

    let mut nodes = vec![0.0, x1];
    let mut next_anchor = anchors.iter().position(|&a| a > x1).unwrap_or(anchors.len());
    loop {
        let x = *nodes.last().unwrap();
        if x >= t_max {
            break;
        }
        let geo = (params.gamma - 1.0) * x.max(x1);
        let width_cap = eta.eval(x.max(x1))? / params.rho;
        let mut next = x + geo.min(width_cap);
        if next_anchor < anchors.len() && next >= anchors[next_anchor] {
            next = anchors[next_anchor];
            next_anchor += 1;
        }
        if next >= t_max {
            next = t_max;
        }
        nodes.push(next);
        if nodes.len() > params.cap {
            return Err(Error::GridTooFine { nodes: nodes.len(), cap: params.cap });
        }
    }
    Ok(AdaptiveGrid { nodes, gamma: params.gamma, rho: params.rho })
}

/// Cost of one partition piece `(x_prev, x]`:
/// `max(1, (x - x_prev) / eta(x)) * w(x - x_prev)`.
pub fn segment_cost(x_prev: f64, x: f64, eta: &WidthSpec, w: &ModulusSpec) -> Result<f64> {
    if !(x > x_prev && x_prev >= 0.0) {
        return Err(Error::Domain(format!("segment [{x_prev}, {x}] not increasing from >= 0")));
    }
    let d = x - x_prev;
    Ok((d / eta.eval(x)?).max(1.0) * w.eval(d)?)
}

/// Whether the DP inner loop may stop scanning once a candidate's segment
/// cost alone already exceeds the best value found. Segment cost is
/// non-decreasing in the segment length, so the cutoff is exact; the switch
/// exists so oracle runs can compare against the unpruned scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pruning {
    On,
    Off,
}

/// Grid-restricted partition modulus with optimal-partition backpointers and
/// the analytic sandwich at every node.
#[derive(Debug, Clone)]
pub struct PartitionModulus {
    grid: AdaptiveGrid,
    omega: ModulusSpec,
    eta: WidthSpec,
    values: GridFunction,
    predecessors: Vec<usize>,
    lower: GridFunction,
    upper: GridFunction,
    eta_at_nodes: Vec<f64>,
}

/// A partition `0 = p_0 < ... < p_n = h` recovered from the DP backpointers.
#[derive(Debug, Clone, Serialize)]
pub struct Partition {
    pub points: Vec<f64>,
}

impl Partition {
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }
}

pub fn compute_partition_modulus(
    w: &ModulusSpec,
    eta: &WidthSpec,
    grid: &AdaptiveGrid,
    pruning: Pruning,
) -> Result<PartitionModulus> {
    let xs = grid.nodes();
    let n = xs.len();
    // the lower bound evaluates w at eta(t_max), which may exceed t_max
    let needed = grid.t_max().max(eta.eval(grid.t_max())?);
    if needed > w.max_argument() {
        return Err(Error::Range(format!(
            "modulus domain {} too short for grid span and width (need {})",
            w.max_argument(),
            needed
        )));
    }

    let mut eta_at = vec![f64::NAN; n];
    for k in 1..n {
        let e = eta.eval(xs[k])?;
        if !(e > 0.0) {
            return Err(Error::Parameter(format!("width not positive at {}", xs[k])));
        }
        eta_at[k] = e;
    }

    // Specialized evaluation of w for the hot loop; domain is (0, t_max],
    // validated above.
    let eval: Box<dyn Fn(f64) -> f64> = match w {
        ModulusSpec::Power { alpha } if *alpha == 0.5 => Box::new(|d: f64| d.sqrt()),
        ModulusSpec::Power { alpha } if *alpha == 1.0 => Box::new(|d: f64| d),
        ModulusSpec::Power { alpha } => {
            let a = *alpha;
            Box::new(move |d: f64| d.powf(a))
        }
        other => {
            let spec = other.clone();
            Box::new(move |d: f64| spec.eval(d).expect("validated domain"))
        }
    };

    let mut values = vec![0.0f64; n];
    let mut preds = vec![0usize; n];
    for k in 1..n {
        let xk = xs[k];
        let ek = eta_at[k];
        let mut best = f64::INFINITY;
        let mut arg = 0usize;
        for j in (0..k).rev() {
            let d = xk - xs[j];
            let cost = (d / ek).max(1.0) * eval(d);
            if cost >= best {
                if pruning == Pruning::On {
                    break;
                }
                continue;
            }
            let cand = values[j] + cost;
            if cand < best {
                best = cand;
                arg = j;
            }
        }
        values[k] = best;
        preds[k] = arg;
    }

    let mut lower = vec![0.0f64; n];
    let mut upper = vec![0.0f64; n];
    for k in 1..n {
        lower[k] = xs[k] * eval(eta_at[k]) / eta_at[k];
        upper[k] = (xs[k] / eta_at[k]).max(1.0) * eval(xs[k]);
        // the relative term absorbs fp accumulation over partitions whose
        // value sits exactly on a bound (e.g. the linear modulus)
        let tol = 1e-9 + 1e-11 * upper[k];
        if values[k] < lower[k] - tol || values[k] > upper[k] + tol {
            return Err(Error::Inconsistency(format!(
                "sandwich violated at h = {}: {} <= {} <= {} fails",
                xs[k], lower[k], values[k], upper[k]
            )));
        }
    }

    Ok(PartitionModulus {
        grid: grid.clone(),
        omega: w.clone(),
        eta: eta.clone(),
        values: GridFunction::new(xs.to_vec(), values)?,
        predecessors: preds,
        lower: GridFunction::new(xs.to_vec(), lower)?,
        upper: GridFunction::new(xs.to_vec(), upper)?,
        eta_at_nodes: eta_at,
    })
}

/// Reports from the three structural inequalities sampled on grid nodes.
#[derive(Debug, Clone, Serialize)]
pub struct StructuralReport {
    /// `v(x+h) <= v(x) + v(h)`.
    pub subadditivity: VerificationReport,
    /// `v(x+h) <= v(x) + max(1, h/eta(x+h)) w(h)` (append one piece).
    pub append_piece: VerificationReport,
    /// `v(x+h) <= v(x) + 2 h w(eta(x)) / eta(x)` for `h >= eta(x)/2`
    /// (append width-sized pieces).
    pub append_width_pieces: VerificationReport,
}

impl StructuralReport {
    pub fn pass(&self) -> bool {
        self.subadditivity.pass && self.append_piece.pass && self.append_width_pieces.pass
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    pub h: f64,
    pub ratio: f64,
}

/// Table of `w(h) / v(h)` over a log-spaced window.
#[derive(Debug, Clone, Serialize)]
pub struct RatioReport {
    pub rows: Vec<RatioRow>,
    pub first: f64,
    pub last: f64,
    pub end_over_start: f64,
    pub non_increasing: bool,
}

impl PartitionModulus {
    pub fn grid(&self) -> &AdaptiveGrid {
        &self.grid
    }

    pub fn omega(&self) -> &ModulusSpec {
        &self.omega
    }

    pub fn eta(&self) -> &WidthSpec {
        &self.eta
    }

    /// DP values as a grid function (node -> partition-modulus estimate).
    pub fn values(&self) -> &GridFunction {
        &self.values
    }

    pub fn lower_bound(&self) -> &GridFunction {
        &self.lower
    }

    pub fn upper_bound(&self) -> &GridFunction {
        &self.upper
    }

    pub fn value_at_node(&self, k: usize) -> f64 {
        self.values.ys()[k]
    }

    /// Interpolated DP value at `h` in the grid span.
    pub fn value(&self, h: f64) -> Result<f64> {
        self.values.eval(h)
    }

    /// Additive slack absorbing the discretization error at scale `t`:
    /// twice the cost of one grid step there.
    pub fn grid_slack(&self, t: f64) -> f64 {
        let xs = self.grid.nodes();
        let i = self
            .grid
            .floor_index(t.clamp(0.0, self.grid.t_max()))
            .expect("clamped")
            .min(xs.len() - 2)
            .max(1);
        let step = xs[i + 1] - xs[i];
        let eta_right = self.eta_at_nodes[i + 1];
        2.0 * (step / eta_right).max(1.0) * self.omega.eval(step).expect("in domain")
    }

    /// Optimal partition of `[0, h]` for a grid node `h`, recovered from the
    /// backpointers. Its summed segment cost reproduces the DP value; the
    /// forward summation order makes the reproduction exact.
    pub fn optimal_partition(&self, h: f64) -> Result<Partition> {
        let mut k = self.grid.node_index(h)?;
        let mut points = vec![self.grid.nodes()[k]];
        while k > 0 {
            k = self.predecessors[k];
            points.push(self.grid.nodes()[k]);
        }
        points.reverse();
        Ok(Partition { points })
    }

    pub fn partition_cost(&self, p: &Partition) -> Result<f64> {
        let mut acc = 0.0;
        for (a, b) in p.pieces() {
            acc += segment_cost(a, b, &self.eta, &self.omega)?;
        }
        Ok(acc)
    }

    /// Samples the structural inequalities on node pairs. Raw sample pairs
    /// are snapped to the nearest node below; the sum is snapped likewise.
    /// Each inequality carries the grid slack at the sum's scale.
    pub fn check_structural_inequalities(&self, pairs: &[(f64, f64)]) -> Result<StructuralReport> {
        let xs = self.grid.nodes();
        let vs = self.values.ys();
        let mut sub = VerificationReport::from_violations("subadditivity", 0.0);
        let mut est = VerificationReport::from_violations("append_piece", 0.0);
        let mut est2 = VerificationReport::from_violations("append_width_pieces", 0.0);
        for &(x_raw, h_raw) in pairs {
            let i = self.grid.floor_index(x_raw.clamp(0.0, self.grid.t_max()))?;
            let j = self.grid.floor_index(h_raw.clamp(0.0, self.grid.t_max()))?;
            if i == 0 || j == 0 {
                sub.skip();
                est.skip();
                est2.skip();
                continue;
            }
            let (x, h) = (xs[i], xs[j]);
            let sum = x + h;
            if sum > self.grid.t_max() {
                sub.skip();
                est.skip();
                est2.skip();
                continue;
            }
            let s = self.grid.floor_index(sum)?;
            let tau = self.grid_slack(sum);
            let v_s = vs[s];

            sub.record(v_s - vs[i] - vs[j] - tau, &[x, h]);

            let factor = (h / self.eta.eval(sum)?).max(1.0);
            est.record(v_s - vs[i] - factor * self.omega.eval(h)? - tau, &[x, h]);

            let eta_x = self.eta_at_nodes[i];
            if h >= eta_x / 2.0 {
                let rhs = 2.0 * h * self.omega.eval(eta_x)? / eta_x;
                est2.record(v_s - vs[i] - rhs - tau, &[x, h]);
            } else {
                est2.skip();
            }
        }
        Ok(StructuralReport {
            subadditivity: sub.finish(),
            append_piece: est.finish(),
            append_width_pieces: est2.finish(),
        })
    }

    /// Tabulates `w(h) / v(h)` at log-spaced points of the window.
    pub fn ratio_report(&self, window: (f64, f64), samples: usize) -> Result<RatioReport> {
        let (lo, hi) = window;
        if !(lo > 0.0 && lo < hi && hi <= self.grid.t_max()) {
            return Err(Error::Parameter(format!(
                "window [{lo}, {hi}] not inside (0, {}]",
                self.grid.t_max()
            )));
        }
        if samples < 2 {
            return Err(Error::Parameter("need at least 2 ratio samples".into()));
        }
        let step = (hi.ln() - lo.ln()) / (samples - 1) as f64;
        let mut rows = Vec::with_capacity(samples);
        let mut non_increasing = true;
        let mut prev = f64::INFINITY;
        for i in 0..samples {
            let h = (lo.ln() + step * i as f64).exp().min(self.grid.t_max());
            let v = self.value(h)?;
            if v <= 0.0 {
                return Err(Error::DegenerateModulus(format!(
                    "partition modulus vanished at h = {h}"
                )));
            }
            let ratio = self.omega.eval(h)? / v;
            if ratio > prev * (1.0 + 1e-9) {
                non_increasing = false;
            }
            prev = ratio;
            rows.push(RatioRow { h, ratio });
        }
        let first = rows.first().unwrap().ratio;
        let last = rows.last().unwrap().ratio;
        Ok(RatioReport { rows, first, last, end_over_start: last / first, non_increasing })
    }
}
