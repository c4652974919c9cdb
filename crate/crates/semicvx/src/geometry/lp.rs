//! Dense two-phase simplex for the tiny linear programs the geometry layer
//! needs (feasibility of preimages, half-width maximization, interior
//! points). Problems here have at most a few dozen rows and columns, so a
//! plain tableau with Bland's rule is plenty and keeps results
//! deterministic.

use crate::error::{Error, Result};

const EPS: f64 = 1e-9;
const MAX_ITERS: usize = 20_000;

/// Minimize `objective . x` over free `x` subject to
/// `a_ub x <= b_ub` and `a_eq x = b_eq`.
#[derive(Debug, Clone, Default)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub a_ub: Vec<Vec<f64>>,
    pub b_ub: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpSolution {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<f64>>, // m x (cols + 1), last entry rhs
    basis: Vec<usize>,
    cols: usize,
    art_start: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c];
        for v in self.rows[r].iter_mut() {
            *v /= piv;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let factor = row[c];
            if factor != 0.0 {
                for (v, p) in row.iter_mut().zip(&pivot_row) {
                    *v -= factor * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// One simplex phase with Bland's rule on the given reduced-cost row.
    /// Returns false on unboundedness.
    fn run(&mut self, cost: &mut Vec<f64>, allow_artificials: bool) -> Result<bool> {
        for _ in 0..MAX_ITERS {
            let limit = if allow_artificials { self.cols } else { self.art_start };
            let entering = (0..limit).find(|&j| cost[j] < -EPS);
            let Some(j) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][j];
                if a > EPS {
                    let ratio = self.rows[i][self.cols] / a;
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - EPS
                                || (ratio < lr + EPS && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            self.pivot(r, j);
            // update the reduced-cost row with the same pivot
            let factor = cost[j];
            if factor != 0.0 {
                let piv_row = &self.rows[r];
                for (k, c) in cost.iter_mut().enumerate() {
                    *c -= factor * piv_row[k];
                }
            }
        }
        Err(Error::Inconsistency("simplex iteration limit hit".into()))
    }
}

/// Reduced-cost row for the given variable costs under the current basis.
fn reduced_costs(t: &Tableau, var_cost: &[f64]) -> Vec<f64> {
    let mut cost = var_cost.to_vec();
    cost.push(0.0); // rhs slot accumulates -objective value
    for (i, &b) in t.basis.iter().enumerate() {
        let cb = var_cost[b];
        if cb != 0.0 {
            for (k, c) in cost.iter_mut().enumerate() {
                *c -= cb * t.rows[i][k];
            }
        }
    }
    cost
}

pub fn solve(p: &LpProblem) -> Result<LpSolution> {
    let n = p.objective.len();
    let m_ub = p.a_ub.len();
    let m_eq = p.a_eq.len();
    let m = m_ub + m_eq;
    for (rows, rhs, label) in [(&p.a_ub, &p.b_ub, "ub"), (&p.a_eq, &p.b_eq, "eq")] {
        if rows.len() != rhs.len() || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parameter(format!("inconsistent {label} block shape")));
        }
    }
    if m == 0 && p.objective.iter().any(|&c| c != 0.0) {
        return Ok(LpSolution::Unbounded);
    }

    // variables: x = u - v (2n), slacks (m_ub), artificials (m)
    let cols = 2 * n + m_ub + m;
    let art_start = 2 * n + m_ub;
    let mut rows = Vec::with_capacity(m);
    for (i, (a, &b)) in p.a_ub.iter().zip(&p.b_ub).chain(p.a_eq.iter().zip(&p.b_eq)).enumerate() {
        let scale = a.iter().fold(b.abs(), |acc, v| acc.max(v.abs())).max(1.0);
        let sign = if b < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; cols + 1];
        for (j, &v) in a.iter().enumerate() {
            row[j] = sign * v / scale;
            row[n + j] = -sign * v / scale;
        }
        if i < m_ub {
            row[2 * n + i] = sign / scale;
        }
        row[art_start + i] = 1.0;
        row[cols] = sign * b / scale;
        rows.push(row);
    }

    let mut t = Tableau { rows, basis: (art_start..art_start + m).collect(), cols, art_start };

    // Phase 1: drive the artificials to zero.
    let mut phase1_cost = vec![0.0; cols];
    for j in art_start..cols {
        phase1_cost[j] = 1.0;
    }
    let mut cost = reduced_costs(&t, &phase1_cost);
    if !t.run(&mut cost, true)? {
        return Err(Error::Inconsistency("phase-1 objective unbounded".into()));
    }
    let phase1_value = -cost[cols];
    if phase1_value > 1e-7 {
        return Ok(LpSolution::Infeasible);
    }
    // pivot remaining basic artificials out where possible
    for i in 0..m {
        if t.basis[i] >= art_start {
            if let Some(j) = (0..art_start).find(|&j| t.rows[i][j].abs() > EPS) {
                t.pivot(i, j);
            }
        }
    }

    // Phase 2: the real objective.
    let mut var_cost = vec![0.0; cols];
    for j in 0..n {
        var_cost[j] = p.objective[j];
        var_cost[n + j] = -p.objective[j];
    }
    let mut cost = reduced_costs(&t, &var_cost);
    if !t.run(&mut cost, false)? {
        return Ok(LpSolution::Unbounded);
    }

    let mut x = vec![0.0; n];
    for (i, &b) in t.basis.iter().enumerate() {
        let v = t.rows[i][cols];
        if b < n {
            x[b] += v;
        } else if b < 2 * n {
            x[b - n] -= v;
        }
    }
    let value = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution::Optimal { x, value })
}

/// Convenience: feasibility of `a_ub x <= b_ub`, `a_eq x = b_eq` with the
/// largest achievable uniform margin on the inequality block (capped at 1).
/// Returns the margin and a point attaining it, or None when infeasible.
pub fn feasibility_margin(
    a_ub: &[Vec<f64>],
    b_ub: &[f64],
    a_eq: &[Vec<f64>],
    b_eq: &[f64],
) -> Result<Option<(f64, Vec<f64>)>> {
    let n = a_ub
        .first()
        .map(|r| r.len())
        .or_else(|| a_eq.first().map(|r| r.len()))
        .unwrap_or(0);
    // variables (x, t): maximize t with a . x + t |a| <= b and t <= 1
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(a_ub.len() + 1);
    let mut rhs = Vec::with_capacity(a_ub.len() + 1);
    for (a, &b) in a_ub.iter().zip(b_ub) {
        let norm = a.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        let mut row = a.clone();
        row.push(norm);
        rows.push(row);
        rhs.push(b);
    }
    let mut cap = vec![0.0; n];
    cap.push(1.0);
    rows.push(cap);
    rhs.push(1.0);

    let eq_rows: Vec<Vec<f64>> = a_eq
        .iter()
        .map(|a| {
            let mut row = a.clone();
            row.push(0.0);
            row
        })
        .collect();

    let mut objective = vec![0.0; n];
    objective.push(-1.0);
    let p = LpProblem { objective, a_ub: rows, b_ub: rhs, a_eq: eq_rows, b_eq: b_eq.to_vec() };
    match solve(&p)? {
        LpSolution::Optimal { x, value } => {
            let margin = -value;
            let point = x[..n].to_vec();
            Ok(Some((margin, point)))
        }
        LpSolution::Infeasible => Ok(None),
        LpSolution::Unbounded => Err(Error::Inconsistency(
            "margin LP cannot be unbounded with the unit cap".into(),
        )),
    }
}
