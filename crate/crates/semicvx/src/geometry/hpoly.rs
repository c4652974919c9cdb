//! H-form polyhedra `{x : A x <= c}` (or strict `<` when open).

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::lp::{self, feasibility_margin};
use crate::geometry::MAX_DIM;

#[derive(Debug, Clone)]
pub struct HPolyhedron {
    a: DMatrix<f64>,
    c: DVector<f64>,
    open: bool,
}

impl HPolyhedron {
    pub fn new(a: DMatrix<f64>, c: DVector<f64>, open: bool) -> Result<Self> {
        let n = a.ncols();
        if n < 2 {
            return Err(Error::Parameter(format!("ambient dimension {n} must be >= 2")));
        }
        if n > MAX_DIM {
            return Err(Error::UnsupportedDimension { dim: n, max: MAX_DIM });
        }
        if a.nrows() != c.len() {
            return Err(Error::Parameter("constraint matrix and offsets disagree".into()));
        }
        if a.iter().any(|v| !v.is_finite()) || c.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("non-finite polyhedron data".into()));
        }
        Ok(Self { a, c, open })
    }

    pub fn from_rows(rows: &[Vec<f64>], offsets: &[f64], open: bool) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Parameter("polyhedron needs at least one row".into()));
        }
        let n = rows[0].len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Parameter("ragged constraint rows".into()));
        }
        let a = DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]);
        let c = DVector::from_column_slice(offsets);
        Self::new(a, c, open)
    }

    pub fn dim(&self) -> usize {
        self.a.ncols()
    }

    pub fn rows(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn c(&self) -> &DVector<f64> {
        &self.c
    }

    pub fn open(&self) -> bool {
        self.open
    }

    pub fn contains(&self, x: &DVector<f64>) -> bool {
        for i in 0..self.rows() {
            let lhs = self.a.row(i).transpose().dot(x);
            if self.open {
                if lhs >= self.c[i] {
                    return false;
                }
            } else if lhs > self.c[i] {
                return false;
            }
        }
        true
    }

    /// Membership with a uniform margin relative to each row's norm.
    pub fn contains_with_margin(&self, x: &DVector<f64>, margin: f64) -> bool {
        for i in 0..self.rows() {
            let norm = self.a.row(i).norm();
            if self.a.row(i).transpose().dot(x) + margin * norm > self.c[i] {
                return false;
            }
        }
        true
    }

    fn row_vecs(&self) -> Vec<Vec<f64>> {
        (0..self.rows()).map(|i| self.a.row(i).iter().copied().collect()).collect()
    }

    /// A point of maximal uniform margin (capped at 1), certifying nonempty
    /// interior.
    pub fn interior_point(&self) -> Result<(DVector<f64>, f64)> {
        let sol = feasibility_margin(&self.row_vecs(), self.c.as_slice(), &[], &[])?;
        match sol {
            Some((margin, x)) if margin > 1e-9 => Ok((DVector::from_vec(x), margin)),
            _ => Err(Error::Parameter("polyhedron has empty interior".into())),
        }
    }

    /// Feasibility of `{x in P : L x = target}` with interior margin.
    /// Returns an interior witness when one exists.
    pub fn preimage_point(
        &self,
        map: &DMatrix<f64>,
        target: &[f64],
    ) -> Result<Option<(DVector<f64>, f64)>> {
        let eq: Vec<Vec<f64>> = (0..map.nrows())
            .map(|i| map.row(i).iter().copied().collect())
            .collect();
        let sol = feasibility_margin(&self.row_vecs(), self.c.as_slice(), &eq, target)?;
        Ok(sol.filter(|(m, _)| *m > 1e-9).map(|(m, x)| (DVector::from_vec(x), m)))
    }

    /// Rewrites the polyhedron in coordinates `z = O x` for orthogonal `O`.
    pub fn in_rotated_coordinates(&self, o: &DMatrix<f64>) -> Result<HPolyhedron> {
        if o.nrows() != self.dim() || o.ncols() != self.dim() {
            return Err(Error::Parameter("rotation shape mismatch".into()));
        }
        HPolyhedron::new(&self.a * o.transpose(), self.c.clone(), self.open)
    }

    /// Fourier-Motzkin elimination of the last coordinate.
    fn eliminate_last(&self) -> Result<HPolyhedron> {
        let n = self.dim();
        let mut keep: Vec<(Vec<f64>, f64)> = Vec::new();
        let mut pos: Vec<(Vec<f64>, f64, f64)> = Vec::new();
        let mut neg: Vec<(Vec<f64>, f64, f64)> = Vec::new();
        for i in 0..self.rows() {
            let row: Vec<f64> = self.a.row(i).iter().copied().collect();
            let scale = row.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
            let last = row[n - 1];
            let head = row[..n - 1].to_vec();
            if last.abs() <= 1e-12 * scale {
                keep.push((head, self.c[i]));
            } else if last > 0.0 {
                pos.push((head, self.c[i], last));
            } else {
                neg.push((head, self.c[i], last));
            }
        }
        let mut rows = keep;
        for (hp, cp, lp_) in &pos {
            for (hn, cn, ln_) in &neg {
                // lp_ > 0, ln_ < 0: lp_ * row_n - ln_ * row_p drops the last var
                let mut combined = vec![0.0; n - 1];
                for j in 0..n - 1 {
                    combined[j] = lp_ * hn[j] - ln_ * hp[j];
                }
                let rhs = lp_ * cn - ln_ * cp;
                rows.push((combined, rhs));
            }
        }
        if rows.is_empty() {
            // projection is all of R^(n-1); keep a vacuous constraint so the
            // H-form stays well formed
            rows.push((vec![0.0; n - 1], 1.0));
        }
        let deduped = dedupe_rows(rows);
        let m = deduped.len();
        let a = DMatrix::from_fn(m, n - 1, |i, j| deduped[i].0[j]);
        let c = DVector::from_fn(m, |i, _| deduped[i].1);
        let mut out = HPolyhedron { a, c, open: self.open };
        if out.rows() > 24 {
            out = out.prune_redundant()?;
        }
        Ok(out)
    }

    /// Projects onto the first `keep` coordinates by repeated elimination.
    pub fn eliminate_to(&self, keep: usize) -> Result<HPolyhedron> {
        if keep < 2 || keep > self.dim() {
            return Err(Error::Parameter(format!("cannot eliminate down to {keep} coordinates")));
        }
        let mut cur = self.clone();
        while cur.dim() > keep {
            cur = cur.eliminate_last()?;
        }
        Ok(cur)
    }

    /// Drops rows implied by the others.
    fn prune_redundant(&self) -> Result<HPolyhedron> {
        let rows = self.row_vecs();
        let mut keep: Vec<usize> = Vec::new();
        for i in 0..rows.len() {
            let mut others_a: Vec<Vec<f64>> = Vec::new();
            let mut others_c: Vec<f64> = Vec::new();
            for (j, r) in rows.iter().enumerate() {
                if j != i && (keep.contains(&j) || j > i) {
                    others_a.push(r.clone());
                    others_c.push(self.c[j]);
                }
            }
            let p = lp::LpProblem {
                objective: rows[i].iter().map(|v| -v).collect(),
                a_ub: others_a,
                b_ub: others_c,
                ..Default::default()
            };
            let redundant = match lp::solve(&p)? {
                lp::LpSolution::Optimal { value, .. } => -value <= self.c[i] + 1e-9,
                _ => false,
            };
            if !redundant {
                keep.push(i);
            }
        }
        if keep.is_empty() {
            keep.push(0);
        }
        let a = DMatrix::from_fn(keep.len(), self.dim(), |i, j| self.a[(keep[i], j)]);
        let c = DVector::from_fn(keep.len(), |i, _| self.c[keep[i]]);
        HPolyhedron::new(a, c, self.open)
    }

    /// Deterministic interior samples spread around the certified interior
    /// point.
    pub fn sample_interior(&self, rng: &mut impl Rng, count: usize, spread: f64) -> Result<Vec<DVector<f64>>> {
        let (x0, margin) = self.interior_point()?;
        let n = self.dim();
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        while out.len() < count {
            attempts += 1;
            if attempts > 200 * count + 100 {
                return Err(Error::Inconsistency("interior sampling stalled".into()));
            }
            let dir = DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0));
            if dir.norm() < 1e-6 {
                continue;
            }
            let dir = dir.normalize();
            let step = crate::sample::log_uniform(rng, margin * 1e-2, spread.max(margin));
            let cand = &x0 + dir * step;
            if self.contains_with_margin(&cand, margin * 1e-3) {
                out.push(cand);
            }
        }
        Ok(out)
    }
}

fn dedupe_rows(rows: Vec<(Vec<f64>, f64)>) -> Vec<(Vec<f64>, f64)> {
    let mut out: Vec<(Vec<f64>, f64)> = Vec::new();
    for (head, rhs) in rows {
        let norm = head.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= 1e-12 {
            if rhs < 0.0 {
                // infeasible marker row; keep it verbatim
                out.push((head, rhs));
            }
            continue;
        }
        let nh: Vec<f64> = head.iter().map(|v| v / norm).collect();
        let nr = rhs / norm;
        let dup = out.iter().any(|(h, r)| {
            let hn = h.iter().map(|v| v * v).sum::<f64>().sqrt();
            if hn <= 1e-12 {
                return false;
            }
            h.iter()
                .zip(&nh)
                .map(|(a, b)| (a / hn - b).abs())
                .fold(0.0f64, f64::max)
                < 1e-9
                && (r / hn - nr).abs() < 1e-9
        });
        if !dup {
            out.push((nh, nr));
        }
    }
    out
}
