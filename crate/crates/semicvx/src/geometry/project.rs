//! Construction of the planar projection carrying the recession ray to the
//! positive x-direction.
//!
//! When the recession cone spans strictly between 1 and n-1 dimensions, a
//! chain of corank-one orthonormal maps reduces to the plane. Each step's
//! kernel meets the cone only inside its lineality space, which is what
//! keeps the image of the recession cone equal to the recession cone of the
//! image. The composite has orthonormal rows, hence operator norm 1.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::cone::PolyCone;
use crate::geometry::hpoly::HPolyhedron;
use crate::geometry::lp::{self, LpProblem};

const TOL: f64 = 1e-9;

/// A surjective linear map to the plane with orthonormal rows.
#[derive(Debug, Clone)]
pub struct LinearMap {
    m: DMatrix<f64>, // 2 x n
}

impl LinearMap {
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != 2 {
            return Err(Error::Parameter("projection must map to the plane".into()));
        }
        let gram = &m * m.transpose();
        let defect = (gram - DMatrix::identity(2, 2)).norm();
        if defect > 1e-7 {
            return Err(Error::Parameter(format!("rows not orthonormal (defect {defect:.2e})")));
        }
        Ok(Self { m })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.ncols()
    }

    pub fn apply(&self, x: &DVector<f64>) -> [f64; 2] {
        let z = &self.m * x;
        [z[0], z[1]]
    }

    /// Pullback of a planar vector: `Lᵀ v`.
    pub fn transpose_apply(&self, v: [f64; 2]) -> DVector<f64> {
        self.m.transpose() * DVector::from_vec(vec![v[0], v[1]])
    }

    pub fn operator_norm(&self) -> f64 {
        self.m.clone().svd(false, false).singular_values.max()
    }

    /// Orthonormal completion: an orthogonal n x n matrix whose first two
    /// rows are this map.
    pub fn completion(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut rows: Vec<DVector<f64>> = vec![self.m.row(0).transpose(), self.m.row(1).transpose()];
        extend_orthonormal(&mut rows, n);
        DMatrix::from_fn(n, n, |i, j| rows[i][j])
    }

    /// Orthonormal basis of the kernel (columns).
    pub fn kernel_basis(&self) -> Vec<DVector<f64>> {
        let o = self.completion();
        (2..self.dim()).map(|i| o.row(i).transpose()).collect()
    }
}

/// Extends a partial orthonormal set to a full basis of R^n.
fn extend_orthonormal(rows: &mut Vec<DVector<f64>>, n: usize) {
    let mut i = 0;
    while rows.len() < n {
        assert!(i < n, "failed to complete an orthonormal basis");
        let mut cand = DVector::from_fn(n, |j, _| if j == i { 1.0 } else { 0.0 });
        for r in rows.iter() {
            let d = r.dot(&cand);
            cand -= r * d;
        }
        let norm = cand.norm();
        if norm > 1e-6 {
            rows.push(cand / norm);
        }
        i += 1;
    }
}

/// Orthonormal rows spanning the complement of `w` in R^n.
fn complement_rows(w: &DVector<f64>) -> DMatrix<f64> {
    let n = w.len();
    let mut rows = vec![w.normalize()];
    extend_orthonormal(&mut rows, n);
    DMatrix::from_fn(n - 1, n, |i, j| rows[i + 1][j])
}

/// Orthonormal basis (columns) of the span of the given vectors.
fn span_basis(vectors: &[DVector<f64>], n: usize) -> Vec<DVector<f64>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let m = DMatrix::from_fn(n, vectors.len(), |i, j| vectors[j][i]);
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested");
    let s_max = svd.singular_values.iter().copied().fold(0.0f64, f64::max);
    let rank = svd
        .singular_values
        .iter()
        .filter(|&&s| s > TOL * s_max.max(1.0))
        .count();
    (0..rank).map(|i| u.column(i).into_owned()).collect()
}

/// Unit vector orthogonal to all of `vectors` (requires their span to be a
/// proper subspace).
fn orthogonal_direction(vectors: &[DVector<f64>], n: usize) -> Result<DVector<f64>> {
    let basis = span_basis(vectors, n);
    if basis.len() >= n {
        return Err(Error::Inconsistency("no orthogonal direction exists".into()));
    }
    let mut rows = basis;
    extend_orthonormal(&mut rows, n);
    Ok(rows.last().unwrap().clone())
}

/// Conic-hull membership: is `w` a non-negative combination of `gens`?
fn in_conic_hull(gens: &[DVector<f64>], w: &DVector<f64>) -> Result<bool> {
    if gens.is_empty() {
        return Ok(w.norm() <= TOL);
    }
    let n = w.len();
    let k = gens.len();
    // lambda >= 0 with sum_i lambda_i g_i = w
    let a_ub: Vec<Vec<f64>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { -1.0 } else { 0.0 }).collect())
        .collect();
    let a_eq: Vec<Vec<f64>> = (0..n).map(|r| gens.iter().map(|g| g[r]).collect()).collect();
    let p = LpProblem {
        objective: vec![0.0; k],
        a_ub,
        b_ub: vec![0.0; k],
        a_eq,
        b_eq: w.iter().copied().collect(),
    };
    Ok(matches!(lp::solve(&p)?, lp::LpSolution::Optimal { .. }))
}

/// Builds the projection. Requires `1 <= span(rec) < n`.
pub fn build_projection(p: &HPolyhedron, cone: &PolyCone) -> Result<LinearMap> {
    let n = p.dim();
    let k0 = cone.span_dim();
    if k0 == 0 {
        return Err(Error::ReductionNotApplicable(
            "polyhedron is bounded (trivial recession cone)".into(),
        ));
    }
    if k0 >= n {
        return Err(Error::ReductionNotApplicable(
            "recession cone spans the ambient space (contains a full-dimensional cone)".into(),
        ));
    }

    let mut gens: Vec<DVector<f64>> = cone.generators().to_vec();
    let mut lin: Vec<DVector<f64>> = cone.lineality().to_vec();
    let mut acc = DMatrix::identity(n, n);
    let mut nc = n;

    while nc > 2 {
        let all: Vec<DVector<f64>> = gens.iter().chain(lin.iter()).cloned().collect();
        let k = span_basis(&all, nc).len();
        let m = span_basis(&lin, nc).len();
        debug_assert!(k >= 1 && k < nc);

        let w = if k < nc - 1 {
            orthogonal_direction(&all, nc)?
        } else if m == 0 {
            // pick a direction inside the plane of two cone-span basis
            // vectors that meets the cone only at the origin
            let basis = span_basis(&all, nc);
            let (b1, b2) = (&basis[0], &basis[1]);
            let mut found = None;
            for step in 0..64 {
                let theta = std::f64::consts::PI * step as f64 / 64.0;
                let cand = b1 * theta.cos() + b2 * theta.sin();
                let neg = -&cand;
                if !in_conic_hull(&gens, &cand)? && !in_conic_hull(&gens, &neg)? {
                    found = Some(cand);
                    break;
                }
            }
            found.ok_or_else(|| {
                Error::Inconsistency("no cone-avoiding direction found in the span plane".into())
            })?
        } else {
            lin[0].clone()
        };

        let l1 = complement_rows(&w);
        gens = gens
            .iter()
            .map(|g| &l1 * g)
            .filter(|g| g.norm() > TOL)
            .map(|g| g.normalize())
            .collect();
        let mapped_lin: Vec<DVector<f64>> = lin.iter().map(|l| &l1 * l).collect();
        lin = span_basis(&mapped_lin, nc - 1);
        acc = &l1 * acc;
        nc -= 1;
    }

    // the plane: the remaining cone spans one line
    let all: Vec<DVector<f64>> = gens.iter().chain(lin.iter()).cloned().collect();
    let span = span_basis(&all, 2);
    if span.len() != 1 {
        return Err(Error::Inconsistency(format!(
            "cone span in the plane has dimension {} (expected 1)",
            span.len()
        )));
    }
    let u = if let Some(g) = gens.first() {
        g.normalize()
    } else {
        span[0].clone()
    };
    let rot = DMatrix::from_row_slice(2, 2, &[u[0], u[1], -u[1], u[0]]);
    LinearMap::new(rot * acc)
}

/// Outcome of the sampled projection verification.
#[derive(Debug, Clone, Serialize)]
pub struct ProjectionReport {
    pub generators_aligned: bool,
    pub lineality_aligned: bool,
    pub has_positive_direction: bool,
    /// Lineality maps onto the x-line with a nonzero component, i.e. both
    /// `(1,0)` and `(-1,0)` lie in the image cone.
    pub image_contains_minus_ray: bool,
    pub direct_ray_failures: usize,
    pub image_ray_failures: usize,
    pub point_samples: usize,
    pub lambdas: Vec<f64>,
    pub pass: bool,
}

/// Verifies the projection on samples:
/// - every recession generator maps to a non-negative multiple of `(1, 0)`
///   and some direction maps to a positive one;
/// - `p + lambda r` stays in `P` for sampled interior points and generators;
/// - `L p + lambda (1, 0)` stays in `L(P)`, via preimage feasibility.
///
/// Fails with `ProjectionInvalid`; on success the report is embedded in the
/// reduction output.
pub fn verify_projection(
    p: &HPolyhedron,
    cone: &PolyCone,
    map: &LinearMap,
    seed: u64,
    point_samples: usize,
    lambdas: &[f64],
) -> Result<ProjectionReport> {
    let mut generators_aligned = true;
    let mut has_positive = false;
    for g in cone.generators() {
        let z = map.apply(&g.clone());
        if z[1].abs() > TOL || z[0] < -TOL {
            generators_aligned = false;
        }
        if z[0] > TOL {
            has_positive = true;
        }
    }
    let mut lineality_aligned = true;
    let mut minus_ray = false;
    for l in cone.lineality() {
        let z = map.apply(&l.clone());
        if z[1].abs() > TOL {
            lineality_aligned = false;
        }
        if z[0].abs() > TOL {
            has_positive = true;
            minus_ray = true;
        }
    }

    let mut rng = crate::sample::rng(seed);
    let points = p.sample_interior(&mut rng, point_samples, 10.0)?;
    let mut direct_fail = 0usize;
    let mut image_fail = 0usize;
    let dirs: Vec<DVector<f64>> = cone
        .generators()
        .iter()
        .cloned()
        .chain(cone.lineality().iter().cloned())
        .chain(cone.lineality().iter().map(|l| -l))
        .collect();
    for pt in &points {
        for dir in &dirs {
            for &lam in lambdas {
                if !p.contains(&(pt + dir * lam)) {
                    direct_fail += 1;
                }
            }
        }
        let z = map.apply(pt);
        for &lam in lambdas {
            let target = [z[0] + lam, z[1]];
            if p.preimage_point(map.matrix(), &target)?.is_none() {
                image_fail += 1;
            }
        }
    }

    let pass = generators_aligned
        && lineality_aligned
        && has_positive
        && direct_fail == 0
        && image_fail == 0;
    let report = ProjectionReport {
        generators_aligned,
        lineality_aligned,
        has_positive_direction: has_positive,
        image_contains_minus_ray: minus_ray,
        direct_ray_failures: direct_fail,
        image_ray_failures: image_fail,
        point_samples: points.len(),
        lambdas: lambdas.to_vec(),
        pass,
    };
    if !pass {
        return Err(Error::ProjectionInvalid(format!(
            "aligned={generators_aligned}/{lineality_aligned} positive={has_positive} \
             direct_failures={direct_fail} image_failures={image_fail}"
        )));
    }
    Ok(report)
}
