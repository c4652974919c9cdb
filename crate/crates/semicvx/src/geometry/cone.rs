//! Recession cones of H-polyhedra and their ray description.
//!
//! For `P = {x : A x <= c}` (open or closed) the recession cone is
//! `{d : A d <= 0}`. The lineality space is the null space of `A`; the
//! pointed quotient cone is converted to extreme rays by incremental double
//! description with a rank-based extremity filter.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::hpoly::HPolyhedron;

const TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct PolyCone {
    /// H-form: directions `d` with `constraints * d <= 0`.
    constraints: DMatrix<f64>,
    /// Extreme rays of the pointed part, unit norm.
    generators: Vec<DVector<f64>>,
    /// Orthonormal basis of the lineality space `{d : A d = 0}`.
    lineality: Vec<DVector<f64>>,
}

impl PolyCone {
    pub fn generators(&self) -> &[DVector<f64>] {
        &self.generators
    }

    pub fn lineality(&self) -> &[DVector<f64>] {
        &self.lineality
    }

    pub fn constraints(&self) -> &DMatrix<f64> {
        &self.constraints
    }

    pub fn dim(&self) -> usize {
        self.constraints.ncols()
    }

    /// H-form membership of a direction.
    pub fn contains_direction(&self, d: &DVector<f64>) -> bool {
        let scale = d.norm();
        if scale == 0.0 {
            return true;
        }
        (0..self.constraints.nrows()).all(|i| {
            let row = self.constraints.row(i);
            row.transpose().dot(d) <= TOL * row.norm() * scale
        })
    }

    /// Dimension of the linear span of the cone.
    pub fn span_dim(&self) -> usize {
        let cols: Vec<&DVector<f64>> = self.generators.iter().chain(self.lineality.iter()).collect();
        if cols.is_empty() {
            return 0;
        }
        let m = DMatrix::from_fn(self.dim(), cols.len(), |i, j| cols[j][i]);
        m.rank(TOL)
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.span_dim() == self.dim()
    }

    /// True when the cone is just the origin (the polyhedron is bounded).
    pub fn is_trivial(&self) -> bool {
        self.generators.is_empty() && self.lineality.is_empty()
    }
}

/// Splits R^n into the row space and null space of `a`, each as orthonormal
/// columns, via the eigendecomposition of the (tiny) Gram matrix `aᵀa`.
fn gram_split(a: &DMatrix<f64>) -> (Vec<DVector<f64>>, Vec<DVector<f64>>) {
    let n = a.ncols();
    if a.nrows() == 0 {
        let basis = (0..n)
            .map(|i| DVector::from_fn(n, |j, _| if i == j { 1.0 } else { 0.0 }))
            .collect();
        return (Vec::new(), basis);
    }
    let gram = a.transpose() * a;
    let eig = gram.symmetric_eigen();
    let lmax = eig.eigenvalues.iter().copied().fold(0.0f64, f64::max);
    let threshold = 1e-12 * lmax.max(1e-300);
    let mut rows = Vec::new();
    let mut null = Vec::new();
    for i in 0..n {
        let v = eig.eigenvectors.column(i).into_owned();
        if eig.eigenvalues[i] > threshold {
            rows.push(v);
        } else {
            null.push(v);
        }
    }
    (rows, null)
}

/// Orthonormal null-space basis of `a` (columns).
pub(crate) fn null_space(a: &DMatrix<f64>) -> Vec<DVector<f64>> {
    gram_split(a).1
}

/// Orthonormal row-space basis of `a` (columns).
fn row_space(a: &DMatrix<f64>) -> Vec<DVector<f64>> {
    gram_split(a).0
}

/// Incremental double description of the pointed cone `{y : rows * y <= 0}`.
/// Returns unit extreme rays.
fn double_description(rows: &DMatrix<f64>, dim: usize) -> Vec<DVector<f64>> {
    let mut rays: Vec<DVector<f64>> = Vec::new();
    let mut lin: Vec<DVector<f64>> = (0..dim)
        .map(|i| DVector::from_fn(dim, |j, _| if i == j { 1.0 } else { 0.0 }))
        .collect();
    let mut processed: Vec<DVector<f64>> = Vec::new();

    for ri in 0..rows.nrows() {
        let a: DVector<f64> = rows.row(ri).transpose();
        let an = a.norm();
        if an <= TOL {
            continue;
        }

        // use a lineality direction to absorb the constraint if one crosses it
        let hit = lin
            .iter()
            .enumerate()
            .map(|(i, l)| (i, a.dot(l)))
            .filter(|(_, s)| s.abs() > TOL * an)
            .max_by(|x, y| x.1.abs().partial_cmp(&y.1.abs()).unwrap());
        if let Some((i0, s0)) = hit {
            let l0 = lin.remove(i0);
            for l in lin.iter_mut() {
                let s = a.dot(l);
                *l -= &l0 * (s / s0);
                let norm = l.norm();
                if norm > TOL {
                    *l /= norm;
                }
            }
            for r in rays.iter_mut() {
                let s = a.dot(r);
                *r -= &l0 * (s / s0);
            }
            rays.retain(|r| r.norm() > TOL);
            for r in rays.iter_mut() {
                let n = r.norm();
                *r /= n;
            }
            let r0 = if s0 > 0.0 { -&l0 } else { l0.clone() };
            rays.push(r0.normalize());
        } else {
            let scored: Vec<(DVector<f64>, f64)> =
                rays.drain(..).map(|r| { let s = a.dot(&r); (r, s) }).collect();
            let tight = |r: &DVector<f64>| -> Vec<usize> {
                processed
                    .iter()
                    .enumerate()
                    .filter(|(_, p)| p.dot(r).abs() <= TOL * p.norm())
                    .map(|(i, _)| i)
                    .collect()
            };
            let mut next: Vec<DVector<f64>> = Vec::new();
            for (r, s) in &scored {
                if *s <= TOL * an {
                    next.push(r.clone());
                }
            }
            for (rp, sp) in scored.iter().filter(|(_, s)| *s < -TOL * an) {
                for (rn, sn) in scored.iter().filter(|(_, s)| *s > TOL * an) {
                    if lin.is_empty() && processed.len() > 1 {
                        // combinatorial adjacency: no third ray's tight set
                        // contains the common tight set
                        let zp = tight(rp);
                        let zn = tight(rn);
                        let common: Vec<usize> =
                            zp.iter().copied().filter(|i| zn.contains(i)).collect();
                        let blocked = scored.iter().any(|(r3, _)| {
                            if std::ptr::eq(r3, rp) || std::ptr::eq(r3, rn) {
                                return false;
                            }
                            let z3 = tight(r3);
                            common.iter().all(|i| z3.contains(i))
                        });
                        if blocked {
                            continue;
                        }
                    }
                    let combo = rp * *sn - rn * *sp;
                    let norm = combo.norm();
                    if norm > TOL {
                        next.push(combo / norm);
                    }
                }
            }
            rays = dedupe_directions(next);
        }
        processed.push(a);
    }

    // extremity filter: the tight rows at an extreme ray span a hyperplane
    let full = DMatrix::from_fn(processed.len(), dim, |i, j| processed[i][j]);
    rays.retain(|r| {
        let tight_rows: Vec<usize> = (0..full.nrows())
            .filter(|&i| full.row(i).transpose().dot(r).abs() <= TOL * full.row(i).norm())
            .collect();
        if dim == 1 {
            return true;
        }
        if tight_rows.is_empty() {
            return false;
        }
        let t = DMatrix::from_fn(tight_rows.len(), dim, |i, j| full[(tight_rows[i], j)]);
        t.rank(TOL) == dim - 1
    });
    dedupe_directions(rays)
}

fn dedupe_directions(rays: Vec<DVector<f64>>) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for r in rays {
        if out.iter().all(|o| o.dot(&r) < 1.0 - 1e-9) {
            out.push(r);
        }
    }
    out
}

/// Recession cone of `p`: H-form `{d : A d <= 0}`, extreme rays of the
/// pointed quotient, and the lineality space.
pub fn recession_cone(p: &HPolyhedron) -> Result<PolyCone> {
    let a = p.a().clone();
    let n = p.dim();
    let lineality = null_space(&a);
    let quotient = row_space(&a);
    let d = quotient.len();

    let generators = if d == 0 {
        Vec::new()
    } else {
        let q = DMatrix::from_fn(n, d, |i, j| quotient[j][i]);
        let reduced = &a * &q;
        double_description(&reduced, d)
            .into_iter()
            .map(|y| (&q * y).normalize())
            .collect()
    };

    let cone = PolyCone { constraints: a, generators, lineality };
    // every generator must satisfy the H-form
    for g in &cone.generators {
        if !cone.contains_direction(g) {
            return Err(Error::Inconsistency(format!(
                "generated ray {g:?} violates the cone H-form"
            )));
        }
    }
    Ok(cone)
}

/// Whether the polyhedron contains a translate of a full-dimensional cone,
/// i.e. its recession cone spans the ambient space.
pub fn has_full_cone(p: &HPolyhedron) -> Result<bool> {
    Ok(recession_cone(p)?.is_full_dimensional())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec2(x: f64, y: f64) -> DVector<f64> {
        DVector::from_vec(vec![x, y])
    }

    fn vec3(x: f64, y: f64, z: f64) -> DVector<f64> {
        DVector::from_vec(vec![x, y, z])
    }

    /// Brute-force extreme-ray oracle: directions spanned by (d-1)-subsets
    /// of rows, kept when they satisfy the H-form.
    fn enumeration_oracle(a: &DMatrix<f64>) -> Vec<DVector<f64>> {
        let n = a.ncols();
        let m = a.nrows();
        let mut found: Vec<DVector<f64>> = Vec::new();
        let lineality = null_space(a);
        if !lineality.is_empty() {
            return Vec::new(); // oracle only handles pointed cones
        }
        let subsets = (0..1u32 << m).filter(|s| s.count_ones() as usize == n - 1);
        for s in subsets {
            let rows: Vec<usize> = (0..m).filter(|i| s & (1 << i) != 0).collect();
            let sub = DMatrix::from_fn(rows.len(), n, |i, j| a[(rows[i], j)]);
            let null = null_space(&sub);
            if null.len() != 1 {
                continue;
            }
            for cand in [null[0].clone(), -&null[0]] {
                let ok = (0..m).all(|i| a.row(i).transpose().dot(&cand) <= 1e-9);
                if ok && found.iter().all(|f| f.dot(&cand) < 1.0 - 1e-9) {
                    found.push(cand);
                }
            }
        }
        found
    }

    fn same_direction_sets(a: &[DVector<f64>], b: &[DVector<f64>]) -> bool {
        a.len() == b.len()
            && a.iter().all(|x| b.iter().any(|y| x.dot(y) > 1.0 - 1e-7))
    }

    #[test]
    fn halfplane_strip_has_single_ray() {
        // x > 0, |y| < 1: cone is the ray (1, 0)
        let p = HPolyhedron::from_rows(
            &[vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            &[0.0, 1.0, 1.0],
            true,
        )
        .unwrap();
        let cone = recession_cone(&p).unwrap();
        assert!(cone.lineality().is_empty());
        assert_eq!(cone.generators().len(), 1);
        assert!(cone.generators()[0].dot(&vec2(1.0, 0.0)) > 1.0 - 1e-9);
        assert_eq!(cone.span_dim(), 1);
    }

    #[test]
    fn two_sided_strip_is_a_line() {
        // R x (0,1): no x constraint at all
        let p = HPolyhedron::from_rows(&[vec![0.0, 1.0], vec![0.0, -1.0]], &[1.0, 0.0], true)
            .unwrap();
        let cone = recession_cone(&p).unwrap();
        assert_eq!(cone.lineality().len(), 1);
        assert!(cone.lineality()[0][0].abs() > 1.0 - 1e-9);
        assert!(cone.generators().is_empty());
        assert!(cone.contains_direction(&vec2(1.0, 0.0)));
        assert!(cone.contains_direction(&vec2(-1.0, 0.0)));
        assert_eq!(cone.span_dim(), 1);
    }

    #[test]
    fn orthant_cone_is_full() {
        let p = HPolyhedron::from_rows(&[vec![-1.0, 0.0], vec![0.0, -1.0]], &[0.0, 0.0], true)
            .unwrap();
        let cone = recession_cone(&p).unwrap();
        assert!(cone.is_full_dimensional());
        assert!(has_full_cone(&p).unwrap());
        assert!(same_direction_sets(
            cone.generators(),
            &[vec2(1.0, 0.0), vec2(0.0, 1.0)]
        ));
    }

    #[test]
    fn widening_funnel_cone_spans_plane() {
        // x > 0, |y| < 1 + x/2
        let p = HPolyhedron::from_rows(
            &[vec![-1.0, 0.0], vec![-0.5, 1.0], vec![-0.5, -1.0]],
            &[0.0, 1.0, 1.0],
            true,
        )
        .unwrap();
        let cone = recession_cone(&p).unwrap();
        assert_eq!(cone.span_dim(), 2);
        assert!(has_full_cone(&p).unwrap());
        assert!(same_direction_sets(
            cone.generators(),
            &[vec2(2.0, 1.0).normalize(), vec2(2.0, -1.0).normalize()]
        ));
    }

    #[test]
    fn bounded_funnel_3d_has_single_ray() {
        // x > 0, |y| < min(1 + x, 6), |z| < min(1 + x/2, 4)
        let rows = vec![
            vec![-1.0, 0.0, 0.0],
            vec![-1.0, 1.0, 0.0],
            vec![-1.0, -1.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![-0.5, 0.0, 1.0],
            vec![-0.5, 0.0, -1.0],
            vec![0.0, 0.0, 1.0],
            vec![0.0, 0.0, -1.0],
        ];
        let c = vec![0.0, 1.0, 1.0, 6.0, 6.0, 1.0, 1.0, 4.0, 4.0];
        let p = HPolyhedron::from_rows(&rows, &c, true).unwrap();
        let cone = recession_cone(&p).unwrap();
        assert!(cone.lineality().is_empty());
        assert_eq!(cone.generators().len(), 1);
        assert!(cone.generators()[0].dot(&vec3(1.0, 0.0, 0.0)) > 1.0 - 1e-9);
        assert!(!has_full_cone(&p).unwrap());

        let oracle = enumeration_oracle(p.a());
        assert!(same_direction_sets(cone.generators(), &oracle));
    }

    #[test]
    fn octant_in_3d_matches_oracle() {
        let rows = vec![
            vec![-1.0, 0.0, 0.0],
            vec![0.0, -1.0, 0.0],
            vec![0.0, 0.0, -1.0],
        ];
        let p = HPolyhedron::from_rows(&rows, &[0.0; 3], true).unwrap();
        let cone = recession_cone(&p).unwrap();
        let oracle = enumeration_oracle(p.a());
        assert_eq!(cone.generators().len(), 3);
        assert!(same_direction_sets(cone.generators(), &oracle));
    }

    #[test]
    fn skew_cone_matches_oracle() {
        // {d : d_x >= d_y >= d_z >= 0} style constraints plus a tilt
        let rows = vec![
            vec![-1.0, 1.0, 0.0],
            vec![0.0, -1.0, 1.0],
            vec![0.0, 0.0, -1.0],
            vec![-1.0, -1.0, -1.0],
        ];
        let p = HPolyhedron::from_rows(&rows, &[0.0; 4], false).unwrap();
        let cone = recession_cone(&p).unwrap();
        let oracle = enumeration_oracle(p.a());
        assert!(!oracle.is_empty());
        assert!(
            same_direction_sets(cone.generators(), &oracle),
            "dd: {:?}\noracle: {:?}",
            cone.generators(),
            oracle
        );
    }

    #[test]
    fn bounded_polyhedron_has_trivial_cone() {
        let p = HPolyhedron::from_rows(
            &[
                vec![1.0, 0.0],
                vec![-1.0, 0.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
            &[1.0; 4],
            false,
        )
        .unwrap();
        let cone = recession_cone(&p).unwrap();
        assert!(cone.is_trivial());
    }

    #[test]
    fn strip_lifted_to_3d_has_plane_lineality() {
        // {0 < y < 1} in R^3
        let p = HPolyhedron::from_rows(
            &[vec![0.0, 1.0, 0.0], vec![0.0, -1.0, 0.0]],
            &[1.0, 0.0],
            true,
        )
        .unwrap();
        let cone = recession_cone(&p).unwrap();
        assert_eq!(cone.lineality().len(), 2);
        assert!(cone.generators().is_empty());
        assert_eq!(cone.span_dim(), 2);
        assert!(cone.contains_direction(&vec3(1.0, 0.0, 0.0)));
        assert!(cone.contains_direction(&vec3(-1.0, 0.0, 5.0)));
        assert!(!cone.contains_direction(&vec3(0.0, 1.0, 0.0)));
    }
}
