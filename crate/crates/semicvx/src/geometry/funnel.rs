//! Extraction of the planar funnel (or strip) from the projected image.
//!
//! The image `L(P)` is a planar H-polyhedron whose recession cone contains
//! `(1, 0)`. In the funnel case a shift `b` places the positive x-axis
//! inside the image while the image itself stays in `{x > 0}`; the width is
//! then the concave envelope of the exact facet-wise half-width maxima, so
//! the shifted image is contained in the funnel it defines.

use nalgebra::DVector;
use serde::Serialize;

use crate::envelope::upper_hull_points;
use crate::error::{Error, Result};
use crate::geometry::cone::PolyCone;
use crate::geometry::hpoly::HPolyhedron;
use crate::geometry::lp::{self, LpProblem};
use crate::geometry::project::LinearMap;
use crate::piecewise::PiecewiseAffine;
use crate::report::VerificationReport;
use crate::width::WidthSpec;

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReductionCase {
    Funnel,
    Strip,
}

/// Affine normalization of the strip case: `scale (.) + shift` maps the
/// image onto `R x (0, 1)`.
#[derive(Debug, Clone, Serialize)]
pub struct StripData {
    pub scale: [[f64; 2]; 2],
    pub shift: [f64; 2],
}

#[derive(Debug, Clone)]
pub struct FunnelReduction {
    pub case: ReductionCase,
    pub map: LinearMap,
    /// Translation applied to the image (funnel case).
    pub shift: [f64; 2],
    /// Funnel width on `[0, x_max]` (funnel case).
    pub width: Option<PiecewiseAffine>,
    pub strip: Option<StripData>,
    /// 2-D H-form of the image `L(P)` (before shifting).
    pub image: HPolyhedron,
    /// Sampled containment of the shifted image in the funnel (or of the
    /// normalized strip in `R x (0,1)`).
    pub containment: VerificationReport,
    /// Sampled membership of the positive x-axis in the shifted image
    /// (funnel case only; trivially passing for strips).
    pub axis: VerificationReport,
}

/// `[min, max]` of `{y : (x, y) in closure(image)}`, or None when empty.
pub fn slice_y_interval(image: &HPolyhedron, x: f64) -> Option<(f64, f64)> {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for i in 0..image.rows() {
        let a1 = image.a()[(i, 0)];
        let a2 = image.a()[(i, 1)];
        let c = image.c()[i];
        let scale = a1.abs().max(a2.abs()).max(1.0);
        if a2.abs() <= TOL * scale {
            if a1 * x > c + TOL * scale * (1.0 + x.abs()) {
                return None;
            }
        } else if a2 > 0.0 {
            hi = hi.min((c - a1 * x) / a2);
        } else {
            lo = lo.max((c - a1 * x) / a2);
        }
    }
    if lo > hi + TOL {
        None
    } else {
        Some((lo, hi))
    }
}

/// Leftmost abscissa of the horizontal slice at height `y` (closure
/// semantics); +inf when the slice is empty, -inf when unbounded left.
fn slice_entry(image: &HPolyhedron, y: f64) -> f64 {
    let mut lo = f64::NEG_INFINITY;
    let mut hi = f64::INFINITY;
    for i in 0..image.rows() {
        let a1 = image.a()[(i, 0)];
        let a2 = image.a()[(i, 1)];
        let c = image.c()[i];
        let scale = a1.abs().max(a2.abs()).max(1.0);
        if a1.abs() <= TOL * scale {
            if a2 * y > c + TOL * scale * (1.0 + y.abs()) {
                return f64::INFINITY;
            }
        } else if a1 > 0.0 {
            hi = hi.min((c - a2 * y) / a1);
        } else {
            lo = lo.max((c - a2 * y) / a1);
        }
    }
    if lo > hi + TOL {
        f64::INFINITY
    } else {
        lo
    }
}

fn minimize_scalar(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let mut a = lo;
    let mut b = hi;
    for _ in 0..300 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if f(m1) <= f(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    0.5 * (a + b)
}

fn lp_extreme(image: &HPolyhedron, objective: [f64; 2]) -> Result<lp::LpSolution> {
    let rows: Vec<Vec<f64>> = (0..image.rows())
        .map(|i| image.a().row(i).iter().copied().collect())
        .collect();
    lp::solve(&LpProblem {
        objective: objective.to_vec(),
        a_ub: rows,
        b_ub: image.c().as_slice().to_vec(),
        ..Default::default()
    })
}

/// Computes the reduction data for the projected image.
///
/// `x_max` is the abscissa span the width must cover (the planar stage's
/// grid span). Sampled checks use `seed` and `samples` interior points.
pub fn extract_reduction(
    p: &HPolyhedron,
    _cone: &PolyCone,
    map: &LinearMap,
    x_max: f64,
    seed: u64,
    samples: usize,
) -> Result<FunnelReduction> {
    let rotation = map.completion();
    let rotated = p.in_rotated_coordinates(&rotation)?;
    let image = rotated.eliminate_to(2)?;

    // image recession cone in H-form
    let dir_ok = |d: [f64; 2]| -> bool {
        (0..image.rows()).all(|i| {
            let row = image.a().row(i);
            row[0] * d[0] + row[1] * d[1] <= TOL * row.norm()
        })
    };
    if !dir_ok([1.0, 0.0]) {
        return Err(Error::ProjectionInvalid(
            "(1,0) is not a recession direction of the image".into(),
        ));
    }
    let is_strip = dir_ok([-1.0, 0.0]);

    let mut rng = crate::sample::rng(seed);
    let points = p.sample_interior(&mut rng, samples, 10.0)?;

    if is_strip {
        let y_lo = match lp_extreme(&image, [0.0, 1.0])? {
            lp::LpSolution::Optimal { value, .. } => value,
            _ => return Err(Error::ExtractionFailed("strip height unbounded below".into())),
        };
        let y_hi = match lp_extreme(&image, [0.0, -1.0])? {
            lp::LpSolution::Optimal { value, .. } => -value,
            _ => return Err(Error::ExtractionFailed("strip height unbounded above".into())),
        };
        if !(y_hi > y_lo + TOL) {
            return Err(Error::ExtractionFailed("degenerate strip height".into()));
        }
        let s = 1.0 / (y_hi - y_lo);
        let strip = StripData { scale: [[1.0, 0.0], [0.0, s]], shift: [0.0, -y_lo * s] };
        let mut containment = VerificationReport::from_violations("strip_normalization", 0.0);
        for pt in &points {
            let z = map.apply(pt);
            let ny = z[1] * s + strip.shift[1];
            let violation = (0.0 - ny).max(ny - 1.0);
            containment.record(violation, &[z[0], z[1], ny]);
        }
        return Ok(FunnelReduction {
            case: ReductionCase::Strip,
            map: map.clone(),
            shift: [0.0, 0.0],
            width: None,
            strip: Some(strip),
            image,
            containment: containment.finish(),
            axis: VerificationReport::from_violations("axis_membership", 0.0).finish(),
        });
    }

    // funnel case: leftmost abscissa and the widest entry height
    let x_inf = match lp_extreme(&image, [1.0, 0.0])? {
        lp::LpSolution::Optimal { value, .. } => value,
        _ => {
            return Err(Error::Inconsistency(
                "image unbounded to the left despite pointed recession".into(),
            ))
        }
    };
    let y_lo = match lp_extreme(&image, [0.0, 1.0])? {
        lp::LpSolution::Optimal { value, .. } => value,
        _ => return Err(Error::Inconsistency("funnel image has unbounded height".into())),
    };
    let y_hi = match lp_extreme(&image, [0.0, -1.0])? {
        lp::LpSolution::Optimal { value, .. } => -value,
        _ => return Err(Error::Inconsistency("funnel image has unbounded height".into())),
    };

    let entry = |y: f64| slice_entry(&image, y);
    let y_star = minimize_scalar(y_lo, y_hi, entry);
    let entry_tol = 1e-7 * (1.0 + x_inf.abs());
    // endpoints of the interval of heights whose slice reaches the apex
    let deep = |y: f64| entry(y) <= x_inf + entry_tol;
    if !deep(y_star) {
        return Err(Error::ExtractionFailed(format!(
            "no horizontal line reaches the leftmost abscissa (entry {} vs {})",
            entry(y_star),
            x_inf
        )));
    }
    let mut lo = y_lo;
    let mut hi = y_star;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if deep(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let deep_left = hi;
    let mut lo = y_star;
    let mut hi = y_hi;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if deep(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let deep_right = lo;

    let build_width = |y0: f64| -> Result<PiecewiseAffine> {
        // shifted coordinates: (x, y) = image point + (-x_inf, -y0)
        let mut upper: Vec<(f64, f64)> = Vec::new(); // (slope, intercept)
        let mut lower: Vec<(f64, f64)> = Vec::new();
        for i in 0..image.rows() {
            let a1 = image.a()[(i, 0)];
            let a2 = image.a()[(i, 1)];
            let c = image.c()[i] - a1 * x_inf - a2 * y0;
            let scale = a1.abs().max(a2.abs()).max(1.0);
            if a2 > TOL * scale {
                upper.push((-a1 / a2, c / a2));
            } else if a2 < -TOL * scale {
                lower.push((a1 / a2, -c / a2));
            }
        }
        if upper.is_empty() || lower.is_empty() {
            return Err(Error::Inconsistency("funnel image missing a width bound".into()));
        }
        let eval_min = |pieces: &[(f64, f64)], x: f64| {
            pieces.iter().map(|&(s, t)| s * x + t).fold(f64::INFINITY, f64::min)
        };

        let mut xs: Vec<f64> = vec![0.0, x_max];
        let all: Vec<(f64, f64)> = upper.iter().chain(lower.iter()).copied().collect();
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                let (s1, t1) = all[i];
                let (s2, t2) = all[j];
                if (s1 - s2).abs() > 1e-14 {
                    let x = (t2 - t1) / (s1 - s2);
                    if x > 0.0 && x < x_max {
                        xs.push(x);
                    }
                }
            }
        }
        for k in 0..32 {
            xs.push(x_max * 10f64.powf(-6.0 * (1.0 - k as f64 / 31.0)));
        }
        xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));

        let mut ys = Vec::with_capacity(xs.len());
        for &x in &xs {
            let u = eval_min(&upper, x);
            let l = eval_min(&lower, x);
            if x > TOL && (u <= TOL || l <= TOL) {
                return Err(Error::ExtractionFailed(format!(
                    "axis leaves the image interior: half-widths ({u}, {l}) at x = {x}"
                )));
            }
            ys.push(u.max(l).max(0.0));
        }
        let hull = upper_hull_points(&xs, &ys)?;
        Ok(hull)
    };

    let mut y0 = 0.5 * (deep_left + deep_right);
    let width = match build_width(y0) {
        Ok(w) => w,
        Err(Error::ExtractionFailed(_)) => {
            // retry with the interior point's height
            let (ip, _) = p.interior_point()?;
            y0 = map.apply(&ip)[1];
            if !deep(y0) {
                return Err(Error::ExtractionFailed(
                    "no shift makes the axis interior to the image".into(),
                ));
            }
            build_width(y0)?
        }
        Err(e) => return Err(e),
    };
    let shift = [-x_inf, -y0];

    // the width must flatten out relative to x
    let x_ref = x_max * 1e-4;
    let r_ref = width.eval(x_ref)? / x_ref;
    let r_end = width.eval(x_max)? / x_max;
    if !(r_end <= 0.5 * r_ref + TOL) {
        return Err(Error::ExtractionFailed(format!(
            "width/abscissa ratio does not decay: {r_ref} -> {r_end}"
        )));
    }

    let spec = WidthSpec::piecewise(width.clone())?;
    let mut containment = VerificationReport::from_violations("funnel_containment", 0.0);
    for pt in &points {
        let z = map.apply(pt);
        let (x, y) = (z[0] + shift[0], z[1] + shift[1]);
        if x > x_max {
            containment.skip();
            continue;
        }
        if x <= 0.0 {
            containment.record(-x, &[x, y]);
            continue;
        }
        let w = spec.eval(x)?;
        containment.record(y.abs() - w, &[x, y, w]);
    }

    let mut axis = VerificationReport::from_violations("axis_membership", 0.0);
    for k in 0..24 {
        let x = x_max * 10f64.powf(-6.0 * (1.0 - k as f64 / 23.0));
        let target = [x - shift[0], -shift[1]];
        match p.preimage_point(map.matrix(), &target)? {
            Some(_) => axis.record(-1.0, &[x]),
            None => axis.record(1.0, &[x]),
        }
    }

    Ok(FunnelReduction {
        case: ReductionCase::Funnel,
        map: map.clone(),
        shift,
        width: Some(width),
        strip: None,
        image,
        containment: containment.finish(),
        axis: axis.finish(),
    })
}

/// Interior samples of the shifted image with prescribed abscissa range,
/// produced through preimages in `P` (so callers get matching pairs of an
/// ambient point and its planar image).
pub fn image_interior_samples(
    p: &HPolyhedron,
    red: &FunnelReduction,
    x_lo: f64,
    x_hi: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<(DVector<f64>, [f64; 2])>> {
    let mut rng = crate::sample::rng(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 100 * count + 100 {
            return Err(Error::DomainTruncation(
                "could not sample the requested image abscissa range".into(),
            ));
        }
        let x = crate::sample::log_uniform(&mut rng, x_lo, x_hi);
        let img_x = x - red.shift[0];
        let Some((lo, hi)) = slice_y_interval(&red.image, img_x) else {
            continue;
        };
        if !(hi - lo > TOL) {
            continue;
        }
        let frac: f64 = rand::Rng::gen_range(&mut rng, 0.05..0.95);
        let img_y = lo + (hi - lo) * frac;
        let Some((pre, _)) = p.preimage_point(red.map.matrix(), &[img_x, img_y])? else {
            continue;
        };
        out.push((pre, [x, img_y + red.shift[1]]));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::cone::recession_cone;
    use crate::geometry::project::build_projection;

    fn reduce(p: &HPolyhedron, x_max: f64) -> FunnelReduction {
        let cone = recession_cone(p).unwrap();
        let map = build_projection(p, &cone).unwrap();
        extract_reduction(p, &cone, &map, x_max, 7, 32).unwrap()
    }

    #[test]
    fn symmetric_strip_ray_gives_unit_width() {
        // x > 0, |y| < 1: funnel case with constant width 1
        let p = HPolyhedron::from_rows(
            &[vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            &[0.0, 1.0, 1.0],
            true,
        )
        .unwrap();
        let red = reduce(&p, 100.0);
        assert_eq!(red.case, ReductionCase::Funnel);
        assert!(red.shift[0].abs() < 1e-6);
        assert!(red.shift[1].abs() < 1e-6);
        let w = red.width.as_ref().unwrap();
        assert!((w.eval(0.5).unwrap() - 1.0).abs() < 1e-6);
        assert!((w.eval(90.0).unwrap() - 1.0).abs() < 1e-6);
        assert!(red.containment.pass);
        assert!(red.axis.pass);
    }

    #[test]
    fn off_center_strip_is_recentered() {
        // x > 0, 0 < y < 2: the shift must bring the axis to the middle
        let p = HPolyhedron::from_rows(
            &[vec![-1.0, 0.0], vec![0.0, -1.0], vec![0.0, 1.0]],
            &[0.0, 0.0, 2.0],
            true,
        )
        .unwrap();
        let red = reduce(&p, 50.0);
        assert_eq!(red.case, ReductionCase::Funnel);
        assert!(red.shift[0].abs() < 1e-6);
        assert!((red.shift[1] + 1.0).abs() < 1e-6, "shift {:?}", red.shift);
        let w = red.width.as_ref().unwrap();
        assert!((w.eval(10.0).unwrap() - 1.0).abs() < 1e-6);
        assert!(red.containment.pass);
        assert!(red.axis.pass);
    }

    #[test]
    fn triangle_tail_width_is_min_of_facets() {
        // x > 0, |y| < min(1 + x, 6)
        let p = HPolyhedron::from_rows(
            &[
                vec![-1.0, 0.0],
                vec![-1.0, 1.0],
                vec![-1.0, -1.0],
                vec![0.0, 1.0],
                vec![0.0, -1.0],
            ],
            &[0.0, 1.0, 1.0, 6.0, 6.0],
            true,
        )
        .unwrap();
        let red = reduce(&p, 2000.0);
        assert_eq!(red.case, ReductionCase::Funnel);
        let w = red.width.as_ref().unwrap();
        for (x, expect) in [(0.5, 1.5), (2.0, 3.0), (4.999, 5.999), (5.5, 6.0), (1000.0, 6.0)] {
            let got = w.eval(x).unwrap();
            assert!(
                (got - expect).abs() < 1e-6,
                "width at {x}: {got} vs min(1+x, 6) = {expect}"
            );
        }
        assert!(red.containment.pass);
        assert!(red.axis.pass);
    }

    #[test]
    fn strip_classified_and_normalized() {
        // R x (0, 1) lifted to R^3: {0 < y < 1}
        let p = HPolyhedron::from_rows(
            &[vec![0.0, 1.0, 0.0], vec![0.0, -1.0, 0.0]],
            &[1.0, 0.0],
            true,
        )
        .unwrap();
        let red = reduce(&p, 100.0);
        assert_eq!(red.case, ReductionCase::Strip);
        let strip = red.strip.as_ref().unwrap();
        assert!(red.containment.pass, "normalized strip points must land in (0,1)");
        assert!((strip.scale[1][1] - 1.0).abs() < 1e-6);
        assert!(red.width.is_none());
    }

    #[test]
    fn funnel_3d_extracts_its_y_width() {
        // x > 0, |y| < min(1 + x, 6), |z| < min(1 + x/2, 4): the projection
        // keeps (x, y), so the width is min(1 + x, 6) again
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
        let red = reduce(&p, 1000.0);
        assert_eq!(red.case, ReductionCase::Funnel);
        let w = red.width.as_ref().unwrap();
        assert!((w.eval(2.0).unwrap() - 3.0).abs() < 1e-6);
        assert!((w.eval(800.0).unwrap() - 6.0).abs() < 1e-6);
        assert!(red.containment.pass);
        assert!(red.axis.pass);
    }

    #[test]
    fn image_samples_come_with_preimages() {
        let p = HPolyhedron::from_rows(
            &[vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            &[0.0, 1.0, 1.0],
            true,
        )
        .unwrap();
        let red = reduce(&p, 100.0);
        let samples = image_interior_samples(&p, &red, 1.0, 90.0, 16, 5).unwrap();
        let w = red.width.as_ref().unwrap();
        for (pre, z) in samples {
            assert!(p.contains(&pre));
            let img = red.map.apply(&pre);
            assert!((img[0] + red.shift[0] - z[0]).abs() < 1e-9);
            assert!(z[1].abs() < w.eval(z[0]).unwrap());
        }
    }
}
