//! Pulling the planar counterexample back through the projection.
//!
//! `F(p) = f0(L p + b)` with gradient `Lᵀ grad f0`. Because the map has
//! operator norm 1 and the modulus is non-decreasing, the planar
//! semiconvexity inequality transfers to the ambient polyhedron with the
//! same constant, and the gradient-modulus witness reappears along the
//! preimage of the axis ray.

use nalgebra::DVector;

use crate::counterexample::{CounterexampleBundle, PlanarField, WitnessReport, WitnessRow};
use crate::error::{Error, Result};
use crate::geometry::cone::PolyCone;
use crate::geometry::funnel::{image_interior_samples, FunnelReduction};
use crate::geometry::hpoly::HPolyhedron;
use crate::modulus::ModulusSpec;
use crate::report::VerificationReport;

/// The pulled-back field on the ambient polyhedron.
pub struct LiftedField<'a> {
    pub bundle: &'a CounterexampleBundle,
    pub reduction: &'a FunnelReduction,
    pub polyhedron: &'a HPolyhedron,
}

impl<'a> LiftedField<'a> {
    fn image(&self, p: &DVector<f64>) -> [f64; 2] {
        let z = self.reduction.map.apply(p);
        [z[0] + self.reduction.shift[0], z[1] + self.reduction.shift[1]]
    }

    pub fn contains(&self, p: &DVector<f64>) -> bool {
        if !self.polyhedron.contains(p) {
            return false;
        }
        let z = self.image(p);
        self.bundle.domain().contains(z[0], z[1])
    }

    pub fn value(&self, p: &DVector<f64>) -> Result<f64> {
        let z = self.image(p);
        self.bundle.value(z[0], z[1]).map_err(|e| match e {
            Error::Domain(msg) => Error::DomainTruncation(msg),
            other => other,
        })
    }

    pub fn gradient(&self, p: &DVector<f64>) -> Result<DVector<f64>> {
        let z = self.image(p);
        let g = self.bundle.gradient(z[0], z[1]).map_err(|e| match e {
            Error::Domain(msg) => Error::DomainTruncation(msg),
            other => other,
        })?;
        Ok(self.reduction.map.transpose_apply([g.0, g.1]))
    }
}

/// A convex-combination triple in the ambient polyhedron.
#[derive(Debug, Clone)]
pub struct LiftedTriple {
    pub p: DVector<f64>,
    pub q: DVector<f64>,
    pub lambda: f64,
}

/// Samples ambient triples whose images stay in the truncated funnel.
///
/// Preimages are solved by feasibility programs, so a bounded pool of base
/// points is drawn first and triples combine random pool members with a
/// fresh kernel-direction spread (which the image cannot see) per pick.
pub fn lifted_triples(
    field: &LiftedField,
    x_lo: f64,
    x_hi: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<LiftedTriple>> {
    let pool_size = (2 * count).clamp(2, 4_000);
    let pool = image_interior_samples(
        field.polyhedron,
        field.reduction,
        x_lo,
        x_hi,
        pool_size,
        seed,
    )?;
    let kernel = field.reduction.map.kernel_basis();
    let mut rng = crate::sample::rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let pick = |rng: &mut rand_chacha::ChaCha8Rng| -> DVector<f64> {
        let i = rand::Rng::gen_range(rng, 0..pool.len());
        let mut p = pool[i].0.clone();
        for k in &kernel {
            let step: f64 = rand::Rng::gen_range(rng, -1.0..1.0);
            let cand = &p + k * step;
            if field.polyhedron.contains_with_margin(&cand, 1e-9) {
                p = cand;
            }
        }
        p
    };
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let p = pick(&mut rng);
        let q = pick(&mut rng);
        let lambda: f64 = rand::Rng::gen_range(&mut rng, 0.0..=1.0);
        out.push(LiftedTriple { p, q, lambda });
    }
    Ok(out)
}

/// The semiconvexity/semiconcavity check for the pulled-back field, with
/// constant `c` and the same tolerance convention as the planar verifier.
pub fn verify_lifted_semiconvexity(
    field: &LiftedField,
    w: &ModulusSpec,
    triples: &[LiftedTriple],
    c: f64,
    tol_scale: f64,
) -> Result<VerificationReport> {
    let mut rep = VerificationReport::from_violations("lifted_semiconvexity", 0.0);
    for t in triples {
        if !field.contains(&t.p) || !field.contains(&t.q) {
            return Err(Error::SamplerContract("lifted triple outside the domain".into()));
        }
        let m = &t.p * t.lambda + &t.q * (1.0 - t.lambda);
        if !field.contains(&m) {
            return Err(Error::SamplerContract("lifted combination left the domain".into()));
        }
        let fp = field.value(&t.p)?;
        let fq = field.value(&t.q)?;
        let fm = field.value(&m)?;
        let d = (&t.p - &t.q).norm();
        let bound = c * t.lambda * (1.0 - t.lambda) * d * w.eval(d)?;
        let defect = fm - t.lambda * fp - (1.0 - t.lambda) * fq;
        let violation = (defect - bound).max(-defect - bound);
        let scale = fp.abs().max(fq.abs()).max(fm.abs()).max(1.0);
        rep.record(violation - tol_scale * scale, &[t.lambda, d]);
    }
    Ok(rep.finish())
}

/// Base point and direction of the lifted witness ray: `p0` maps to `(1, 0)`
/// in shifted image coordinates and `d` is a recession generator scaled so
/// its image is `(1, 0)`.
pub fn lifted_ray(
    field: &LiftedField,
    cone: &PolyCone,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let map = &field.reduction.map;
    let g = cone
        .generators()
        .iter()
        .map(|g| (g, map.apply(g)))
        .find(|(_, z)| z[0] > 1e-9)
        .ok_or_else(|| {
            Error::ReductionNotApplicable("no generator maps to the positive axis".into())
        })?;
    let d = g.0 / g.1[0];
    let target = [1.0 - field.reduction.shift[0], -field.reduction.shift[1]];
    let (p0, _) = field
        .polyhedron
        .preimage_point(map.matrix(), &target)?
        .ok_or_else(|| Error::Inconsistency("witness base point has no interior preimage".into()))?;
    Ok((p0, d))
}

/// The witness along the lifted ray: directional derivative of the lifted
/// field along the pulled-back vertical direction, compared at `x` and at
/// the base point, normalized by the modulus. The floor is the same one the
/// planar construction guarantees.
pub fn lifted_witness(
    field: &LiftedField,
    p0: &DVector<f64>,
    d: &DVector<f64>,
    probes: &[f64],
    slack: impl Fn(f64) -> f64,
) -> Result<WitnessReport> {
    let bundle = field.bundle;
    let v = field.reduction.map.transpose_apply([0.0, 1.0]);
    let ref_x = 2.0 * (bundle.base() + 1.0);
    let psi_ref = bundle.envelope().eval(ref_x)?;
    let b = bundle.norm();
    let base_deriv = field.gradient(p0)?.dot(&v);

    let mut rows = Vec::new();
    let mut skipped = 0usize;
    let mut ok = true;
    for &x in probes {
        if !(x > 1.0 && x <= bundle.x_max()) {
            skipped += 1;
            continue;
        }
        let pt = p0 + d * (x - 1.0);
        if !field.contains(&pt) {
            skipped += 1;
            continue;
        }
        let deriv = field.gradient(&pt)?.dot(&v);
        let growth = (deriv - base_deriv).abs() / bundle.omega().eval(x - 1.0)?;
        let lower = (bundle.modulus_values().eval(x)? - psi_ref - slack(x))
            / (2.0 * b * bundle.omega().eval(x)?);
        if growth < lower - 1e-12 * lower.abs().max(1.0) {
            ok = false;
        }
        rows.push(WitnessRow { x, growth, lower_bound: lower });
    }
    if rows.is_empty() {
        return Err(Error::Parameter("no usable lifted witness probes".into()));
    }
    let growth_ratio = rows.last().unwrap().growth / rows.first().unwrap().growth;
    Ok(WitnessReport { rows, skipped, lower_bound_ok: ok, growth_ratio })
}
