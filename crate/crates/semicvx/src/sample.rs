//! Seeded deterministic samplers for the verification suites.
//!
//! Every verifier consumes a pre-generated sample list, so report contents
//! depend only on the seed in the configuration.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::counterexample::{FunnelDomain, LinePairs, Triple};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn log_uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    debug_assert!(lo > 0.0 && lo < hi);
    rng.gen_range(lo.ln()..hi.ln()).exp()
}

/// Point strictly inside the funnel with abscissa log-uniform in
/// `[x_lo, x_hi]`.
pub fn funnel_point(rng: &mut impl Rng, funnel: &FunnelDomain, x_lo: f64, x_hi: f64) -> (f64, f64) {
    let x = log_uniform(rng, x_lo, x_hi).min(funnel.x_max);
    let w = funnel.width.eval(x).expect("positive abscissa");
    let y = rng.gen_range(-1.0..1.0) * w * (1.0 - 1e-9);
    (x, y)
}

/// Convex-combination triples inside the funnel.
pub fn funnel_triples(
    seed: u64,
    funnel: &FunnelDomain,
    x_lo: f64,
    x_hi: f64,
    count: usize,
) -> Vec<Triple> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| Triple {
            p: funnel_point(&mut rng, funnel, x_lo, x_hi),
            q: funnel_point(&mut rng, funnel, x_lo, x_hi),
            lambda: rng.gen_range(0.0..=1.0),
        })
        .collect()
}

/// Point pairs inside the funnel (for Taylor-type checks).
pub fn funnel_pairs(
    seed: u64,
    funnel: &FunnelDomain,
    x_lo: f64,
    x_hi: f64,
    count: usize,
) -> Vec<((f64, f64), (f64, f64))> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            (
                funnel_point(&mut rng, funnel, x_lo, x_hi),
                funnel_point(&mut rng, funnel, x_lo, x_hi),
            )
        })
        .collect()
}

/// Log-uniform positive `(x, h)` pairs.
pub fn positive_pairs(seed: u64, lo: f64, hi: f64, count: usize) -> Vec<(f64, f64)> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| (log_uniform(&mut rng, lo, hi), log_uniform(&mut rng, lo, hi)))
        .collect()
}

/// Log-spaced probe abscissae, `per_decade` points per decade from `10^lo`
/// to `10^hi` inclusive.
pub fn decade_probes(lo: i32, hi: i32, per_decade: usize) -> Vec<f64> {
    let steps = (hi - lo) as usize * per_decade;
    (0..=steps)
        .map(|i| 10f64.powf(lo as f64 + i as f64 / per_decade as f64))
        .collect()
}

/// Finds the parameter interval of `{t: origin + t dir inside}` by doubling
/// and bisection, then shrinks it slightly so sampled points stay strictly
/// inside. `t_cap` bounds the search along recession directions.
pub fn line_trace(
    contains: impl Fn(f64, f64) -> bool,
    origin: (f64, f64),
    dir: (f64, f64),
    t_cap: f64,
) -> Option<(f64, f64)> {
    if !contains(origin.0, origin.1) {
        return None;
    }
    let probe = |t: f64| contains(origin.0 + t * dir.0, origin.1 + t * dir.1);
    let grow = |sign: f64| -> f64 {
        let mut inside = 0.0f64;
        let mut step = 1e-6 * t_cap.max(1.0);
        while step.abs() < t_cap && probe(sign * (inside + step)) {
            inside += step;
            step *= 2.0;
        }
        let mut lo = inside;
        let mut hi = inside + step;
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if probe(sign * mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        sign * lo
    };
    let t_pos = grow(1.0);
    let t_neg = grow(-1.0);
    let span = t_pos - t_neg;
    if span <= 0.0 {
        return None;
    }
    Some((t_neg + 1e-9 * span, t_pos - 1e-9 * span))
}

/// Random lines through funnel points with parameter pairs on their traces.
pub fn funnel_lines(
    seed: u64,
    funnel: &FunnelDomain,
    x_lo: f64,
    x_hi: f64,
    lines: usize,
    pairs_per_line: usize,
) -> Vec<LinePairs> {
    let mut rng = rng(seed);
    let mut out = Vec::with_capacity(lines);
    while out.len() < lines {
        let origin = funnel_point(&mut rng, funnel, x_lo, x_hi);
        let angle = rng.gen_range(0.0..std::f64::consts::PI);
        let dir = (angle.cos(), angle.sin());
        let Some((t_lo, t_hi)) = line_trace(|x, y| funnel.contains(x, y), origin, dir, funnel.x_max)
        else {
            continue;
        };
        if !(t_hi > t_lo) {
            continue;
        }
        let t_pairs = (0..pairs_per_line)
            .map(|_| {
                let a = rng.gen_range(t_lo..t_hi);
                let b = rng.gen_range(t_lo..t_hi);
                (a.min(b), a.max(b))
            })
            .filter(|(a, b)| b > a)
            .collect();
        out.push(LinePairs { origin, dir, t_pairs });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::width::WidthSpec;

    fn unit_funnel() -> FunnelDomain {
        FunnelDomain { width: WidthSpec::constant(1.0).unwrap(), x_max: 100.0 }
    }

    #[test]
    fn samples_are_deterministic_per_seed() {
        let f = unit_funnel();
        let a = funnel_triples(7, &f, 0.1, 50.0, 32);
        let b = funnel_triples(7, &f, 0.1, 50.0, 32);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.p, y.p);
            assert_eq!(x.q, y.q);
            assert_eq!(x.lambda, y.lambda);
        }
        let c = funnel_triples(8, &f, 0.1, 50.0, 32);
        assert!(a.iter().zip(&c).any(|(x, y)| x.p != y.p));
    }

    #[test]
    fn sampled_points_stay_inside() {
        let f = unit_funnel();
        for t in funnel_triples(3, &f, 0.1, 99.0, 500) {
            assert!(f.contains(t.p.0, t.p.1));
            assert!(f.contains(t.q.0, t.q.1));
        }
    }

    #[test]
    fn line_trace_brackets_the_strip() {
        let f = unit_funnel();
        let (lo, hi) = line_trace(|x, y| f.contains(x, y), (10.0, 0.0), (0.0, 1.0), 100.0).unwrap();
        assert!((hi - 1.0).abs() < 1e-6);
        assert!((lo + 1.0).abs() < 1e-6);
    }

    #[test]
    fn decade_probes_cover_endpoints() {
        let p = decade_probes(1, 6, 1);
        assert_eq!(p.len(), 6);
        assert!((p[0] - 10.0).abs() < 1e-12);
        assert!((p[5] - 1e6).abs() < 1e-6);
    }
}
