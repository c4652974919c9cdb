//! Builds the counterexample `f(x, y) = g(x) y` on a funnel and runs every
//! verifier: the profile inequalities, semiconvexity/semiconcavity with
//! constant 1, the Taylor and line-modulus constants, and the divergence
//! witness showing the gradient admits no modulus `C w`.
//!
//! ```bash
//! cargo run --release --example build_counterexample
//! ```

use semicvx::counterexample::{
    divergence_witness, verify_g_conditions, verify_line_modulus, verify_semiconvexity,
    verify_taylor_bound, CounterexampleBundle,
};
use semicvx::envelope::EnvelopeResult;
use semicvx::modulus::ModulusSpec;
use semicvx::partition_modulus::{build_grid, compute_partition_modulus, GridParams, Pruning};
use semicvx::sample;
use semicvx::width::WidthSpec;

fn main() -> semicvx::Result<()> {
    let w = ModulusSpec::power(0.5)?;
    let eta = WidthSpec::power_shift(0.4, 1.0)?;
    let grid = build_grid(&eta, &GridParams::new(1.05e6, 1.05, 4.0).with_anchors(vec![1.0]))?;
    let pm = compute_partition_modulus(&w, &eta, &grid, Pruning::On)?;
    let env = EnvelopeResult::from_grid(pm.values())?;
    let bundle = CounterexampleBundle::build(&pm, &env, 1.0, None)?;

    println!("base a = {}", bundle.base());
    println!("aspect q = max(1, width(a)/a) = {:.12}", bundle.aspect());
    println!("normalizer b = 1280 q^2 = {:.6}", bundle.norm());
    println!("domain: x in (0, {:.1}], |y| < width(x)\n", bundle.x_max());

    let pairs = sample::positive_pairs(11, 1e-3, bundle.x_max() / 2.0, 10_000);
    let g = verify_g_conditions(&bundle, &pairs, |t| pm.grid_slack(t))?;
    println!("profile increment bound:   {}", verdict(g.increment.pass));
    println!("profile slope-width bound: {}", verdict(g.slope_width.pass));
    println!("profile slope-drop bound:  {}", verdict(g.slope_drop.pass));

    let funnel = bundle.domain();
    let triples = sample::funnel_triples(12, &funnel, 1e-3, bundle.x_max() * 0.9, 100_000);
    let semi = verify_semiconvexity(&bundle, &w, &triples, 1.0, 1e-9)?;
    println!(
        "semiconvex + semiconcave with constant 1 on {} triples: {}",
        semi.samples,
        verdict(semi.pass)
    );

    let t_pairs = sample::funnel_pairs(13, &funnel, 1e-3, bundle.x_max() * 0.9, 10_000);
    let taylor = verify_taylor_bound(&bundle, &w, &t_pairs)?;
    println!(
        "first-order Taylor constant: {:.4} (stable: {})",
        taylor.empirical_constant.unwrap(),
        verdict(taylor.pass)
    );

    let lines = sample::funnel_lines(14, &funnel, 1e-3, bundle.x_max() * 0.9, 100, 32);
    let line = verify_line_modulus(&bundle, &w, &lines)?;
    println!(
        "directional-derivative modulus constant over {} line pairs: {:.4}",
        line.samples,
        line.empirical_constant.unwrap()
    );

    let probes: Vec<f64> = (1..=6).map(|k| 10f64.powi(k)).collect();
    let witness = divergence_witness(&bundle, &probes, |t| pm.grid_slack(t))?;
    println!("\ndivergence witness W(x) = |g(x) - g(1)| / w(x - 1):");
    println!("{:>10} {:>14} {:>14}", "x", "W(x)", "floor");
    for row in &witness.rows {
        println!("{:>10.0} {:>14.6e} {:>14.6e}", row.x, row.growth, row.lower_bound);
    }
    println!(
        "growth across the window: {:.2}x  (unbounded growth means no C w bounds the gradient)",
        witness.growth_ratio
    );
    Ok(())
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "ok"
    } else {
        "VIOLATED"
    }
}
