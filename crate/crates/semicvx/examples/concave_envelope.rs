//! Upper concave envelope of the partition modulus: the two-sided bound,
//! the non-increasing right slopes, and the growth inequalities.
//!
//! ```bash
//! cargo run --release --example concave_envelope
//! ```

use semicvx::envelope::{
    check_envelope_growth, check_envelope_sandwich, check_uniform_growth_bound,
    upper_concave_envelope,
};
use semicvx::modulus::ModulusSpec;
use semicvx::partition_modulus::{build_grid, compute_partition_modulus, GridParams, Pruning};
use semicvx::sample;
use semicvx::width::WidthSpec;

fn main() -> semicvx::Result<()> {
    let w = ModulusSpec::power(0.5)?;
    let eta = WidthSpec::power_shift(0.4, 1.0)?;
    let grid = build_grid(&eta, &GridParams::new(1e5, 1.05, 4.0))?;
    let pm = compute_partition_modulus(&w, &eta, &grid, Pruning::On)?;
    let psi = upper_concave_envelope(pm.values())?;

    println!(
        "envelope of the partition modulus: {} breakpoints from {} grid nodes",
        psi.breakpoints().len(),
        grid.len()
    );
    println!("{:>12} {:>12} {:>14}", "h", "envelope", "right slope");
    for probe in [1.0, 10.0, 1e2, 1e3, 1e4] {
        println!(
            "{:>12.1} {:>12.4} {:>14.6}",
            probe,
            psi.eval(probe)?,
            psi.right_slope(probe)?
        );
    }

    let sandwich = check_envelope_sandwich(pm.values(), &psi)?;
    println!(
        "\nvalue <= envelope <= 2 value at all {} nodes: {}",
        sandwich.samples,
        if sandwich.pass { "ok" } else { "VIOLATED" }
    );

    let mut rng = sample::rng(2024);
    let ts: Vec<f64> = (0..1000).map(|_| sample::log_uniform(&mut rng, 2.0, 5e4)).collect();
    let growth = check_envelope_growth(&psi, &w, &eta, &ts, |t| pm.grid_slack(t))?;
    println!(
        "envelope(t + width(t)) <= envelope(t) + 2 w(width(t)) on {} samples: {}",
        growth.samples,
        if growth.pass { "ok" } else { "VIOLATED" }
    );

    let pairs = sample::positive_pairs(2025, 0.5, 5e4, 1000);
    let uniform = check_uniform_growth_bound(&psi, &w, &eta, &pairs, |t| pm.grid_slack(t))?;
    println!(
        "envelope(x+h) - envelope(x) <= 4 max(1, h/width(x+h)) w(h) on {} pairs: {}",
        uniform.samples,
        if uniform.pass { "ok" } else { "VIOLATED" }
    );
    Ok(())
}
