//! Computes the partition modulus of two funnels and shows the structure of
//! its optimal partitions.
//!
//! ```bash
//! cargo run --release --example partition_modulus
//! ```

use semicvx::modulus::ModulusSpec;
use semicvx::partition_modulus::{
    build_grid, compute_partition_modulus, GridParams, Pruning,
};
use semicvx::width::WidthSpec;

fn main() -> semicvx::Result<()> {
    // Unit width, square-root modulus: below the width scale a single piece
    // is optimal, beyond it the optimum chops into unit-length pieces and
    // the modulus grows linearly.
    let w = ModulusSpec::power(0.5)?;
    let eta = WidthSpec::constant(1.0)?;
    let grid = build_grid(&eta, &GridParams::new(120.0, 1.05, 4.0).with_anchors(vec![100.0]))?;
    let pm = compute_partition_modulus(&w, &eta, &grid, Pruning::On)?;

    println!("unit width, w(h) = sqrt(h), grid of {} nodes", grid.len());
    println!("{:>10} {:>12} {:>12} {:>12}", "h", "value", "lower", "upper");
    for probe in [0.25, 1.0, 4.0, 25.0, 100.0] {
        let k = grid.floor_index(probe)?;
        println!(
            "{:>10.3} {:>12.6} {:>12.6} {:>12.6}",
            grid.nodes()[k],
            pm.value_at_node(k),
            pm.lower_bound().ys()[k],
            pm.upper_bound().ys()[k],
        );
    }

    let partition = pm.optimal_partition(100.0)?;
    let pieces: Vec<f64> = partition.pieces().map(|(a, b)| b - a).collect();
    println!(
        "\noptimal partition of [0, 100]: {} pieces, lengths {:.3} .. {:.3}",
        pieces.len(),
        pieces.iter().cloned().fold(f64::INFINITY, f64::min),
        pieces.iter().cloned().fold(0.0, f64::max),
    );
    println!("cost of the recovered partition: {:.9}", pm.partition_cost(&partition)?);

    // Sub-linear width: the modulus grows like h^0.8 and the ratio
    // w / value decays, which is what the counterexample construction needs.
    let eta = WidthSpec::power_shift(0.4, 1.0)?;
    let grid = build_grid(&eta, &GridParams::new(1e6, 1.05, 4.0))?;
    let pm = compute_partition_modulus(&w, &eta, &grid, Pruning::On)?;
    let ratio = pm.ratio_report((1e3, 1e6), 7)?;
    println!("\nwidth (1 + x)^0.4, same modulus, grid of {} nodes", grid.len());
    println!("{:>12} {:>14} {:>12}", "h", "value", "w(h)/value");
    for row in &ratio.rows {
        println!("{:>12.1} {:>14.3} {:>12.5}", row.h, pm.value(row.h)?, row.ratio);
    }
    println!(
        "ratio decay across the window: {:.4} (about 10^-0.9 over three decades)",
        ratio.end_over_start
    );
    Ok(())
}
