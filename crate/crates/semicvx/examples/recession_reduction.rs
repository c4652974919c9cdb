//! Recession-cone reduction: from an unbounded polyhedron in R^3 to a
//! planar funnel (or strip), through the cone's extreme rays and a
//! norm-one projection that carries the recession ray to the positive axis.
//!
//! ```bash
//! cargo run --release --example recession_reduction
//! ```

use semicvx::geometry::{
    build_projection, extract_reduction, has_full_cone, recession_cone, verify_projection,
    HPolyhedron, ReductionCase,
};

fn main() -> semicvx::Result<()> {
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
    let p = HPolyhedron::from_rows(&rows, &c, true)?;

    let cone = recession_cone(&p)?;
    println!("recession cone of the 3-D funnel:");
    for g in cone.generators() {
        println!("  extreme ray {:?}", g.as_slice());
    }
    println!("  lineality dimension {}", cone.lineality().len());
    println!("  spans the ambient space: {}", has_full_cone(&p)?);

    let map = build_projection(&p, &cone)?;
    println!("\nprojection to the plane (operator norm {:.12}):", map.operator_norm());
    for i in 0..2 {
        println!("  row {i}: {:?}", map.matrix().row(i).iter().collect::<Vec<_>>());
    }
    let report = verify_projection(&p, &cone, &map, 99, 16, &[1.0, 10.0, 100.0])?;
    println!(
        "verification: generators aligned {}, positive direction {}, ray failures {}/{}",
        report.generators_aligned,
        report.has_positive_direction,
        report.direct_ray_failures,
        report.image_ray_failures
    );

    let red = extract_reduction(&p, &cone, &map, 1000.0, 7, 64)?;
    println!("\ncase: {:?}, shift {:?}", red.case, red.shift);
    if let Some(width) = &red.width {
        println!("extracted funnel width (piecewise affine):");
        for (b, v) in width.breakpoints().iter().zip(width.values()) {
            println!("  width({b:>8.2}) = {v:.4}");
        }
    }
    println!(
        "shifted image inside the funnel on {} samples: {}",
        red.containment.samples,
        if red.containment.pass { "ok" } else { "VIOLATED" }
    );

    // A strip has the backward ray too and is classified, not constructed.
    let strip = HPolyhedron::from_rows(
        &[vec![0.0, 1.0, 0.0], vec![0.0, -1.0, 0.0]],
        &[1.0, 0.0],
        true,
    )?;
    let cone = recession_cone(&strip)?;
    let map = build_projection(&strip, &cone)?;
    let red = extract_reduction(&strip, &cone, &map, 1000.0, 7, 64)?;
    assert_eq!(red.case, ReductionCase::Strip);
    println!(
        "\nthe slab {{0 < y < 1}} in R^3 classifies as {:?}; its witness comes from other work",
        red.case
    );
    Ok(())
}
