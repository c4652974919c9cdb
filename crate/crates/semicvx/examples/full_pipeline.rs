//! End to end: reduce a 3-D polyhedron to its planar funnel, build the
//! counterexample there, pull it back, and verify everything on the
//! original domain. Writes the same reports the CLI `pipeline` subcommand
//! produces.
//!
//! ```bash
//! cargo run --release --example full_pipeline
//! ```

use semicvx::config::PipelineConfig;
use semicvx::pipeline::{self};

fn main() -> semicvx::Result<()> {
    let config_text = r#"{
        "omega": { "kind": "power", "alpha": 0.5 },
        "polyhedron": {
            "A": [[-1.0, 0.0, 0.0],
                  [-1.0, 1.0, 0.0],
                  [-1.0, -1.0, 0.0],
                  [0.0, 1.0, 0.0],
                  [0.0, -1.0, 0.0],
                  [-0.5, 0.0, 1.0],
                  [-0.5, 0.0, -1.0],
                  [0.0, 0.0, 1.0],
                  [0.0, 0.0, -1.0]],
            "c": [0.0, 1.0, 1.0, 6.0, 6.0, 1.0, 1.0, 4.0, 4.0],
            "open": true
        },
        "grid": { "t_max": 20000.0 },
        "verification": { "seed": 42, "triples": 50000 }
    }"#;
    let cfg: PipelineConfig = serde_json::from_str(config_text).expect("valid config");
    cfg.validate()?;

    let run = pipeline::run_pipeline(&cfg)?;
    let construct = run.construct.as_ref().expect("funnel case");

    println!("reduction case: {:?}", run.reduce.reduction.case);
    println!("projection verified: {}", run.reduce.projection.pass);
    println!(
        "planar bundle: a = {}, q = {:.6}, b = {:.3}",
        construct.bundle.base(),
        construct.bundle.aspect(),
        construct.bundle.norm()
    );
    println!("planar semiconvexity: {}", construct.semiconvexity.pass);
    println!(
        "lifted semiconvexity on the polyhedron: {}",
        run.lifted_semiconvexity.as_ref().unwrap().pass
    );
    println!(
        "witness growth, planar {:.3}x vs lifted {:.3}x (ratio {:.6})",
        construct.witness.growth_ratio,
        run.lifted_witness.as_ref().unwrap().growth_ratio,
        run.witness_ratio_vs_planar.unwrap()
    );
    println!("overall: {}", if run.pass() { "PASS" } else { "FAIL" });

    let out = std::env::temp_dir().join("semicvx_full_pipeline");
    let code = pipeline::write_pipeline(&run, &out)?;
    println!("\nreports written to {} (exit code {code})", out.display());
    Ok(())
}
