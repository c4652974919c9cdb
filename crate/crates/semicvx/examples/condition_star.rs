//! The scaling condition that separates moduli admitting the counterexample
//! from those that do not:
//!
//! ```text
//! inf_n ( liminf_{h -> inf} w(h) / (n w(h/n)) ) = 0
//! ```
//!
//! Power moduli with exponent below 1 satisfy it (the per-n ratio is
//! n^(alpha-1)); the linear and linear-over-log moduli do not.
//!
//! ```bash
//! cargo run --release --example condition_star
//! ```

use semicvx::modulus::{condition_star_estimate, ModulusSpec};

fn main() -> semicvx::Result<()> {
    let cases = [
        ("power 0.5", ModulusSpec::power(0.5)?, (1e3, 1e6)),
        ("power 0.9", ModulusSpec::power(0.9)?, (1e3, 1e6)),
        ("power 1.0 (linear)", ModulusSpec::power(1.0)?, (1e3, 1e6)),
        ("power-log a=0.5 b=1", ModulusSpec::power_log(0.5, 1.0)?, (1e3, 1e6)),
        ("linear-over-log b=1", ModulusSpec::linear_over_log(1.0)?, (1e3, 1e9)),
    ];
    for (name, w, window) in cases {
        let rep = condition_star_estimate(&w, 64, window, 48, 0.05)?;
        println!("{name:<22} infimum {:>10.6}  verdict {:?}", rep.infimum_estimate, rep.verdict);
        print!("  per-n minima: ");
        for n in [2u32, 4, 8, 16, 64] {
            let est = rep.per_n.iter().find(|(m, _)| *m == n).unwrap().1;
            print!("n={n}: {est:.4}  ");
        }
        println!();
    }
    println!("\n(power 0.5 reaches Holds with a larger n budget: 512^-0.5 < 0.05)");
    let rep = condition_star_estimate(&ModulusSpec::power(0.5)?, 512, (1e3, 1e6), 48, 0.05)?;
    println!("power 0.5, n_max = 512: infimum {:.6}, verdict {:?}", rep.infimum_estimate, rep.verdict);
    Ok(())
}
