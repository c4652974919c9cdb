//! Numerical toolkit for semiconvexity with general moduli on unbounded
//! convex domains.
//!
//! The crate builds, end to end, an explicit function that is semiconvex
//! and semiconcave with a given modulus `w` yet whose gradient admits no
//! modulus `C w` — the obstruction lives on unbounded convex sets that do
//! not contain a translated full-dimensional cone. The pieces:
//!
//! - [`modulus`]: moduli of continuity (power, power-log, linear-over-log,
//!   sampled), structural checkers, the concave majorant, and the scaling
//!   condition that determines whether the construction applies;
//! - [`partition_modulus`]: the partition-infimum modulus of a funnel
//!   domain, computed by dynamic programming over an adaptive grid and
//!   certified by analytic two-sided bounds;
//! - [`envelope`]: upper concave envelopes and their growth inequalities;
//! - [`counterexample`]: the product function `f(x, y) = g(x) y` assembled
//!   from the envelope's dyadic slope profile, plus sampled verifiers for
//!   semiconvexity, Taylor bounds, line moduli, and the divergence witness;
//! - [`geometry`]: recession cones of H-polyhedra, the projection carrying
//!   the recession ray to the plane, funnel extraction, and the pull-back
//!   of the planar counterexample;
//! - [`pipeline`]: the staged runs behind the `semicvx` command-line tool.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --release --example partition_modulus
//! cargo run --release --example concave_envelope
//! cargo run --release --example condition_star
//! cargo run --release --example build_counterexample
//! cargo run --release --example recession_reduction
//! cargo run --release --example full_pipeline
//! ```
//!
//! The CLI mirrors the same stages as subcommands (`omega-eta`, `envelope`,
//! `construct`, `reduce`, `pipeline`), each writing CSV/JSON reports:
//!
//! ```bash
//! cargo run --release -- pipeline --config configs/funnel3d.json --out out/
//! ```

pub mod config;
pub mod counterexample;
pub mod envelope;
pub mod error;
pub mod geometry;
pub mod modulus;
pub mod partition_modulus;
pub mod piecewise;
pub mod pipeline;
pub mod report;
pub mod sample;
pub mod width;

pub use error::{Error, Result};
