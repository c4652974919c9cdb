//! Polyhedral recession-cone machinery: cones, the projection to the plane,
//! funnel extraction, and the pull-back of the planar counterexample.

pub mod cone;
pub mod funnel;
pub mod hpoly;
pub mod lp;
pub mod project;
pub mod pullback;

/// Ray enumeration and the reduction are dimension-recursive and meant for
/// desk-scale inputs.
pub const MAX_DIM: usize = 6;

pub use cone::{has_full_cone, recession_cone, PolyCone};
pub use funnel::{extract_reduction, FunnelReduction, ReductionCase, StripData};
pub use hpoly::HPolyhedron;
pub use project::{build_projection, verify_projection, LinearMap, ProjectionReport};
pub use pullback::{
    lifted_ray, lifted_triples, lifted_witness, verify_lifted_semiconvexity, LiftedField,
    LiftedTriple,
};
