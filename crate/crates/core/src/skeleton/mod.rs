//! Chain-level models of the glued Lagrangian skeleton and their integral
//! homology.

mod complex;
mod homology;
mod matrix;
mod models;
mod snf;

pub use complex::{direct_sum, mapping_cone, tensor, ChainComplex, ChainMap};
pub use homology::{exact_at, homology, HomologyGroup, HomologyTable};
pub use matrix::{BigMatrix, IntMatrix};
pub use models::{
    fltz_boundary_chain, fltz_chain, glued_skeleton, lsing_chain, mayer_vietoris, summarize, torus_chain,
    GluedSkeleton, MayerVietorisReport, SkeletonSpec, SkeletonSummary,
};
pub use snf::{smith_normal_form, SmithForm};

/// Alternating sum of generator counts.
pub fn euler_characteristic(cc: &ChainComplex) -> i64 {
    cc.euler_characteristic()
}
