//! Computational models of the local spaces `X(p, q) = {z_0 ... z_p = 1 + u_1 + ... + u_q}`
//! and their SYZ geometry.
//!
//! - [`tropical`]: spine, chambers, amoeba membership and the tailoring deformation
//!   on the base slice.
//! - [`syz`]: the Morse-Bott potential on the tailored hypersurface and a multistart
//!   search for its critical manifolds.
//! - [`skeleton`]: chain-level models of the glued Lagrangian skeleton with integral
//!   homology.
//! - [`bside`]: exact Laurent-polynomial algebra in the coordinate ring of `X(n, m)`.

pub mod bside;
pub mod error;
pub mod fd;
pub mod profile;
pub mod skeleton;
pub mod syz;
pub mod tropical;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use syz::{AmbientPoint, CriticalManifold, HessianReport, ModelShape};
pub use tropical::{BasePoint, ChamberId, Location, TailoringParams, TropicalCell};
