//! Tropical geometry of the SYZ base slice `{eta = 0}`, which is identified
//! with R^q through the log-radii `xi_j = log|u_j|`.
//!
//! The tropical hypersurface of `1 + u_1 + ... + u_q` is the corner locus of
//! `max(0, xi_1, ..., xi_q)`. Its complement has `q + 1` chambers; chamber `i`
//! is where the `i`-th monomial dominates, with index 0 standing for the
//! constant term (the all-negative orthant).

mod amoeba;
mod cone;
mod tailor;

pub use amoeba::{
    amoeba_contains, amoeba_contains_oracle, min_modulus_oracle, polygon_margin,
    tailored_amoeba_contains, tailored_amoeba_contains_closed, tailored_weights,
};
pub use cone::{distance_to_chamber, project_to_chamber, ChamberProjection};
pub use tailor::{
    boundary_point_on_diagonal, f_s, psi, tailoring_coefficients, FsValue, PsiValue,
    TailoringCoefficients, TailoringParams, PSI_RAMP_BLEND,
};

pub(crate) use tailor::coefficients_slice as tailor_coefficients_slice;

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the base slice, in log-radius coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasePoint(Vec<f64>);

impl BasePoint {
    pub fn new(xi: Vec<f64>) -> Result<Self> {
        if xi.is_empty() {
            return Err(Error::InvalidParameter {
                name: "xi",
                reason: "base point needs at least one coordinate".into(),
            });
        }
        if let Some(bad) = xi.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "xi",
                reason: format!("coordinate {bad} is not finite"),
            });
        }
        Ok(BasePoint(xi))
    }

    /// The point `(t, ..., t)` in R^q.
    pub fn diagonal(q: usize, t: f64) -> Result<Self> {
        BasePoint::new(vec![t; q])
    }

    pub fn q(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for BasePoint {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Index of a complementary chamber: 0 for the constant term, `i >= 1` for `u_i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChamberId(pub usize);

impl fmt::Display for ChamberId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C_{}", self.0)
    }
}

/// A cell of the tropical hypersurface: the set where the affine forms indexed
/// by `tie_set` agree and dominate all others.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TropicalCell {
    tie_set: Vec<usize>,
    dim: usize,
}

impl TropicalCell {
    pub fn new(mut tie_set: Vec<usize>, q: usize) -> Result<Self> {
        tie_set.sort_unstable();
        tie_set.dedup();
        if tie_set.len() < 2 {
            return Err(Error::InvalidParameter {
                name: "tie_set",
                reason: "a spine cell needs at least two tied forms".into(),
            });
        }
        if tie_set.iter().any(|&i| i > q) {
            return Err(Error::InvalidParameter {
                name: "tie_set",
                reason: format!("indices must lie in 0..={q}"),
            });
        }
        let dim = q + 1 - tie_set.len();
        Ok(TropicalCell { tie_set, dim })
    }

    pub fn tie_set(&self) -> &[usize] {
        &self.tie_set
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Result of locating a base point relative to the tropical hypersurface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Location {
    Chamber(ChamberId),
    Cell(TropicalCell),
}

/// The affine forms `(0, xi_1, ..., xi_q)` whose maximum defines the spine.
fn forms(xi: &[f64]) -> impl Iterator<Item = f64> + '_ {
    std::iter::once(0.0).chain(xi.iter().copied())
}

/// Locates `xi` in a chamber, or on the spine cell of all forms within `tol`
/// of the maximum. Ties never resolve to a chamber.
pub fn classify_chamber(xi: &BasePoint, tol: f64) -> Result<Location> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: "must be positive".into(),
        });
    }
    let max = forms(xi).fold(f64::NEG_INFINITY, f64::max);
    let near: Vec<usize> = forms(xi)
        .enumerate()
        .filter(|&(_, v)| max - v <= tol)
        .map(|(i, _)| i)
        .collect();
    if near.len() == 1 {
        Ok(Location::Chamber(ChamberId(near[0])))
    } else {
        Ok(Location::Cell(TropicalCell::new(near, xi.q())?))
    }
}

/// All cells of the tropical hypersurface of `1 + u_1 + ... + u_q`, ordered by
/// dimension (descending) and then lexicographically by tie set.
pub fn enumerate_spine_cells(q: usize) -> Result<Vec<TropicalCell>> {
    if q == 0 {
        return Err(Error::InvalidParameter {
            name: "q",
            reason: "need at least one u-coordinate".into(),
        });
    }
    let mut cells = Vec::with_capacity((1usize << (q + 1)) - q - 2);
    for mask in 0u64..(1u64 << (q + 1)) {
        if mask.count_ones() < 2 {
            continue;
        }
        let tie_set = (0..=q).filter(|&i| mask >> i & 1 == 1).collect();
        cells.push(TropicalCell::new(tie_set, q)?);
    }
    cells.sort_by(|a, b| b.dim.cmp(&a.dim).then_with(|| a.tie_set.cmp(&b.tie_set)));
    Ok(cells)
}
