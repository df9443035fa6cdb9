//! The tailored hypersurface `X(p, q) = {z_0 ... z_p = f_s(u)}`, its SYZ
//! projection, the perturbed potential and a multistart search for the
//! potential's critical manifolds.

mod catalog;
mod chart;
mod hessian;
mod levi;
mod potential;
mod solver;

pub use catalog::{match_catalog, predicted_catalog, CatalogEntry, CatalogMatch, MatchRow};
pub use chart::{project_to_manifold, riemannian_grad, Chart, TangentGradient};
pub use hessian::{tangent_hessian, HessianReport};
pub use levi::{check_kahler_positivity, LeviReport, LeviSampling};
pub use potential::{bump_chi, potential_phi, potential_tilde, ChiValue, PotentialValue};
pub use solver::{find_critical_manifolds, match_tolerance, CriticalManifold, SearchReport, SolverConfig};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tropical::{f_s, TailoringParams};

/// Shape and potential parameters of a local model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelShape {
    /// Number of z-coordinates minus one.
    pub p: usize,
    /// Number of u-coordinates.
    pub q: usize,
    pub params: TailoringParams,
    /// Weight of the bump term in the perturbed potential.
    pub eps_pert: f64,
    /// Support scale of the bump function.
    pub chi_radius: f64,
    /// Tailoring amount; 1 is the fully tailored hypersurface, 0 the original.
    pub s: f64,
}

impl ModelShape {
    /// Shape with default parameters: `eps = 0.5`, `L = 5`, `eps_pert = 1e-2`,
    /// `chi_radius = 0.3`, fully tailored.
    pub fn new(p: usize, q: usize) -> Self {
        ModelShape {
            p,
            q,
            params: TailoringParams::default(),
            eps_pert: 1e-2,
            chi_radius: 0.3,
            s: 1.0,
        }
    }

    pub fn with_s(mut self, s: f64) -> Self {
        self.s = s;
        self
    }

    pub fn with_eps_pert(mut self, eps_pert: f64) -> Self {
        self.eps_pert = eps_pert;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.q == 0 {
            return Err(Error::InvalidParameter {
                name: "q",
                reason: "need at least one u-coordinate".into(),
            });
        }
        if !(self.eps_pert >= 0.0 && self.eps_pert.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "eps_pert",
                reason: format!("must be nonnegative, got {}", self.eps_pert),
            });
        }
        if !(self.chi_radius > 0.0 && self.chi_radius.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "chi_radius",
                reason: format!("must be positive, got {}", self.chi_radius),
            });
        }
        if !(0.0..=1.0).contains(&self.s) {
            return Err(Error::InvalidParameter {
                name: "s",
                reason: format!("must lie in [0, 1], got {}", self.s),
            });
        }
        Ok(())
    }

    /// Real dimension of the ambient space `C^(p+1) x (C^*)^q`.
    pub fn ambient_dim(&self) -> usize {
        2 * (self.p + 1 + self.q)
    }
}

/// A point `(z, u)` of the ambient space together with its constraint
/// residual.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmbientPoint {
    pub z: Vec<Complex64>,
    pub u: Vec<Complex64>,
    /// `|z_0 ... z_p - f_s(u)|` for the shape the point was built against.
    pub residual: f64,
}

impl AmbientPoint {
    pub fn new(z: Vec<Complex64>, u: Vec<Complex64>, shape: &ModelShape) -> Result<Self> {
        check_dims(&z, &u, shape)?;
        let mut pt = AmbientPoint { z, u, residual: 0.0 };
        pt.residual = constraint(&pt, shape)?.norm();
        Ok(pt)
    }

    /// Log-radii of the u-coordinates.
    pub fn xi(&self) -> Vec<f64> {
        self.u.iter().map(|u| u.norm().ln()).collect()
    }
}

fn check_dims(z: &[Complex64], u: &[Complex64], shape: &ModelShape) -> Result<()> {
    if z.len() != shape.p + 1 {
        return Err(Error::DimensionMismatch {
            expected: shape.p + 1,
            got: z.len(),
        });
    }
    if u.len() != shape.q {
        return Err(Error::DimensionMismatch {
            expected: shape.q,
            got: u.len(),
        });
    }
    Ok(())
}

fn check_u(u: &[Complex64]) -> Result<()> {
    match u.iter().position(|x| x.norm() == 0.0) {
        Some(index) => Err(Error::ZeroCoordinate { index }),
        None => Ok(()),
    }
}

/// `z_0 ... z_p - f_s(u)`.
pub fn constraint(pt: &AmbientPoint, shape: &ModelShape) -> Result<Complex64> {
    shape.validate()?;
    check_dims(&pt.z, &pt.u, shape)?;
    check_u(&pt.u)?;
    let prod: Complex64 = pt.z.iter().product();
    Ok(prod - f_s(&pt.u, shape.s, &shape.params)?.value)
}

/// The SYZ map `(|z_0|^2 - |z_i|^2 for i = 1..=p, log|u_j| for j = 1..=q)`.
pub fn project_syz(pt: &AmbientPoint) -> Result<Vec<f64>> {
    check_u(&pt.u)?;
    let r0 = pt.z.first().map_or(0.0, |z| z.norm_sqr());
    let mut out: Vec<f64> = pt.z.iter().skip(1).map(|z| r0 - z.norm_sqr()).collect();
    out.extend(pt.xi());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(z: &[Complex64], u: &[Complex64]) -> AmbientPoint {
        AmbientPoint {
            z: z.to_vec(),
            u: u.to_vec(),
            residual: f64::NAN,
        }
    }

    #[test]
    fn constraint_examples() {
        let s11 = ModelShape::new(1, 1).with_s(0.0);
        let v = constraint(&pt(&[c(1., 0.), c(2., 0.)], &[c(1., 0.)]), &s11).unwrap();
        assert_eq!(v, c(0., 0.));
        let v = constraint(&pt(&[c(0., 0.), c(0., 0.)], &[c(-1., 0.)]), &s11).unwrap();
        assert_eq!(v, c(0., 0.));
        let s12 = ModelShape::new(1, 2).with_s(0.0);
        let v = constraint(&pt(&[c(1., 0.), c(1., 0.)], &[c(1., 0.), c(1., 0.)]), &s12).unwrap();
        assert_eq!(v, c(-2., 0.));
        assert!(matches!(
            constraint(&pt(&[c(1., 0.), c(1., 0.)], &[c(0., 0.)]), &s11),
            Err(Error::ZeroCoordinate { index: 0 })
        ));
    }

    #[test]
    fn syz_projection_examples() {
        let v = project_syz(&pt(&[c(1., 0.), c(1., 0.)], &[c((-5f64).exp(), 0.)])).unwrap();
        assert!((v[0] - 0.0).abs() < 1e-15 && (v[1] + 5.0).abs() < 1e-12);
        let v = project_syz(&pt(&[c(2., 0.), c(1., 0.)], &[c(1., 0.)])).unwrap();
        assert_eq!(v, vec![3.0, 0.0]);
        let v = project_syz(&pt(&[c(0., 0.), c(0., 0.)], &[c(-1., 0.)])).unwrap();
        assert_eq!(v, vec![0.0, 0.0]);
    }

    #[test]
    fn ambient_point_caches_residual() {
        let shape = ModelShape::new(1, 2).with_s(0.0);
        let p = AmbientPoint::new(vec![c(1., 0.), c(1., 0.)], vec![c(1., 0.), c(1., 0.)], &shape).unwrap();
        assert_eq!(p.residual, 2.0);
        assert!(AmbientPoint::new(vec![c(1., 0.)], vec![c(1., 0.)], &shape).is_err());
    }
}
