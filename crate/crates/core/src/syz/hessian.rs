//! Second-order classification of constrained critical points.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::chart::{eval_log_polar, multipliers, tangent_basis, to_chart, Chart};
use super::{check_dims, check_u, AmbientPoint, ModelShape};
use crate::error::Result;
use crate::fd::central_jacobian;

/// Spectrum of the constrained Hessian with its signature.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HessianReport {
    /// Eigenvalues in increasing order.
    pub eigenvalues: Vec<f64>,
    pub neg_count: usize,
    pub zero_count: usize,
    pub pos_count: usize,
    /// Absolute threshold below which an eigenvalue counts as zero.
    pub zero_threshold: f64,
    /// Whether the counts survive halving the threshold.
    pub stable: bool,
}

impl HessianReport {
    /// Classifies `eigenvalues` with threshold `rel * max |eigenvalue|`.
    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>, rel: f64) -> Self {
        eigenvalues.sort_by(f64::total_cmp);
        let scale = eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let zero_threshold = rel * scale;
        let count = |thr: f64| {
            let neg = eigenvalues.iter().filter(|&&v| v < -thr).count();
            let pos = eigenvalues.iter().filter(|&&v| v > thr).count();
            (neg, eigenvalues.len() - neg - pos, pos)
        };
        let (neg_count, zero_count, pos_count) = count(zero_threshold);
        let stable = count(0.5 * zero_threshold) == (neg_count, zero_count, pos_count);
        HessianReport {
            eigenvalues,
            neg_count,
            zero_count,
            pos_count,
            zero_threshold,
            stable,
        }
    }

    pub fn signature(&self) -> (usize, usize, usize) {
        (self.neg_count, self.zero_count, self.pos_count)
    }
}

/// Hessian of the perturbed potential restricted to the constraint manifold
/// at a critical point, computed as the Hessian of the Lagrangian
/// `phi~ - lambda . c` on the tangent space, in the log-polar chart.
///
/// Second derivatives are central differences of the analytic gradients.
pub fn tangent_hessian(pt: &AmbientPoint, shape: &ModelShape, rel_zero: f64) -> Result<HessianReport> {
    shape.validate()?;
    check_dims(&pt.z, &pt.u, shape)?;
    check_u(&pt.u)?;
    let x = to_chart(pt, Chart::LogPolar);
    let eigenvalues = tangent_hessian_eigenvalues(&x, shape)?;
    Ok(HessianReport::from_eigenvalues(eigenvalues, rel_zero))
}

pub(crate) fn tangent_hessian_eigenvalues(x: &[f64], shape: &ModelShape) -> Result<Vec<f64>> {
    let local = eval_log_polar(x, shape, true);
    let lam = multipliers(&local)?;
    let lagrangian_grad = |y: &[f64]| -> Vec<f64> {
        let l = eval_log_polar(y, shape, true);
        (0..y.len())
            .map(|k| l.grad[k] - lam[0] * l.jac[0][k] - lam[1] * l.jac[1][k])
            .collect()
    };
    let n = x.len();
    let rows = central_jacobian(lagrangian_grad, x, 1e-5);
    let h = DMatrix::from_fn(n, n, |i, j| 0.5 * (rows[i][j] + rows[j][i]));
    let b = tangent_basis(&local.jac);
    let ht = b.transpose() * h * &b;
    let ht = 0.5 * (&ht + ht.transpose());
    Ok(SymmetricEigen::new(ht).eigenvalues.iter().copied().collect())
}
