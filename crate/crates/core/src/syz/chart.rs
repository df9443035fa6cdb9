//! Coordinates on the ambient space, the constraint differential, and the
//! constrained (Riemannian) gradient of the perturbed potential.
//!
//! Two real charts are used. `Cartesian` takes real and imaginary parts of
//! every coordinate. `LogPolar` keeps Cartesian z-coordinates but writes
//! `u_j = exp(xi_j + i theta_j)`; it is the chart the solver works in, since
//! the potential is quadratic in `xi` and the u-coordinates span many orders
//! of magnitude near the base torus.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::potential::z_part;
use super::{check_dims, check_u, potential_tilde, AmbientPoint, ModelShape};
use crate::error::{Error, Result};
use crate::tropical::{f_s, tailor_coefficients_slice};

/// Smallest singular value of the constraint differential below which it is
/// treated as rank deficient.
const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Chart {
    Cartesian,
    LogPolar,
}

/// Gradient of the perturbed potential along the constraint manifold,
/// expressed in `chart`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentGradient {
    pub chart: Chart,
    pub vector: Vec<f64>,
    pub norm: f64,
}

/// Potential, constraint and their first derivatives at a chart point.
pub(crate) struct Local {
    #[cfg_attr(not(test), allow(dead_code))]
    pub value: f64,
    pub grad: Vec<f64>,
    pub c: Complex64,
    /// Real and imaginary rows of the constraint differential.
    pub jac: [Vec<f64>; 2],
    /// `f_s(u)` at the point.
    pub f: Complex64,
}

pub(crate) fn to_chart(pt: &AmbientPoint, chart: Chart) -> Vec<f64> {
    let mut x = Vec::with_capacity(2 * (pt.z.len() + pt.u.len()));
    for z in &pt.z {
        x.push(z.re);
        x.push(z.im);
    }
    for u in &pt.u {
        match chart {
            Chart::Cartesian => {
                x.push(u.re);
                x.push(u.im);
            }
            Chart::LogPolar => {
                x.push(u.norm().ln());
                x.push(u.arg());
            }
        }
    }
    x
}

pub(crate) fn split(x: &[f64], p: usize, chart: Chart) -> (Vec<Complex64>, Vec<Complex64>) {
    let nz = 2 * (p + 1);
    let z = x[..nz].chunks(2).map(|w| Complex64::new(w[0], w[1])).collect();
    let u = x[nz..]
        .chunks(2)
        .map(|w| match chart {
            Chart::Cartesian => Complex64::new(w[0], w[1]),
            Chart::LogPolar => Complex64::from_polar(w[0].exp(), w[1]),
        })
        .collect();
    (z, u)
}

/// Builds the ambient point for a chart vector, caching its residual.
pub(crate) fn from_chart(x: &[f64], shape: &ModelShape, chart: Chart) -> AmbientPoint {
    let (z, u) = split(x, shape.p, chart);
    let residual = (z.iter().product::<Complex64>() - eval_f(&u, shape)).norm();
    AmbientPoint { z, u, residual }
}

fn eval_f(u: &[Complex64], shape: &ModelShape) -> Complex64 {
    let xi: Vec<f64> = u.iter().map(|w| w.norm().ln()).collect();
    let c = tailor_coefficients_slice(&xi, shape.s, &shape.params);
    c.values[0] + (0..u.len()).map(|k| c.values[k + 1] * u[k]).sum::<Complex64>()
}

/// Products `prod_{k != i} z_k` for every `i`.
fn partial_products(z: &[Complex64]) -> Vec<Complex64> {
    (0..z.len())
        .map(|i| {
            z.iter()
                .enumerate()
                .filter(|&(k, _)| k != i)
                .map(|(_, w)| *w)
                .product()
        })
        .collect()
}

/// Evaluates potential and constraint in the log-polar chart. With
/// `want_potential = false` only the constraint part is filled in.
pub(crate) fn eval_log_polar(x: &[f64], shape: &ModelShape, want_potential: bool) -> Local {
    let p = shape.p;
    let q = shape.q;
    let nz = 2 * (p + 1);
    let (z, u) = split(x, p, Chart::LogPolar);
    let xi: Vec<f64> = (0..q).map(|j| x[nz + 2 * j]).collect();
    let coeffs = tailor_coefficients_slice(&xi, shape.s, &shape.params);

    let mut f = Complex64::new(coeffs.values[0], 0.0);
    for k in 0..q {
        f += coeffs.values[k + 1] * u[k];
    }
    let prod: Complex64 = z.iter().product();
    let c = prod - f;

    let n = x.len();
    let mut jre = vec![0.0; n];
    let mut jim = vec![0.0; n];
    for (i, pp) in partial_products(&z).into_iter().enumerate() {
        // d/dRe z_i = P_i, d/dIm z_i = i P_i
        jre[2 * i] = pp.re;
        jim[2 * i] = pp.im;
        jre[2 * i + 1] = -pp.im;
        jim[2 * i + 1] = pp.re;
    }
    for j in 0..q {
        let mut df_dxi = Complex64::new(coeffs.grad[0][j], 0.0) + coeffs.values[j + 1] * u[j];
        for k in 0..q {
            df_dxi += coeffs.grad[k + 1][j] * u[k];
        }
        let df_dtheta = Complex64::i() * coeffs.values[j + 1] * u[j];
        jre[nz + 2 * j] = -df_dxi.re;
        jim[nz + 2 * j] = -df_dxi.im;
        jre[nz + 2 * j + 1] = -df_dtheta.re;
        jim[nz + 2 * j + 1] = -df_dtheta.im;
    }

    let (value, grad) = if want_potential {
        let (mut value, mut grad) = z_part(&z, shape, true);
        grad.resize(n, 0.0);
        for j in 0..q {
            let d = xi[j] + shape.params.l;
            value += d * d;
            grad[nz + 2 * j] = 2.0 * d;
        }
        (value, grad)
    } else {
        (f64::NAN, Vec::new())
    };
    Local {
        value,
        grad,
        c,
        jac: [jre, jim],
        f,
    }
}

fn eval_cartesian(x: &[f64], shape: &ModelShape) -> Result<Local> {
    let pt = from_chart(x, shape, Chart::Cartesian);
    let pot = potential_tilde(&pt, shape)?;
    let fv = f_s(&pt.u, shape.s, &shape.params)?;
    let prod: Complex64 = pt.z.iter().product();
    let nz = 2 * (shape.p + 1);
    let n = x.len();
    let mut jre = vec![0.0; n];
    let mut jim = vec![0.0; n];
    for (i, pp) in partial_products(&pt.z).into_iter().enumerate() {
        jre[2 * i] = pp.re;
        jim[2 * i] = pp.im;
        jre[2 * i + 1] = -pp.im;
        jim[2 * i + 1] = pp.re;
    }
    for j in 0..shape.q {
        let da = -(fv.d_du[j] + fv.d_dubar[j]);
        let db = -Complex64::i() * (fv.d_du[j] - fv.d_dubar[j]);
        jre[nz + 2 * j] = da.re;
        jim[nz + 2 * j] = da.im;
        jre[nz + 2 * j + 1] = db.re;
        jim[nz + 2 * j + 1] = db.im;
    }
    Ok(Local {
        value: pot.value,
        grad: pot.gradient,
        c: prod - fv.value,
        jac: [jre, jim],
        f: fv.value,
    })
}

pub(crate) fn eval(x: &[f64], shape: &ModelShape, chart: Chart) -> Result<Local> {
    match chart {
        Chart::LogPolar => Ok(eval_log_polar(x, shape, true)),
        Chart::Cartesian => eval_cartesian(x, shape),
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram matrix `J J^T` of the constraint differential and its smallest
/// singular value.
fn gram(jac: &[Vec<f64>; 2]) -> (Matrix2<f64>, f64) {
    let g = Matrix2::new(
        dot(&jac[0], &jac[0]),
        dot(&jac[0], &jac[1]),
        dot(&jac[1], &jac[0]),
        dot(&jac[1], &jac[1]),
    );
    let tr = g.trace();
    let det = g.determinant();
    let disc = (0.25 * tr * tr - det).max(0.0).sqrt();
    let lam_min = (0.5 * tr - disc).max(0.0);
    (g, lam_min.sqrt())
}

/// Multipliers `lambda` with `grad - J^T lambda` orthogonal to the rows of `J`.
pub(crate) fn multipliers(local: &Local) -> Result<[f64; 2]> {
    let (g, sigma_min) = gram(&local.jac);
    if sigma_min < RANK_TOL {
        return Err(Error::RankDeficient { sigma_min });
    }
    let rhs = Vector2::new(dot(&local.jac[0], &local.grad), dot(&local.jac[1], &local.grad));
    let lam = g.try_inverse().ok_or(Error::RankDeficient { sigma_min })? * rhs;
    Ok([lam[0], lam[1]])
}

/// Projection of the potential gradient onto `ker J`.
pub(crate) fn tangent_gradient(local: &Local) -> Result<Vec<f64>> {
    let lam = multipliers(local)?;
    Ok(local
        .grad
        .iter()
        .enumerate()
        .map(|(k, g)| g - lam[0] * local.jac[0][k] - lam[1] * local.jac[1][k])
        .collect())
}

/// Gradient of the perturbed potential orthogonally projected onto the kernel
/// of the real constraint differential, in the flat metric of `chart`.
///
/// The point is assumed to lie on the constraint manifold (see
/// [`project_to_manifold`]).
pub fn riemannian_grad(pt: &AmbientPoint, shape: &ModelShape, chart: Chart) -> Result<TangentGradient> {
    shape.validate()?;
    check_dims(&pt.z, &pt.u, shape)?;
    check_u(&pt.u)?;
    let x = to_chart(pt, chart);
    let local = eval(&x, shape, chart)?;
    let vector = tangent_gradient(&local)?;
    let norm = dot(&vector, &vector).sqrt();
    Ok(TangentGradient { chart, vector, norm })
}

fn wrap_angles(x: &mut [f64], nz: usize) {
    for k in (nz + 1..x.len()).step_by(2) {
        let t = x[k];
        if !(-std::f64::consts::PI..=std::f64::consts::PI).contains(&t) {
            x[k] = t - 2.0 * std::f64::consts::PI * (t / (2.0 * std::f64::consts::PI)).round();
        }
    }
}

/// Moves a log-polar chart point onto `{z_0 ... z_p = f_s(u)}` by minimum-norm
/// Newton corrections, falling back to solving for the largest z-coordinate
/// when the differential degenerates.
pub(crate) fn project_chart(x: &[f64], shape: &ModelShape) -> Result<Vec<f64>> {
    let nz = 2 * (shape.p + 1);
    let mut y = x.to_vec();
    wrap_angles(&mut y, nz);
    for _ in 0..60 {
        let local = eval_log_polar(&y, shape, false);
        let scale = 1.0 + local.f.norm();
        if local.c.norm() <= 1e-13 * scale {
            return Ok(y);
        }
        let (g, sigma_min) = gram(&local.jac);
        if sigma_min < RANK_TOL {
            break;
        }
        let Some(inv) = g.try_inverse() else { break };
        let lam = inv * Vector2::new(local.c.re, local.c.im);
        let mut step: Vec<f64> = (0..y.len())
            .map(|k| lam[0] * local.jac[0][k] + lam[1] * local.jac[1][k])
            .collect();
        let len = dot(&step, &step).sqrt();
        if len > 0.5 {
            step.iter_mut().for_each(|s| *s *= 0.5 / len);
        }
        for (a, s) in y.iter_mut().zip(&step) {
            *a -= s;
        }
        if y.iter().any(|v| !v.is_finite()) {
            break;
        }
    }
    // Solve for the z-coordinate of largest modulus, holding the rest fixed.
    let mut y = x.to_vec();
    wrap_angles(&mut y, nz);
    let (z, u) = split(&y, shape.p, Chart::LogPolar);
    let f = eval_f(&u, shape);
    let k = (0..z.len())
        .max_by(|&a, &b| z[a].norm().total_cmp(&z[b].norm()))
        .unwrap_or(0);
    let others: Complex64 = z.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, w)| *w).product();
    if others.norm() > 1e-150 {
        let zk = f / others;
        y[2 * k] = zk.re;
        y[2 * k + 1] = zk.im;
        let local = eval_log_polar(&y, shape, false);
        if local.c.norm() <= 1e-9 * (1.0 + local.f.norm()) {
            return Ok(y);
        }
    }
    let residual = eval_log_polar(x, shape, false).c.norm();
    Err(Error::ProjectionFailed { residual })
}

/// Projects an ambient point onto the constraint manifold.
pub fn project_to_manifold(pt: &AmbientPoint, shape: &ModelShape) -> Result<AmbientPoint> {
    shape.validate()?;
    check_dims(&pt.z, &pt.u, shape)?;
    check_u(&pt.u)?;
    let x = project_chart(&to_chart(pt, Chart::LogPolar), shape)?;
    Ok(from_chart(&x, shape, Chart::LogPolar))
}

/// Orthonormal basis of `ker J` as the columns of an `n x (n - 2)` matrix.
pub(crate) fn tangent_basis(jac: &[Vec<f64>; 2]) -> DMatrix<f64> {
    let n = jac[0].len();
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(n);
    for row in jac {
        let mut v = DVector::from_column_slice(row);
        for b in &basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        let norm = v.norm();
        if norm > RANK_TOL {
            basis.push(v / norm);
        }
    }
    let rows = basis.len();
    for k in 0..n {
        let mut v = DVector::zeros(n);
        v[k] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let c = b.dot(&v);
                v -= b * c;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            basis.push(v / norm);
        }
        if basis.len() == n {
            break;
        }
    }
    DMatrix::from_columns(&basis[rows..])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fd::central_gradient;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_chart_point(rng: &mut ChaCha8Rng, shape: &ModelShape) -> Vec<f64> {
        let nz = 2 * (shape.p + 1);
        let mut x = Vec::new();
        for _ in 0..nz {
            x.push(rng.gen_range(-1.2..1.2));
        }
        for _ in 0..shape.q {
            x.push(rng.gen_range(-shape.params.l - 1.0..1.0));
            x.push(rng.gen_range(-3.1..3.1));
        }
        x
    }

    #[test]
    fn log_polar_jacobian_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..100 {
            let shape = ModelShape::new(trial % 3, 1 + trial % 3);
            let x = random_chart_point(&mut rng, &shape);
            let local = eval_log_polar(&x, &shape, true);
            for (r, row) in local.jac.iter().enumerate() {
                let fd = central_gradient(
                    |y| {
                        let c = eval_log_polar(y, &shape, false).c;
                        if r == 0 {
                            c.re
                        } else {
                            c.im
                        }
                    },
                    &x,
                    1e-6,
                );
                let err = crate::fd::rel_err(row, &fd);
                assert!(err < 1e-6, "trial {trial} row {r}: {err}");
            }
            let fd = central_gradient(|y| eval_log_polar(y, &shape, true).value, &x, 1e-5);
            assert!(crate::fd::rel_err(&local.grad, &fd) < 1e-6);
        }
    }

    #[test]
    fn cartesian_jacobian_matches_central_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for trial in 0..60 {
            let shape = ModelShape::new(trial % 2, 1 + trial % 2);
            let xl = random_chart_point(&mut rng, &shape);
            let pt = from_chart(&xl, &shape, Chart::LogPolar);
            let x = to_chart(&pt, Chart::Cartesian);
            let local = eval_cartesian(&x, &shape).unwrap();
            for (r, row) in local.jac.iter().enumerate() {
                let h = 1e-7;
                let fd = central_gradient(
                    |y| {
                        let c = eval_cartesian(y, &shape).unwrap().c;
                        if r == 0 {
                            c.re
                        } else {
                            c.im
                        }
                    },
                    &x,
                    h,
                );
                let err = crate::fd::rel_err(row, &fd);
                assert!(err < 1e-5, "trial {trial} row {r}: {err}");
            }
        }
    }

    #[test]
    fn projection_lands_on_manifold() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for trial in 0..200 {
            let shape = ModelShape::new(trial % 3, 1 + trial % 3);
            let x = random_chart_point(&mut rng, &shape);
            let y = project_chart(&x, &shape).unwrap();
            let pt = from_chart(&y, &shape, Chart::LogPolar);
            assert!(pt.residual <= 1e-9, "residual {}", pt.residual);
        }
    }

    #[test]
    fn gradient_vanishes_on_base_torus() {
        for (p, q) in [(0, 1), (1, 1), (1, 2), (2, 2)] {
            let shape = ModelShape::new(p, q);
            let l = shape.params.l;
            let z = (0..=p).map(|i| Complex64::from_polar(1.0, 0.3 * i as f64)).collect();
            let u = (0..q).map(|j| Complex64::from_polar((-l).exp(), 1.0 + j as f64)).collect();
            let pt = project_to_manifold(&AmbientPoint { z, u, residual: f64::NAN }, &shape).unwrap();
            for chart in [Chart::LogPolar, Chart::Cartesian] {
                let g = riemannian_grad(&pt, &shape, chart).unwrap();
                assert!(g.norm < 1e-9, "{p} {q} {chart:?}: {}", g.norm);
            }
        }
    }

    #[test]
    fn riemannian_gradient_gives_directional_derivatives() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for trial in 0..100 {
            let shape = ModelShape::new(trial % 3, 1 + trial % 2);
            let x = project_chart(&random_chart_point(&mut rng, &shape), &shape).unwrap();
            let local = eval_log_polar(&x, &shape, true);
            let g = tangent_gradient(&local).unwrap();
            let gnorm = dot(&g, &g).sqrt();
            assert!(gnorm > 0.0);
            let b = tangent_basis(&local.jac);
            let coeffs: Vec<f64> = (0..b.ncols()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v: Vec<f64> = (0..x.len())
                .map(|k| (0..b.ncols()).map(|c| b[(k, c)] * coeffs[c]).sum())
                .collect();
            let phi_along = |t: f64| {
                let y: Vec<f64> = x.iter().zip(&v).map(|(a, d)| a + t * d).collect();
                let y = project_chart(&y, &shape).unwrap();
                eval_log_polar(&y, &shape, true).value
            };
            let h = 1e-5;
            let fd = (phi_along(h) - phi_along(-h)) / (2.0 * h);
            let exact = dot(&g, &v);
            assert!(
                (fd - exact).abs() <= 1e-6 * exact.abs().max(1.0),
                "trial {trial}: fd {fd} exact {exact}"
            );
        }
    }
}
