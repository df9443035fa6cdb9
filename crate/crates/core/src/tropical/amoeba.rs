use num_complex::Complex64;

use super::tailor::{coefficients_slice, TailoringParams};
use super::BasePoint;
use crate::error::{Error, Result};

/// `(sum of all weights but the largest) - largest`. The moduli can close up
/// into a polygon, so that some choice of arguments makes the weighted
/// exponential sum vanish, exactly when this margin is nonnegative.
pub fn polygon_margin(weights: &[f64]) -> f64 {
    let max = weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = weights.iter().sum();
    (sum - max) - max
}

fn pants_weights(xi: &[f64]) -> Vec<f64> {
    std::iter::once(1.0).chain(xi.iter().map(|x| x.exp())).collect()
}

/// Membership of `xi` in the amoeba of `1 + u_1 + ... + u_q`, by the polygon
/// condition on the moduli `(1, e^xi_1, ..., e^xi_q)`.
pub fn amoeba_contains(xi: &BasePoint, tol: f64) -> bool {
    polygon_margin(&pants_weights(xi)) + tol >= 0.0
}

/// Moduli of the tailored polynomial's terms at `xi`: `(c_0, c_1 e^xi_1, ...)`.
pub fn tailored_weights(xi: &BasePoint, params: &TailoringParams) -> Result<Vec<f64>> {
    params.validate()?;
    let c = coefficients_slice(xi, 1.0, params);
    Ok(std::iter::once(c.values[0])
        .chain(xi.iter().zip(&c.values[1..]).map(|(x, c)| c * x.exp()))
        .collect())
}

/// Closed-form membership in the tailored amoeba. The tailoring depends on
/// `|u|` only, so the polygon condition applies to the tailored moduli.
pub fn tailored_amoeba_contains_closed(xi: &BasePoint, params: &TailoringParams, tol: f64) -> Result<bool> {
    Ok(polygon_margin(&tailored_weights(xi, params)?) + tol >= 0.0)
}

/// Minimum over arguments of `|w_0 + sum_k w_k e^{i theta_k}|`: exhaustive
/// search on a `grid_per_dim^q` grid of the torus, then Levenberg-Marquardt
/// descent from the best few grid points.
pub fn min_modulus_oracle(weights: &[f64], grid_per_dim: usize) -> f64 {
    let q = weights.len() - 1;
    if q == 0 {
        return weights[0].abs();
    }
    let n = grid_per_dim;
    let angles: Vec<f64> = (0..n).map(|k| std::f64::consts::TAU * k as f64 / n as f64).collect();
    // tables[d][k] = w_{d+1} e^{i angle_k}
    let tables: Vec<Vec<(f64, f64)>> = weights[1..]
        .iter()
        .map(|&w| angles.iter().map(|a| (w * a.cos(), w * a.sin())).collect())
        .collect();

    const KEEP: usize = 4;
    let mut best: Vec<(f64, Vec<usize>)> = Vec::with_capacity(KEEP + 1);
    let consider = |val: f64, idx: &[usize], best: &mut Vec<(f64, Vec<usize>)>| {
        if best.len() < KEEP || val < best[best.len() - 1].0 {
            let pos = best.partition_point(|(v, _)| *v <= val);
            best.insert(pos, (val, idx.to_vec()));
            best.truncate(KEEP);
        }
    };

    let last = &tables[q - 1];
    let mut outer = vec![0usize; q - 1];
    let mut idx = vec![0usize; q];
    loop {
        let (mut re, mut im) = (weights[0], 0.0);
        for (d, &k) in outer.iter().enumerate() {
            re += tables[d][k].0;
            im += tables[d][k].1;
        }
        let mut local = (f64::INFINITY, 0usize);
        for (k, &(c, s)) in last.iter().enumerate() {
            let (a, b) = (re + c, im + s);
            let v = a * a + b * b;
            if v < local.0 {
                local = (v, k);
            }
        }
        idx[..q - 1].copy_from_slice(&outer);
        idx[q - 1] = local.1;
        consider(local.0, &idx, &mut best);

        let mut d = 0;
        while d < q - 1 {
            outer[d] += 1;
            if outer[d] < n {
                break;
            }
            outer[d] = 0;
            d += 1;
        }
        if d == q - 1 {
            break;
        }
    }

    best.iter()
        .map(|(_, idx)| {
            let theta: Vec<f64> = idx.iter().map(|&k| angles[k]).collect();
            refine(weights, theta)
        })
        .fold(f64::INFINITY, f64::min)
}

fn residual(weights: &[f64], theta: &[f64]) -> Complex64 {
    weights[1..]
        .iter()
        .zip(theta)
        .fold(Complex64::new(weights[0], 0.0), |acc, (&w, &t)| acc + Complex64::from_polar(w, t))
}

/// Levenberg-Marquardt on the map `theta -> F(theta)` in R^2.
fn refine(weights: &[f64], mut theta: Vec<f64>) -> f64 {
    let scale: f64 = weights.iter().sum();
    let mut f = residual(weights, &theta);
    let mut mu = 1e-3 * scale * scale;
    for _ in 0..300 {
        if f.norm() <= 1e-15 * scale {
            break;
        }
        // columns d F / d theta_k = i w_k e^{i theta_k}
        let cols: Vec<(f64, f64)> = weights[1..]
            .iter()
            .zip(&theta)
            .map(|(&w, &t)| (-w * t.sin(), w * t.cos()))
            .collect();
        let (mut a, mut b, mut c) = (mu, 0.0, mu);
        for &(x, y) in &cols {
            a += x * x;
            b += x * y;
            c += y * y;
        }
        let det = a * c - b * b;
        let y0 = (c * f.re - b * f.im) / det;
        let y1 = (a * f.im - b * f.re) / det;
        let trial: Vec<f64> = theta
            .iter()
            .zip(&cols)
            .map(|(t, &(x, y))| t - (x * y0 + y * y1))
            .collect();
        let ft = residual(weights, &trial);
        if ft.norm() < f.norm() {
            theta = trial;
            f = ft;
            mu = (mu / 3.0).max(1e-300);
        } else {
            mu *= 4.0;
            if mu > 1e20 * scale * scale {
                break;
            }
        }
    }
    f.norm()
}

fn check_grid(grid_per_dim: usize) -> Result<()> {
    if grid_per_dim < 8 {
        return Err(Error::InvalidParameter {
            name: "grid_per_dim",
            reason: format!("need at least 8 grid points per dimension, got {grid_per_dim}"),
        });
    }
    Ok(())
}

/// Argument-search oracle for [`amoeba_contains`]: `true` iff the minimum of
/// `|1 + sum_j e^{xi_j + i theta_j}|` found by grid search plus local descent
/// is below `tol`.
pub fn amoeba_contains_oracle(xi: &BasePoint, grid_per_dim: usize, tol: f64) -> Result<bool> {
    check_grid(grid_per_dim)?;
    Ok(min_modulus_oracle(&pants_weights(xi), grid_per_dim) < tol)
}

/// Argument search for a zero of the fully tailored polynomial `f_1` on the
/// torus `|u_j| = e^{xi_j}`.
pub fn tailored_amoeba_contains(
    xi: &BasePoint,
    params: &TailoringParams,
    grid_per_dim: usize,
    tol: f64,
) -> Result<bool> {
    check_grid(grid_per_dim)?;
    Ok(min_modulus_oracle(&tailored_weights(xi, params)?, grid_per_dim) < tol)
}
