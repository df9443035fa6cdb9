//! The potential `phi = sum_i eta_i^2 + sum_j (xi_j + L)^2` and its
//! perturbation `phi~ = phi + eps_pert * chi(z) * sum_i |z_i|^2`.
//!
//! Gradients are with respect to the real coordinates
//! `(Re z_0, Im z_0, ..., Re z_p, Im z_p, Re u_1, Im u_1, ..., Re u_q, Im u_q)`.

use num_complex::Complex64;

use super::{check_dims, check_u, AmbientPoint, ModelShape};
use crate::error::Result;
use crate::profile::quintic;

/// Exponent `k` of the soft pairwise minimum below.
const SOFT_POWER: i32 = 8;

/// Value and real gradient of a potential.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialValue {
    pub value: f64,
    pub gradient: Vec<f64>,
}

/// Value and real gradient (in the z-coordinates) of the bump function.
#[derive(Clone, Debug, PartialEq)]
pub struct ChiValue {
    pub value: f64,
    pub gradient: Vec<f64>,
}

/// Bump function that is 1 near the locus where two of the `z_i` vanish.
///
/// The second-smallest modulus is replaced by a smooth symmetric surrogate,
/// a soft minimum over pairs of the soft maximum within each pair:
/// `m = (sum_{i<j} 1 / (r_i^2k + r_j^2k))^(-1/2k)` with `r_i = |z_i| / rho`.
/// It satisfies `m2 / N^(1/2k) <= m <= 2^(1/2k) m2` for `N` pairs, and the
/// transition window is placed so that `chi = 1` whenever the two smallest
/// moduli are below `rho/2` and `chi = 0` whenever the second-smallest exceeds
/// `rho`. Unlike the exact second-smallest modulus, the surrogate stays smooth
/// where moduli tie, in particular along `eta = 0`. With one z-coordinate the
/// locus is empty and `chi = 0`.
pub fn bump_chi(z: &[Complex64], shape: &ModelShape) -> ChiValue {
    chi(z, shape.chi_radius)
}

pub(crate) fn chi(z: &[Complex64], rho: f64) -> ChiValue {
    let n = z.len();
    let mut gradient = vec![0.0; 2 * n];
    if n < 2 {
        return ChiValue { value: 0.0, gradient };
    }
    let k = SOFT_POWER;
    let pairs = (n * (n - 1) / 2) as f64;
    let lo = 0.5 * 2f64.powf(1.0 / (2 * k) as f64);
    let hi = pairs.powf(-1.0 / (2 * k) as f64);

    let s: Vec<f64> = z.iter().map(|w| w.norm_sqr() / (rho * rho)).collect();
    let a: Vec<f64> = s.iter().map(|x| x.powi(k)).collect();
    let mut q_sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            let p = a[i] + a[j];
            if p < 1e-150 {
                return ChiValue { value: 1.0, gradient };
            }
            q_sum += 1.0 / p;
        }
    }
    if q_sum == 0.0 {
        return ChiValue { value: 0.0, gradient };
    }
    let m = q_sum.powf(-1.0 / (2 * k) as f64);
    let t = (m - lo) / (hi - lo);
    let (sv, ds) = quintic(t);
    let value = 1.0 - sv;
    if ds != 0.0 {
        let dchi_dm = -ds / (hi - lo);
        for i in 0..n {
            let mut acc = 0.0;
            for j in 0..n {
                if j != i {
                    let p = a[i] + a[j];
                    acc += 1.0 / (p * p);
                }
            }
            // dm/ds_i = m / (2 Q) * s_i^(k-1) * sum_j 1/P_ij^2
            let dm_ds = 0.5 * m / q_sum * s[i].powi(k - 1) * acc;
            let ds_dx = 2.0 / (rho * rho);
            gradient[2 * i] = dchi_dm * dm_ds * ds_dx * z[i].re;
            gradient[2 * i + 1] = dchi_dm * dm_ds * ds_dx * z[i].im;
        }
    }
    ChiValue { value, gradient }
}

/// The z-dependent part `sum_i eta_i^2 + eps_pert chi sum |z_i|^2` and its
/// gradient in the z-coordinates.
pub(crate) fn z_part(z: &[Complex64], shape: &ModelShape, with_bump: bool) -> (f64, Vec<f64>) {
    let n = z.len();
    let mut grad = vec![0.0; 2 * n];
    let r0 = z[0].norm_sqr();
    let mut value = 0.0;
    let mut eta_sum = 0.0;
    for i in 1..n {
        let eta = r0 - z[i].norm_sqr();
        value += eta * eta;
        eta_sum += eta;
        grad[2 * i] = -4.0 * eta * z[i].re;
        grad[2 * i + 1] = -4.0 * eta * z[i].im;
    }
    grad[0] = 4.0 * eta_sum * z[0].re;
    grad[1] = 4.0 * eta_sum * z[0].im;
    if with_bump && shape.eps_pert != 0.0 {
        let c = chi(z, shape.chi_radius);
        let norm2: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        value += shape.eps_pert * c.value * norm2;
        for i in 0..n {
            grad[2 * i] += shape.eps_pert * (c.gradient[2 * i] * norm2 + 2.0 * c.value * z[i].re);
            grad[2 * i + 1] += shape.eps_pert * (c.gradient[2 * i + 1] * norm2 + 2.0 * c.value * z[i].im);
        }
    }
    (value, grad)
}

fn evaluate(pt: &AmbientPoint, shape: &ModelShape, with_bump: bool) -> Result<PotentialValue> {
    shape.validate()?;
    check_dims(&pt.z, &pt.u, shape)?;
    check_u(&pt.u)?;
    let (mut value, mut gradient) = z_part(&pt.z, shape, with_bump);
    for u in &pt.u {
        let r2 = u.norm_sqr();
        let d = 0.5 * r2.ln() + shape.params.l;
        value += d * d;
        gradient.push(2.0 * d * u.re / r2);
        gradient.push(2.0 * d * u.im / r2);
    }
    Ok(PotentialValue { value, gradient })
}

pub fn potential_phi(pt: &AmbientPoint, shape: &ModelShape) -> Result<PotentialValue> {
    evaluate(pt, shape, false)
}

pub fn potential_tilde(pt: &AmbientPoint, shape: &ModelShape) -> Result<PotentialValue> {
    evaluate(pt, shape, true)
}
