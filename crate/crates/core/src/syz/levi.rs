//! Sampled plurisubharmonicity check for the perturbed potential.
//!
//! The Levi form is taken on the complex hypersurface
//! `{z_0 ... z_p = 1 + u_1 + ... + u_q}`: the tailored hypersurface is only
//! symplectic, so the holomorphic tangent space is that of the untailored
//! one. The tailoring amount of the shape is ignored here.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::potential::{potential_tilde, PotentialValue};
use super::{AmbientPoint, ModelShape};
use crate::error::Result;

/// Where on the hypersurface sample points are drawn.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum LeviSampling {
    /// Points whose SYZ image has `xi_j` uniform in `[xi_lo, xi_hi]` and
    /// `|eta_i| <= eta_rel * r^2`, where `r^(p+1) = |1 + sum u|`.
    NearSlice { xi_lo: f64, xi_hi: f64, eta_rel: f64 },
    /// Points with every `|z_i| <= z_max`.
    NearZero { z_max: f64 },
}

impl LeviSampling {
    /// A neighbourhood of the base torus `{eta = 0, xi = -L}`.
    pub fn base_torus(shape: &ModelShape) -> Self {
        let l = shape.params.l;
        LeviSampling::NearSlice {
            xi_lo: -l - 0.5,
            xi_hi: -l + 0.5,
            eta_rel: 0.03,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LeviReport {
    pub sampling: LeviSampling,
    /// Smallest Levi eigenvalue at each sample.
    pub per_sample_min: Vec<f64>,
    pub overall_min: f64,
    pub n_negative: usize,
}

impl LeviReport {
    pub fn positive(&self) -> bool {
        self.n_negative == 0 && self.overall_min > 0.0
    }
}

/// Computes the smallest eigenvalue of the Levi form of the perturbed
/// potential, restricted to the holomorphic tangent space, at `n_samples`
/// points drawn according to `sampling`.
pub fn check_kahler_positivity(
    shape: &ModelShape,
    n_samples: usize,
    seed: u64,
    sampling: LeviSampling,
) -> Result<LeviReport> {
    shape.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut per_sample_min = Vec::with_capacity(n_samples);
    while per_sample_min.len() < n_samples {
        let Some(pt) = sample(shape, sampling, &mut rng) else { continue };
        per_sample_min.push(levi_min_eigenvalue(&pt, shape)?);
    }
    let overall_min = per_sample_min.iter().copied().fold(f64::INFINITY, f64::min);
    let n_negative = per_sample_min.iter().filter(|&&v| v <= 0.0).count();
    Ok(LeviReport {
        sampling,
        per_sample_min,
        overall_min,
        n_negative,
    })
}

fn untailored(u: &[Complex64]) -> Complex64 {
    Complex64::new(1.0, 0.0) + u.iter().sum::<Complex64>()
}

fn sample(shape: &ModelShape, sampling: LeviSampling, rng: &mut ChaCha8Rng) -> Option<AmbientPoint> {
    let (p, q) = (shape.p, shape.q);
    let tau = std::f64::consts::TAU;
    let (z, u) = match sampling {
        LeviSampling::NearSlice { xi_lo, xi_hi, eta_rel } => {
            let u: Vec<Complex64> = (0..q)
                .map(|_| Complex64::from_polar(rng.gen_range(xi_lo..=xi_hi).exp(), rng.gen_range(0.0..tau)))
                .collect();
            let f = untailored(&u);
            if f.norm() < 1e-6 {
                return None;
            }
            let r2 = f.norm().powf(2.0 / (p + 1) as f64);
            let eta: Vec<f64> = (0..p).map(|_| eta_rel * r2 * rng.gen_range(-1.0..=1.0)).collect();
            let t = solve_r0_squared(&eta, f.norm())?;
            let mut phases: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..tau)).collect();
            let phase0 = f.arg() - phases.iter().sum::<f64>();
            phases.insert(0, phase0);
            let z = (0..=p)
                .map(|i| {
                    let m2 = if i == 0 { t } else { t - eta[i - 1] };
                    Complex64::from_polar(m2.sqrt(), phases[i])
                })
                .collect();
            (z, u)
        }
        LeviSampling::NearZero { z_max } => {
            let z: Vec<Complex64> = (0..=p)
                .map(|_| Complex64::from_polar(z_max * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..tau)))
                .collect();
            let mut u: Vec<Complex64> = vec![Complex64::new(0.0, 0.0)];
            for _ in 1..q {
                u.push(Complex64::from_polar(rng.gen_range(-1.0..0.5f64).exp(), rng.gen_range(0.0..tau)));
            }
            let prod: Complex64 = z.iter().product();
            u[0] = prod - untailored(&u[1..]);
            if u[0].norm() < 1e-3 {
                return None;
            }
            (z, u)
        }
    };
    let residual = (z.iter().product::<Complex64>() - untailored(&u)).norm();
    Some(AmbientPoint { z, u, residual })
}

/// Solves `sqrt(t) * prod_i sqrt(t - eta_i) = target` for `t = |z_0|^2`.
fn solve_r0_squared(eta: &[f64], target: f64) -> Option<f64> {
    let g = |t: f64| 0.5 * (t.ln() + eta.iter().map(|e| (t - e).ln()).sum::<f64>()) - target.ln();
    let mut lo = eta.iter().copied().fold(0.0f64, f64::max);
    let mut hi = lo + 1.0;
    while g(hi) < 0.0 {
        hi = lo + 2.0 * (hi - lo);
        if hi > 1e12 {
            return None;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

fn real_gradient(x: &[f64], shape: &ModelShape) -> Vec<f64> {
    let p = shape.p;
    let cs: Vec<Complex64> = x.chunks(2).map(|w| Complex64::new(w[0], w[1])).collect();
    let pt = AmbientPoint {
        z: cs[..p + 1].to_vec(),
        u: cs[p + 1..].to_vec(),
        residual: f64::NAN,
    };
    potential_tilde(&pt, shape)
        .map(|PotentialValue { gradient, .. }| gradient)
        .unwrap_or_else(|_| vec![f64::NAN; x.len()])
}

/// Smallest eigenvalue of the Levi form `d^2 phi~ / dw_a d conj(w_b)` on the
/// holomorphic tangent space at `pt`.
pub(crate) fn levi_min_eigenvalue(pt: &AmbientPoint, shape: &ModelShape) -> Result<f64> {
    let w: Vec<Complex64> = pt.z.iter().chain(&pt.u).copied().collect();
    let n = w.len();
    let x: Vec<f64> = w.iter().flat_map(|c| [c.re, c.im]).collect();

    // Real Hessian by central differences of the analytic gradient, with
    // steps scaled to each coordinate's modulus.
    let mut hess = DMatrix::<f64>::zeros(2 * n, 2 * n);
    let mut y = x.clone();
    for k in 0..2 * n {
        let h = 1e-5 * w[k / 2].norm().max(1e-3);
        y[k] = x[k] + h;
        let gp = real_gradient(&y, shape);
        y[k] = x[k] - h;
        let gm = real_gradient(&y, shape);
        y[k] = x[k];
        for i in 0..2 * n {
            hess[(i, k)] = (gp[i] - gm[i]) / (2.0 * h);
        }
    }
    let hess = 0.5 * (&hess + hess.transpose());
    let levi = DMatrix::from_fn(n, n, |a, b| {
        let (xa, ya, xb, yb) = (2 * a, 2 * a + 1, 2 * b, 2 * b + 1);
        Complex64::new(
            0.25 * (hess[(xa, xb)] + hess[(ya, yb)]),
            0.25 * (hess[(xa, yb)] - hess[(ya, xb)]),
        )
    });

    // Tangent space of F = prod z - 1 - sum u: with dF/du_1 = -1, the vectors
    // e_b + (dF/dw_b) e_{u_1} for b != u_1 span it.
    let p1 = pt.z.len();
    let u1 = p1;
    let mut partials: Vec<Complex64> = (0..p1)
        .map(|i| pt.z.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, c)| *c).product())
        .collect();
    partials.extend(std::iter::repeat_n(Complex64::new(-1.0, 0.0), pt.u.len()));
    let mut basis: Vec<DVector<Complex64>> = Vec::with_capacity(n - 1);
    for b in (0..n).filter(|&b| b != u1) {
        let mut v = DVector::from_element(n, Complex64::new(0.0, 0.0));
        v[b] = Complex64::new(1.0, 0.0);
        v[u1] = partials[b];
        for _ in 0..2 {
            for e in &basis {
                let c = e.dotc(&v);
                v -= e * c;
            }
        }
        let norm = v.norm();
        basis.push(v / Complex64::new(norm, 0.0));
    }
    let t = DMatrix::from_columns(&basis);
    let restricted = t.adjoint() * levi * &t;
    let restricted = (&restricted + restricted.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(restricted).eigenvalues;
    Ok(eig.iter().copied().fold(f64::INFINITY, f64::min))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn levi_form_of_a_known_potential() {
        // At the base torus of X(0, 1) the potential is (xi + L)^2 with
        // z_0 = 1 + u determined by u; its Levi form in u is
        // |d xi / du|^2 * 2 = 1 / (2 |u|^2) on the tangent line, which has
        // unit-normalised direction (dz_0, du) = (1, 1) / sqrt(2).
        let shape = ModelShape::new(0, 1);
        let u = Complex64::new((-5f64).exp(), 0.0);
        let pt = AmbientPoint {
            z: vec![Complex64::new(1.0, 0.0) + u],
            u: vec![u],
            residual: 0.0,
        };
        let v = levi_min_eigenvalue(&pt, &shape).unwrap();
        let expected = 0.5 / u.norm_sqr() / 2.0;
        assert!((v - expected).abs() < 1e-4 * expected, "{v} vs {expected}");
    }

    #[test]
    fn samples_lie_on_the_hypersurface() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (p, q) in [(1, 1), (2, 2), (1, 3)] {
            let shape = ModelShape::new(p, q);
            for sampling in [LeviSampling::base_torus(&shape), LeviSampling::NearZero { z_max: 0.05 }] {
                for _ in 0..50 {
                    if let Some(pt) = sample(&shape, sampling, &mut rng) {
                        assert!(pt.residual < 1e-12, "{}", pt.residual);
                    }
                }
            }
        }
    }
}
