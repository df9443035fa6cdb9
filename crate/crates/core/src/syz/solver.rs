//! Multistart search for critical manifolds of the perturbed potential.
//!
//! Each start is driven to a zero of the residual `(tangent gradient,
//! constraint)` by Levenberg-Marquardt steps in the log-polar chart, each
//! followed by projection back onto the constraint. Converged starts are
//! clustered by SYZ image and Hessian signature.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::catalog::{predicted_catalog, CatalogEntry};
use super::chart::{eval_log_polar, from_chart, project_chart, tangent_gradient, Chart};
use super::hessian::{tangent_hessian_eigenvalues, HessianReport};
use super::{project_syz, AmbientPoint, ModelShape};
use crate::error::{Error, Result};
use crate::fd::central_jacobian;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n_starts: usize,
    pub seed: u64,
    /// A start converges once its tangent gradient norm is below this.
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Radius in SYZ-image coordinates within which hits are merged.
    pub cluster_radius: f64,
    /// Relative zero-eigenvalue threshold for Hessian signatures.
    pub zero_threshold: f64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

impl SolverConfig {
    /// Defaults for a shape: `20 * 2^q` starts.
    pub fn for_shape(shape: &ModelShape, seed: u64) -> Self {
        SolverConfig {
            n_starts: 20 << shape.q,
            seed,
            grad_tol: 1e-10,
            max_iters: 300,
            cluster_radius: 1e-3,
            zero_threshold: 1e-5,
            threads: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive, got {v}"),
                })
            }
        };
        positive("grad_tol", self.grad_tol)?;
        positive("cluster_radius", self.cluster_radius)?;
        positive("zero_threshold", self.zero_threshold)?;
        if self.n_starts == 0 {
            return Err(Error::InvalidParameter {
                name: "n_starts",
                reason: "need at least one start".into(),
            });
        }
        if self.threads == Some(0) {
            return Err(Error::InvalidParameter {
                name: "threads",
                reason: "need at least one thread".into(),
            });
        }
        Ok(())
    }
}

/// A cluster of converged starts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalManifold {
    /// Nearest catalog subset, when within the matching tolerance.
    pub subset: Option<Vec<usize>>,
    pub base_xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub index: usize,
    pub nullity: usize,
    pub hessian: HessianReport,
    /// Member with the smallest tangent gradient.
    pub representative: AmbientPoint,
    pub grad_norm: f64,
    /// Start indices that converged into this cluster.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub manifolds: Vec<CriticalManifold>,
    pub n_starts: usize,
    pub n_converged: usize,
    pub n_discarded: usize,
}

struct Hit {
    start: usize,
    x: Vec<f64>,
    grad_norm: f64,
    pi: Vec<f64>,
    hessian: HessianReport,
}

/// Tolerance for assigning clusters to catalog entries.
pub fn match_tolerance(shape: &ModelShape) -> f64 {
    shape.params.eps.max(1e-3)
}

/// Runs the multistart search. Starts are independent and run in parallel;
/// the result depends only on `(shape, config)` and not on the thread count.
pub fn find_critical_manifolds(shape: &ModelShape, config: &SolverConfig) -> Result<SearchReport> {
    shape.validate()?;
    config.validate()?;
    let catalog = predicted_catalog(shape)?;
    let run = || -> Vec<Option<Hit>> {
        (0..config.n_starts)
            .into_par_iter()
            .map(|k| run_start(shape, config, &catalog, k))
            .collect()
    };
    let hits = match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::InvalidParameter {
                name: "threads",
                reason: e.to_string(),
            })?
            .install(run),
        None => run(),
    };
    let n_converged = hits.iter().filter(|h| h.is_some()).count();

    let tol = match_tolerance(shape);
    let mut clusters: Vec<(Vec<f64>, Vec<Hit>)> = Vec::new();
    for hit in hits.into_iter().flatten() {
        let slot = clusters.iter_mut().find(|(pi, members)| {
            members[0].hessian.signature() == hit.hessian.signature()
                && dist(pi, &hit.pi) <= config.cluster_radius
        });
        match slot {
            Some((_, members)) => members.push(hit),
            None => clusters.push((hit.pi.clone(), vec![hit])),
        }
    }
    let p = shape.p;
    let manifolds = clusters
        .into_iter()
        .map(|(_, members)| {
            let rep = members
                .iter()
                .min_by(|a, b| a.grad_norm.total_cmp(&b.grad_norm).then(a.start.cmp(&b.start)))
                .expect("clusters are nonempty");
            let eta = rep.pi[..p].to_vec();
            let base_xi = rep.pi[p..].to_vec();
            let subset = catalog
                .iter()
                .map(|e| {
                    let d = eta.iter().map(|v| v * v).sum::<f64>()
                        + base_xi.iter().zip(e.base.iter()).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
                    (e, d.sqrt())
                })
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .filter(|(_, d)| *d <= tol)
                .map(|(e, _)| e.subset.clone());
            CriticalManifold {
                subset,
                base_xi,
                eta,
                index: rep.hessian.neg_count,
                nullity: rep.hessian.zero_count,
                hessian: rep.hessian.clone(),
                representative: from_chart(&rep.x, shape, Chart::LogPolar),
                grad_norm: rep.grad_norm,
                members: members.iter().map(|h| h.start).collect(),
            }
        })
        .collect();
    Ok(SearchReport {
        manifolds,
        n_starts: config.n_starts,
        n_converged,
        n_discarded: config.n_starts - n_converged,
    })
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

/// Initial chart point for start `k`. The first starts cycle through the
/// catalog; the rest are uniform over a box around the region of interest.
fn initial_point(shape: &ModelShape, config: &SolverConfig, catalog: &[CatalogEntry], k: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(k as u64);
    let tau = std::f64::consts::TAU;
    let l = shape.params.l;
    let seeded = (4 * catalog.len()).min(config.n_starts / 2);
    let mut x = Vec::with_capacity(2 * (shape.p + 1 + shape.q));
    if k < seeded {
        let entry = &catalog[k % catalog.len()];
        for _ in 0..=shape.p {
            let z = if entry.subset.is_empty() {
                Complex64::from_polar(1.0, rng.gen_range(0.0..tau))
            } else {
                // log-uniform moduli reach both z = 0 and small rings around it
                Complex64::from_polar(10f64.powf(rng.gen_range(-4.0..-1.0)), rng.gen_range(0.0..tau))
            };
            x.push(z.re);
            x.push(z.im);
        }
        for j in 0..shape.q {
            x.push(entry.base[j] + rng.gen_range(-0.05..0.05));
            // on the diagonal boundary the active u-coordinates are negative reals
            let theta = if entry.subset.contains(&(j + 1)) {
                std::f64::consts::PI + rng.gen_range(-0.2..0.2)
            } else {
                rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)
            };
            x.push(theta);
        }
    } else {
        for _ in 0..=shape.p {
            let z = Complex64::from_polar(rng.gen_range(0.0..1.5), rng.gen_range(0.0..tau));
            x.push(z.re);
            x.push(z.im);
        }
        for _ in 0..shape.q {
            x.push(rng.gen_range(-l - 1.0..1.0));
            x.push(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        }
    }
    x
}

/// Residual `(tangent gradient, Re c, Im c)` and the gradient norm.
fn residual(x: &[f64], shape: &ModelShape) -> Option<(Vec<f64>, f64)> {
    let local = eval_log_polar(x, shape, true);
    let mut r = tangent_gradient(&local).ok()?;
    let gn = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    r.push(local.c.re);
    r.push(local.c.im);
    r.iter().all(|v| v.is_finite()).then_some((r, gn))
}

fn in_bounds(x: &[f64], shape: &ModelShape) -> bool {
    let nz = 2 * (shape.p + 1);
    let l = shape.params.l;
    x[..nz].iter().all(|v| v.abs() < 1e3) && (nz..x.len()).step_by(2).all(|k| x[k] > -l - 15.0 && x[k] < 10.0)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Levenberg-Marquardt on the residual with projection after every step.
/// Returns the converged chart point and its gradient norm.
pub(crate) fn refine(start: &[f64], shape: &ModelShape, config: &SolverConfig) -> Option<(Vec<f64>, f64)> {
    let mut x = project_chart(start, shape).ok()?;
    let (mut r, mut gn) = residual(&x, shape)?;
    let mut mu = 1e-3;
    for _ in 0..config.max_iters {
        if gn <= config.grad_tol {
            return Some((x, gn));
        }
        let jac = central_jacobian(|y| residual(y, shape).map_or_else(|| vec![f64::NAN; r.len()], |v| v.0), &x, 1e-7);
        if jac.iter().flatten().any(|v| !v.is_finite()) {
            return None;
        }
        let m = r.len();
        let n = x.len();
        let jm = DMatrix::from_fn(m, n, |i, k| jac[i][k]);
        let jt = jm.transpose();
        let a = &jt * &jm;
        let b = &jt * DVector::from_column_slice(&r);
        let rnorm = norm(&r);
        let mut accepted = false;
        while mu < 1e12 {
            let mut damped = a.clone();
            for k in 0..n {
                damped[(k, k)] += mu * a[(k, k)].max(1e-8);
            }
            let Some(step) = damped.lu().solve(&(-&b)) else {
                mu *= 10.0;
                continue;
            };
            let mut step: Vec<f64> = step.iter().copied().collect();
            let len = norm(&step);
            if len > 1.0 {
                step.iter_mut().for_each(|s| *s /= len);
            }
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, s)| a + s).collect();
            let candidate = project_chart(&trial, shape)
                .ok()
                .filter(|y| in_bounds(y, shape))
                .and_then(|y| residual(&y, shape).map(|res| (y, res)));
            match candidate {
                Some((y, (ry, gy))) if norm(&ry) < rnorm => {
                    x = y;
                    r = ry;
                    gn = gy;
                    mu = (mu / 5.0).max(1e-15);
                    accepted = true;
                    break;
                }
                _ => mu *= 5.0,
            }
        }
        if !accepted {
            break;
        }
    }
    (gn <= config.grad_tol).then_some((x, gn))
}

fn run_start(shape: &ModelShape, config: &SolverConfig, catalog: &[CatalogEntry], k: usize) -> Option<Hit> {
    let x0 = initial_point(shape, config, catalog, k);
    let (x, grad_norm) = refine(&x0, shape, config)?;
    let pt = from_chart(&x, shape, Chart::LogPolar);
    let pi = project_syz(&pt).ok()?;
    let eig = tangent_hessian_eigenvalues(&x, shape).ok()?;
    Some(Hit {
        start: k,
        x,
        grad_norm,
        pi,
        hessian: HessianReport::from_eigenvalues(eig, config.zero_threshold),
    })
}
