use super::{BasePoint, ChamberId};
use crate::error::{Error, Result};

/// Outward facet normals `a` of the closed chamber `{x : a . x <= 0 for all a}`.
fn facet_normals(q: usize, chamber: ChamberId) -> Vec<Vec<f64>> {
    let i = chamber.0;
    if i == 0 {
        (0..q)
            .map(|k| {
                let mut a = vec![0.0; q];
                a[k] = 1.0;
                a
            })
            .collect()
    } else {
        let ii = i - 1;
        let mut normals = Vec::with_capacity(q);
        let mut a = vec![0.0; q];
        a[ii] = -1.0;
        normals.push(a);
        for j in (0..q).filter(|&j| j != ii) {
            let mut a = vec![0.0; q];
            a[j] = 1.0;
            a[ii] = -1.0;
            normals.push(a);
        }
        normals
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves the small dense system `m x = rhs` in place by partial pivoting.
/// Returns `None` for a numerically singular matrix.
fn solve_small(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let n = rhs.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-12 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f != 0.0 {
                for k in col..n {
                    m[row][k] -= f * m[col][k];
                }
                rhs[row] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| m[row][k] * x[k]).sum();
        x[row] = (rhs[row] - s) / m[row][row];
    }
    Some(x)
}

/// Nearest point of a closed chamber and the distance to it.
#[derive(Clone, Debug, PartialEq)]
pub struct ChamberProjection {
    pub point: Vec<f64>,
    pub distance: f64,
}

impl ChamberProjection {
    /// Gradient of the distance function, `(xi - point) / distance`; zero
    /// inside the chamber.
    pub fn distance_gradient(&self, xi: &[f64]) -> Vec<f64> {
        if self.distance == 0.0 {
            return vec![0.0; xi.len()];
        }
        xi.iter()
            .zip(&self.point)
            .map(|(x, p)| (x - p) / self.distance)
            .collect()
    }
}

/// Euclidean projection onto the closed chamber by enumerating active facet
/// sets. The chambers are simplicial cones with `q` linearly independent
/// facets, so every face is the span-projection of exactly one active set.
pub(crate) fn project_slice(xi: &[f64], chamber: ChamberId) -> ChamberProjection {
    let q = xi.len();
    let normals = facet_normals(q, chamber);
    let feas_tol = 1e-12 * (1.0 + xi.iter().fold(0.0f64, |m, x| m.max(x.abs())));

    if normals.iter().all(|a| dot(a, xi) <= 0.0) {
        return ChamberProjection {
            point: xi.to_vec(),
            distance: 0.0,
        };
    }

    let mut best: Option<ChamberProjection> = None;
    for mask in 1u32..(1 << normals.len()) {
        let active: Vec<&Vec<f64>> = normals
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, a)| a)
            .collect();
        let gram = active
            .iter()
            .map(|a| active.iter().map(|b| dot(a, b)).collect())
            .collect();
        let rhs = active.iter().map(|a| dot(a, xi)).collect();
        let Some(lambda) = solve_small(gram, rhs) else {
            continue;
        };
        // KKT: the multipliers of an optimal active set are nonnegative.
        if lambda.iter().any(|&l| l < -1e-12) {
            continue;
        }
        let mut x = xi.to_vec();
        for (a, l) in active.iter().zip(&lambda) {
            for (xk, ak) in x.iter_mut().zip(a.iter()) {
                *xk -= l * ak;
            }
        }
        if normals.iter().any(|a| dot(a, &x) > feas_tol) {
            continue;
        }
        let d = xi.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if best.as_ref().is_none_or(|b| d < b.distance) {
            best = Some(ChamberProjection { point: x, distance: d });
        }
    }
    // The apex (all facets active) is always feasible, so a candidate exists.
    best.expect("apex of the chamber is always a feasible candidate")
}

fn check_chamber(q: usize, chamber: ChamberId) -> Result<()> {
    if chamber.0 > q {
        return Err(Error::InvalidParameter {
            name: "chamber",
            reason: format!("{chamber} does not exist for q = {q}"),
        });
    }
    Ok(())
}

/// Exact projection of `xi` onto the closure of `chamber`.
pub fn project_to_chamber(xi: &BasePoint, chamber: ChamberId) -> Result<ChamberProjection> {
    check_chamber(xi.q(), chamber)?;
    Ok(project_slice(xi, chamber))
}

/// Euclidean distance from `xi` to the closure of `chamber`.
pub fn distance_to_chamber(xi: &BasePoint, chamber: ChamberId) -> Result<f64> {
    project_to_chamber(xi, chamber).map(|p| p.distance)
}
