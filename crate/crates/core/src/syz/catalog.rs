//! The expected critical manifolds `T_I`, one per subset `I` of the
//! u-coordinates, and matching of solver output against them.

use serde::{Deserialize, Serialize};

use super::{CriticalManifold, ModelShape};
use crate::error::Result;
use crate::tropical::{boundary_point_on_diagonal, BasePoint};

/// Expected location of `T_I`: `xi_i` equal to the diagonal boundary point
/// for `i` in `I`, `xi_j = -L` otherwise, and `eta = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    /// 1-based indices, increasing.
    pub subset: Vec<usize>,
    pub base: BasePoint,
}

impl CatalogEntry {
    pub fn expected_index(&self) -> usize {
        self.subset.len()
    }
}

/// All `2^q` entries, ordered by subset size and then lexicographically.
pub fn predicted_catalog(shape: &ModelShape) -> Result<Vec<CatalogEntry>> {
    shape.validate()?;
    let q = shape.q;
    let mut subsets: Vec<Vec<usize>> = (0u32..1 << q)
        .map(|mask| (1..=q).filter(|j| mask & (1 << (j - 1)) != 0).collect())
        .collect();
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets
        .into_iter()
        .map(|subset| {
            let base = if subset.is_empty() {
                BasePoint::diagonal(q, -shape.params.l)?
            } else {
                boundary_point_on_diagonal(&subset, q, &shape.params, 1e-13)?
            };
            Ok(CatalogEntry { subset, base })
        })
        .collect()
}

/// One line of the comparison between catalog and solver output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchRow {
    pub subset: Vec<usize>,
    pub predicted_xi: Vec<f64>,
    pub expected_index: usize,
    /// Position of the matched cluster in the solver output.
    pub cluster: Option<usize>,
    pub found_xi: Option<Vec<f64>>,
    pub found_eta: Option<Vec<f64>>,
    pub index: Option<usize>,
    pub nullity: Option<usize>,
    pub grad_norm: Option<f64>,
    pub distance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CatalogMatch {
    pub rows: Vec<MatchRow>,
    /// Clusters not assigned to any catalog entry.
    pub unmatched_clusters: Vec<usize>,
    pub tolerance: f64,
}

impl CatalogMatch {
    /// Every entry hit exactly once and nothing left over.
    pub fn is_bijection(&self) -> bool {
        self.unmatched_clusters.is_empty() && self.rows.iter().all(|r| r.cluster.is_some())
    }

    pub fn indices_agree(&self) -> bool {
        self.rows.iter().all(|r| r.index == Some(r.expected_index))
    }
}

fn pi_distance(m: &CriticalManifold, entry: &CatalogEntry) -> f64 {
    let eta: f64 = m.eta.iter().map(|e| e * e).sum();
    let xi: f64 = m.base_xi.iter().zip(entry.base.iter()).map(|(a, b)| (a - b).powi(2)).sum();
    (eta + xi).sqrt()
}

/// Assigns each cluster to the nearest catalog entry within `tol` in the SYZ
/// base (the catalog sits at `eta = 0`). An entry keeps only its closest
/// cluster; further clusters near it count as unmatched.
pub fn match_catalog(manifolds: &[CriticalManifold], catalog: &[CatalogEntry], tol: f64) -> CatalogMatch {
    let mut best: Vec<Option<(usize, f64)>> = vec![None; catalog.len()];
    let mut unmatched = Vec::new();
    for (ci, m) in manifolds.iter().enumerate() {
        let nearest = catalog
            .iter()
            .enumerate()
            .map(|(ei, e)| (ei, pi_distance(m, e)))
            .min_by(|a, b| a.1.total_cmp(&b.1));
        match nearest {
            Some((ei, d)) if d <= tol => match best[ei] {
                Some((_, pd)) if pd <= d => unmatched.push(ci),
                Some((prev, _)) => {
                    unmatched.push(prev);
                    best[ei] = Some((ci, d));
                }
                None => best[ei] = Some((ci, d)),
            },
            _ => unmatched.push(ci),
        }
    }
    unmatched.sort_unstable();
    let rows = catalog
        .iter()
        .zip(&best)
        .map(|(e, b)| {
            let m = b.map(|(ci, _)| &manifolds[ci]);
            MatchRow {
                subset: e.subset.clone(),
                predicted_xi: e.base.to_vec(),
                expected_index: e.expected_index(),
                cluster: b.map(|(ci, _)| ci),
                found_xi: m.map(|m| m.base_xi.clone()),
                found_eta: m.map(|m| m.eta.clone()),
                index: m.map(|m| m.index),
                nullity: m.map(|m| m.nullity),
                grad_norm: m.map(|m| m.grad_norm),
                distance: b.map(|(_, d)| d),
            }
        })
        .collect();
    CatalogMatch {
        rows,
        unmatched_clusters: unmatched,
        tolerance: tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_examples() {
        let shape = ModelShape::new(1, 1);
        let cat = predicted_catalog(&shape).unwrap();
        assert_eq!(cat.len(), 2);
        assert!(cat[0].subset.is_empty());
        assert_eq!(cat[0].base.to_vec(), vec![-5.0]);
        assert_eq!(cat[1].subset, vec![1]);
        assert!(cat[1].base[0].abs() <= shape.params.eps);

        let cat = predicted_catalog(&ModelShape::new(1, 2)).unwrap();
        let subsets: Vec<Vec<usize>> = cat.iter().map(|e| e.subset.clone()).collect();
        assert_eq!(subsets, vec![vec![], vec![1], vec![2], vec![1, 2]]);
    }

    #[test]
    fn catalog_is_symmetric_under_permuting_u() {
        for q in 1..=4 {
            let cat = predicted_catalog(&ModelShape::new(1, q)).unwrap();
            // swapping coordinates a and b maps the entry for I to the entry
            // for the swapped subset
            for a in 1..=q {
                for b in a + 1..=q {
                    let swap = |j: usize| if j == a { b } else if j == b { a } else { j };
                    for e in &cat {
                        let mut image: Vec<usize> = e.subset.iter().map(|&j| swap(j)).collect();
                        image.sort_unstable();
                        let other = cat.iter().find(|f| f.subset == image).unwrap();
                        for j in 1..=q {
                            assert_eq!(e.base[j - 1], other.base[swap(j) - 1]);
                        }
                    }
                }
            }
        }
    }
}
