//! Chain models of the pieces of the skeleton and their gluing.
//!
//! Noncompact directions are collapsed before modelling: the cone directions
//! of the FLTZ Lagrangian retract conically onto the zero section, and the
//! real-line factor of the overlap retracts to a point.

use serde::{Deserialize, Serialize};

use super::complex::{mapping_cone, ChainComplex, ChainMap};
use super::homology::{degree_data, exact_at, group_of, induced_map, HomologyTable};
use super::matrix::{BigMatrix, IntMatrix};
use crate::error::{Error, Result};

/// Which glued skeleton to model: `p + 1` z-coordinates, `q` u-coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonSpec {
    pub p: usize,
    pub q: usize,
    /// Records that torus basepoints sit at `(1/2, ..., 1/2)` rather than the
    /// origin. A change of basepoint; it does not affect any chain model.
    pub half_shift: bool,
}

impl SkeletonSpec {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidParameter {
                name: "q",
                reason: "need at least one u-direction".into(),
            });
        }
        Ok(SkeletonSpec { p, q, half_shift: true })
    }
}

fn subset_label(prefix: &str, s: &[usize]) -> String {
    let body: Vec<String> = s.iter().map(|i| i.to_string()).collect();
    format!("{prefix}{{{}}}", body.join(","))
}

fn subsets(n: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (0u32..1 << n)
        .map(|mask| (1..=n).filter(|i| mask & (1 << (i - 1)) != 0).collect())
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all
}

/// Minimal cell structure of `T^k`: one generator `e{S}` of degree `|S|` for
/// every subset `S` of `1..=k`, all differentials zero.
pub fn torus_chain(k: usize) -> ChainComplex {
    let mut labels = vec![Vec::new(); k + 1];
    for s in subsets(k) {
        labels[s.len()].push(subset_label("e", &s));
    }
    let boundary = (0..=k)
        .map(|d| IntMatrix::zeros(if d == 0 { 0 } else { labels[d - 1].len() }, labels[d].len()))
        .collect();
    ChainComplex::new(labels, boundary).expect("torus complex is valid")
}

/// Generators `(tau, e)` of the boundary complex, grouped by degree.
fn boundary_generators(q: usize) -> Vec<Vec<(Vec<usize>, Vec<usize>)>> {
    let all = subsets(q);
    let mut by_degree: Vec<Vec<(Vec<usize>, Vec<usize>)>> = vec![Vec::new(); q];
    for tau in all.iter().filter(|t| !t.is_empty()) {
        for e in all.iter().filter(|e| e.iter().all(|i| !tau.contains(i))) {
            by_degree[e.len() + tau.len() - 1].push((tau.clone(), e.clone()));
        }
    }
    for gens in by_degree.iter_mut() {
        gens.sort();
    }
    by_degree
}

fn boundary_label(tau: &[usize], e: &[usize]) -> String {
    format!("{}{}", subset_label("tau", tau), subset_label("e", e))
}

/// Chain model of the boundary at infinity of the skeleton of `C^q`: the
/// union over nonempty `tau` of `(torus orthogonal to tau) x (simplex at
/// infinity of the cone on tau)`.
///
/// The generator `(tau, e)` pairs the simplex of `tau` with the torus cell
/// `e` (a set of directions outside `tau`) and has degree `|e| + |tau| - 1`;
/// `d(tau, e) = (-1)^|e| sum_t (-1)^pos(t) (tau - t, e)` over `t` in `tau`
/// with `tau - t` nonempty, `pos` counted in sorted `tau`.
pub fn fltz_boundary_chain(q: usize) -> Result<ChainComplex> {
    if q == 0 {
        return Err(Error::InvalidParameter {
            name: "q",
            reason: "need at least one direction".into(),
        });
    }
    let gens = boundary_generators(q);
    let labels: Vec<Vec<String>> = gens
        .iter()
        .map(|g| g.iter().map(|(t, e)| boundary_label(t, e)).collect())
        .collect();
    let boundary = (0..q)
        .map(|n| {
            if n == 0 {
                return IntMatrix::zeros(0, gens[0].len());
            }
            let mut d = IntMatrix::zeros(gens[n - 1].len(), gens[n].len());
            for (col, (tau, e)) in gens[n].iter().enumerate() {
                if tau.len() < 2 {
                    continue;
                }
                let koszul = if e.len() % 2 == 0 { 1 } else { -1 };
                for (pos, t) in tau.iter().enumerate() {
                    let face: Vec<usize> = tau.iter().copied().filter(|x| x != t).collect();
                    let row = gens[n - 1]
                        .iter()
                        .position(|(ft, fe)| *ft == face && fe == e)
                        .expect("face generator exists");
                    let sign = if pos % 2 == 0 { 1 } else { -1 };
                    d.set(row, col, d.get(row, col) + koszul * sign);
                }
            }
            d
        })
        .collect();
    ChainComplex::new(labels, boundary)
}

/// Chain model of the FLTZ skeleton of `C^q x (C^*)^p`, which retracts onto
/// `T^q x T^p`, with the map from `boundary x T^p` induced by inclusion:
/// `(tau, e) x t` goes to `e x t` when `|tau| = 1` and to 0 otherwise.
pub fn fltz_chain(spec: &SkeletonSpec) -> Result<(ChainComplex, ChainMap)> {
    let bq = fltz_boundary_chain(spec.q)?;
    let tq = torus_chain(spec.q);
    let tp = torus_chain(spec.p);
    let maps = (0..bq.len())
        .map(|k| {
            IntMatrix::from_fn(tq.rank(k), bq.rank(k), |r, c| {
                let (tau, e) = &boundary_generators(spec.q)[k][c];
                (tau.len() == 1 && tq.labels(k)[r] == subset_label("e", e)) as i64
            })
        })
        .collect();
    let inclusion = ChainMap::new(bq, tq, maps)?;
    let with_torus = ChainMap::tensor(&inclusion, &ChainMap::identity(&tp));
    let target = with_torus.target().clone();
    // re-validate the commuting squares of the tensored map
    let checked = ChainMap::new(
        with_torus.source().clone(),
        target.clone(),
        (0..target.len().max(with_torus.source().len()))
            .map(|k| with_torus.matrix(k))
            .collect(),
    )?;
    Ok((target, checked))
}

/// The cone on the link torus `T^p`: a single point, with the augmentation
/// map from `T^p` (vertex to the cone point, higher cells to 0).
pub fn lsing_chain(p: usize) -> (ChainComplex, ChainMap) {
    let point = ChainComplex::new(vec![vec!["pt".to_string()]], vec![IntMatrix::zeros(0, 1)]).expect("point is valid");
    let link = torus_chain(p);
    let maps = vec![IntMatrix::from_fn(1, 1, |_, _| 1)];
    let aug = ChainMap::new(link, point.clone(), maps).expect("augmentation is a chain map");
    (point, aug)
}

/// The glued skeleton as a homotopy pushout of `L_1 <- L -> L_2`, where
/// `L = boundary x T^p` (the real-line factor collapsed),
/// `L_1 = fltz_chain`, and `L_2 = boundary x cone(T^p)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluedSkeleton {
    pub spec: SkeletonSpec,
    /// The overlap `L`.
    pub overlap: ChainComplex,
    pub piece1: ChainComplex,
    pub piece2: ChainComplex,
    /// `L -> L_1 + L_2`.
    pub gluing: ChainMap,
    /// Mapping cone of `gluing`.
    pub complex: ChainComplex,
}

impl GluedSkeleton {
    /// Euler characteristics `(glued, L_1, L_2, L)`.
    pub fn euler_characteristics(&self) -> (i64, i64, i64, i64) {
        (
            self.complex.euler_characteristic(),
            self.piece1.euler_characteristic(),
            self.piece2.euler_characteristic(),
            self.overlap.euler_characteristic(),
        )
    }
}

pub fn glued_skeleton(spec: &SkeletonSpec) -> Result<GluedSkeleton> {
    let (l1, incl) = fltz_chain(spec)?;
    let bq = fltz_boundary_chain(spec.q)?;
    let (_, aug) = lsing_chain(spec.p);
    let to_l2 = ChainMap::tensor(&ChainMap::identity(&bq), &aug);
    let f1 = relabel_target(&incl, "L1:")?;
    let f2 = relabel_target(&to_l2, "L2:")?;
    let gluing = ChainMap::pair(&f1, &f2)?;
    let complex = mapping_cone(&gluing);
    let complex = ChainComplex::new(
        (0..complex.len()).map(|k| complex.labels(k).to_vec()).collect(),
        (0..complex.len()).map(|k| complex.boundary(k)).collect(),
    )?;
    Ok(GluedSkeleton {
        spec: *spec,
        overlap: gluing.source().clone(),
        piece1: l1.relabel("L1:"),
        piece2: to_l2.target().relabel("L2:"),
        gluing,
        complex,
    })
}

fn relabel_target(f: &ChainMap, prefix: &str) -> Result<ChainMap> {
    let target = f.target().relabel(prefix);
    let maps = (0..f.source().len().max(target.len())).map(|k| f.matrix(k)).collect();
    ChainMap::new(f.source().clone(), target, maps)
}

/// Outcome of checking the long exact sequence
/// `H_k(L) -> H_k(L_1) + H_k(L_2) -> H_k(glued) -> H_(k-1)(L) -> ...`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MayerVietorisReport {
    /// One entry per slot, `(description, exact)`.
    pub slots: Vec<(String, bool)>,
}

impl MayerVietorisReport {
    pub fn exact(&self) -> bool {
        self.slots.iter().all(|(_, ok)| *ok)
    }
}

/// Assembles the long exact sequence of the pushout from computed homology
/// and induced maps, and checks exactness at every slot over Z.
pub fn mayer_vietoris(glued: &GluedSkeleton) -> Result<MayerVietorisReport> {
    let a = glued.gluing.source();
    let b = glued.gluing.target();
    let g = &glued.complex;
    let (da, db, dg) = (degree_data(a), degree_data(b), degree_data(g));
    for (k, d) in da.iter().chain(&db).chain(&dg).enumerate() {
        if !group_of(d).torsion.is_empty() {
            return Err(Error::TorsionUnsupported { degree: k });
        }
    }
    let top = g.len().max(b.len()).max(a.len() + 1);
    let rank = |d: &[super::homology::DegreeData], k: usize| d.get(k).map_or(0, |x| group_of(x).rank);
    let empty = |d: &[super::homology::DegreeData], k: usize| d.get(k).is_none();

    // maps on homology in each degree
    let mut g_star = Vec::new();
    let mut i_star = Vec::new();
    let mut delta = Vec::new();
    for k in 0..top {
        g_star.push(if empty(&da, k) || empty(&db, k) {
            BigMatrix::zeros(rank(&db, k), rank(&da, k))
        } else {
            induced_map(&glued.gluing.matrix(k), &da[k], &db[k], k)?
        });
        i_star.push(if empty(&db, k) || empty(&dg, k) {
            BigMatrix::zeros(rank(&dg, k), rank(&db, k))
        } else {
            let inc = IntMatrix::from_fn(g.rank(k), b.rank(k), |r, c| (r == c) as i64);
            induced_map(&inc, &db[k], &dg[k], k)?
        });
        delta.push(if k == 0 {
            BigMatrix::zeros(0, rank(&dg, 0))
        } else if empty(&dg, k) || empty(&da, k - 1) {
            BigMatrix::zeros(rank(&da, k - 1), rank(&dg, k))
        } else {
            let proj = IntMatrix::from_fn(a.rank(k - 1), g.rank(k), |r, c| (c == b.rank(k) + r) as i64);
            induced_map(&proj, &dg[k], &da[k - 1], k)?
        });
    }
    let mut slots = Vec::new();
    for k in 0..top {
        // at H_k(L): H_(k+1)(glued) -> H_k(L) -> H_k(L_1 + L_2)
        let incoming = if k + 1 < top {
            delta[k + 1].clone()
        } else {
            BigMatrix::zeros(rank(&da, k), 0)
        };
        slots.push((format!("H_{k}(L)"), exact_at(&incoming, &g_star[k], rank(&da, k))));
        slots.push((format!("H_{k}(L_1 + L_2)"), exact_at(&g_star[k], &i_star[k], rank(&db, k))));
        let outgoing = if k == 0 {
            BigMatrix::zeros(0, rank(&dg, 0))
        } else {
            delta[k].clone()
        };
        slots.push((format!("H_{k}(glued)"), exact_at(&i_star[k], &outgoing, rank(&dg, k))));
    }
    Ok(MayerVietorisReport { slots })
}

/// Homology of each piece and of the glued complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkeletonSummary {
    pub spec: SkeletonSpec,
    pub glued: HomologyTable,
    pub piece1: HomologyTable,
    pub piece2: HomologyTable,
    pub overlap: HomologyTable,
    pub generator_ranks: Vec<usize>,
}

pub fn summarize(glued: &GluedSkeleton) -> SkeletonSummary {
    use super::homology::homology;
    SkeletonSummary {
        spec: glued.spec,
        glued: homology(&glued.complex),
        piece1: homology(&glued.piece1),
        piece2: homology(&glued.piece2),
        overlap: homology(&glued.overlap),
        generator_ranks: glued.complex.ranks(),
    }
}
