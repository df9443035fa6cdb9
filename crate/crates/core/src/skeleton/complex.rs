use serde::{Deserialize, Serialize};

use super::matrix::IntMatrix;
use crate::error::{Error, Result};

/// A bounded, nonnegatively graded chain complex of finitely generated free
/// abelian groups with labelled generators.
///
/// `boundary[k]` is the matrix of `d_k : C_k -> C_(k-1)` (rows indexed by
/// `C_(k-1)`); `boundary[0]` has no rows.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainComplex {
    labels: Vec<Vec<String>>,
    boundary: Vec<IntMatrix>,
}

impl ChainComplex {
    /// Validates shapes and `d . d = 0`.
    pub fn new(labels: Vec<Vec<String>>, boundary: Vec<IntMatrix>) -> Result<Self> {
        if labels.len() != boundary.len() {
            return Err(Error::DimensionMismatch {
                expected: labels.len(),
                got: boundary.len(),
            });
        }
        for (k, d) in boundary.iter().enumerate() {
            let expected_rows = if k == 0 { 0 } else { labels[k - 1].len() };
            let expected_cols = labels[k].len();
            if d.rows() != expected_rows || d.cols() != expected_cols {
                return Err(Error::MatrixShape {
                    degree: k,
                    rows: d.rows(),
                    cols: d.cols(),
                    expected_rows,
                    expected_cols,
                });
            }
        }
        for k in 2..boundary.len() {
            if !boundary[k - 1].mul(&boundary[k]).is_zero() {
                return Err(Error::BoundarySquareNonzero { degree: k - 1, next: k });
            }
        }
        Ok(ChainComplex { labels, boundary })
    }

    /// Complex with no generators.
    pub fn zero() -> Self {
        ChainComplex {
            labels: Vec::new(),
            boundary: Vec::new(),
        }
    }

    /// Largest degree slot plus one (degrees `0..len`).
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.iter().all(|l| l.is_empty())
    }

    pub fn rank(&self, k: usize) -> usize {
        self.labels.get(k).map_or(0, |l| l.len())
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.labels.iter().map(|l| l.len()).collect()
    }

    pub fn labels(&self, k: usize) -> &[String] {
        self.labels.get(k).map_or(&[], |l| l.as_slice())
    }

    /// `d_k`, with an empty matrix of the right shape outside the stored range.
    pub fn boundary(&self, k: usize) -> IntMatrix {
        if k < self.boundary.len() {
            self.boundary[k].clone()
        } else {
            IntMatrix::zeros(if k == 0 { 0 } else { self.rank(k - 1) }, self.rank(k))
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.labels
            .iter()
            .enumerate()
            .map(|(k, l)| if k % 2 == 0 { l.len() as i64 } else { -(l.len() as i64) })
            .sum()
    }

    /// Prefixes every label with `prefix`.
    pub fn relabel(&self, prefix: &str) -> ChainComplex {
        ChainComplex {
            labels: self
                .labels
                .iter()
                .map(|l| l.iter().map(|s| format!("{prefix}{s}")).collect())
                .collect(),
            boundary: self.boundary.clone(),
        }
    }

    /// Index of a generator label in degree `k`.
    pub fn position(&self, k: usize, label: &str) -> Option<usize> {
        self.labels.get(k)?.iter().position(|l| l == label)
    }
}

/// Tensor product over Z, with `d(a x b) = da x b + (-1)^|a| a x db`.
/// Generators of degree `n` are ordered by the degree of the left factor,
/// then lexicographically by factor positions. Labels are `a*b`.
pub fn tensor(a: &ChainComplex, b: &ChainComplex) -> ChainComplex {
    if a.is_empty() || b.is_empty() {
        return ChainComplex::zero();
    }
    let top = a.len() + b.len() - 1;
    // index[n] lists (i, ia, ib) for generator a_i[ia] x b_(n-i)[ib]
    let mut index: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); top];
    for (n, gens) in index.iter_mut().enumerate() {
        for i in 0..a.len() {
            if n < i || n - i >= b.len() {
                continue;
            }
            for ia in 0..a.rank(i) {
                for ib in 0..b.rank(n - i) {
                    gens.push((i, ia, ib));
                }
            }
        }
    }
    let labels: Vec<Vec<String>> = index
        .iter()
        .enumerate()
        .map(|(n, gens)| {
            gens.iter()
                .map(|&(i, ia, ib)| format!("{}*{}", a.labels(i)[ia], b.labels(n - i)[ib]))
                .collect()
        })
        .collect();
    let mut boundary = Vec::with_capacity(top);
    for n in 0..top {
        let rows = if n == 0 { 0 } else { index[n - 1].len() };
        let mut d = IntMatrix::zeros(rows, index[n].len());
        if n > 0 {
            let lookup = |i: usize, ia: usize, ib: usize| index[n - 1].iter().position(|&g| g == (i, ia, ib));
            for (col, &(i, ia, ib)) in index[n].iter().enumerate() {
                let j = n - i;
                if i > 0 {
                    let da = a.boundary(i);
                    for r in 0..da.rows() {
                        let v = da.get(r, ia);
                        if v != 0 {
                            let row = lookup(i - 1, r, ib).expect("generator exists");
                            d.set(row, col, d.get(row, col) + v);
                        }
                    }
                }
                if j > 0 {
                    let db = b.boundary(j);
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    for r in 0..db.rows() {
                        let v = db.get(r, ib);
                        if v != 0 {
                            let row = lookup(i, ia, r).expect("generator exists");
                            d.set(row, col, d.get(row, col) + sign * v);
                        }
                    }
                }
            }
        }
        boundary.push(d);
    }
    ChainComplex { labels, boundary }
}

/// Direct sum; labels of the summands are kept and should already be distinct.
pub fn direct_sum(a: &ChainComplex, b: &ChainComplex) -> ChainComplex {
    let top = a.len().max(b.len());
    let labels = (0..top)
        .map(|k| a.labels(k).iter().chain(b.labels(k)).cloned().collect())
        .collect();
    let boundary = (0..top)
        .map(|k| IntMatrix::block_diag(&a.boundary(k), &b.boundary(k)))
        .collect();
    ChainComplex { labels, boundary }
}

/// A degree-preserving map of chain complexes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainMap {
    source: ChainComplex,
    target: ChainComplex,
    /// `maps[k]` has shape `rank target_k x rank source_k`.
    maps: Vec<IntMatrix>,
}

impl ChainMap {
    /// Validates shapes and `f d = d f` in every degree.
    pub fn new(source: ChainComplex, target: ChainComplex, maps: Vec<IntMatrix>) -> Result<Self> {
        let top = source.len().max(target.len());
        let mut full = Vec::with_capacity(top);
        for k in 0..top {
            let m = maps
                .get(k)
                .cloned()
                .unwrap_or_else(|| IntMatrix::zeros(target.rank(k), source.rank(k)));
            if m.rows() != target.rank(k) || m.cols() != source.rank(k) {
                return Err(Error::MatrixShape {
                    degree: k,
                    rows: m.rows(),
                    cols: m.cols(),
                    expected_rows: target.rank(k),
                    expected_cols: source.rank(k),
                });
            }
            full.push(m);
        }
        if maps.len() > top {
            return Err(Error::DimensionMismatch {
                expected: top,
                got: maps.len(),
            });
        }
        let f = ChainMap {
            source,
            target,
            maps: full,
        };
        for k in 1..top {
            let lhs = f.maps[k - 1].mul(&f.source.boundary(k));
            let rhs = f.target.boundary(k).mul(&f.maps[k]);
            if lhs != rhs {
                return Err(Error::NotAChainMap { degree: k });
            }
        }
        Ok(f)
    }

    pub fn source(&self) -> &ChainComplex {
        &self.source
    }

    pub fn target(&self) -> &ChainComplex {
        &self.target
    }

    pub fn matrix(&self, k: usize) -> IntMatrix {
        self.maps
            .get(k)
            .cloned()
            .unwrap_or_else(|| IntMatrix::zeros(self.target.rank(k), self.source.rank(k)))
    }

    /// `f x g : A x C -> B x D`.
    pub fn tensor(f: &ChainMap, g: &ChainMap) -> ChainMap {
        let source = tensor(&f.source, &g.source);
        let target = tensor(&f.target, &g.target);
        let maps = (0..source.len().max(target.len()))
            .map(|n| {
                IntMatrix::from_fn(target.rank(n), source.rank(n), |r, c| {
                    let (i, ia, ib) = split_tensor_index(&f.source, &g.source, n, c);
                    let (j, ja, jb) = split_tensor_index(&f.target, &g.target, n, r);
                    if i != j {
                        return 0;
                    }
                    f.matrix(i).get(ja, ia) * g.matrix(n - i).get(jb, ib)
                })
            })
            .collect();
        ChainMap { source, target, maps }
    }

    /// Identity map.
    pub fn identity(c: &ChainComplex) -> ChainMap {
        ChainMap {
            source: c.clone(),
            target: c.clone(),
            maps: (0..c.len()).map(|k| IntMatrix::identity(c.rank(k))).collect(),
        }
    }

    /// `a -> (f a, g a)` into the direct sum of the targets.
    pub fn pair(f: &ChainMap, g: &ChainMap) -> Result<ChainMap> {
        if f.source != g.source {
            return Err(Error::InvalidParameter {
                name: "pair",
                reason: "maps must share their source".into(),
            });
        }
        let target = direct_sum(&f.target, &g.target);
        let maps = (0..f.source.len().max(target.len()))
            .map(|k| IntMatrix::vstack(&f.matrix(k), &g.matrix(k)))
            .collect();
        ChainMap::new(f.source.clone(), target, maps)
    }
}

/// Position `idx` in degree `n` of `a x b` as `(i, ia, ib)`.
fn split_tensor_index(a: &ChainComplex, b: &ChainComplex, n: usize, mut idx: usize) -> (usize, usize, usize) {
    for i in 0..a.len() {
        if n < i || n - i >= b.len() {
            continue;
        }
        let block = a.rank(i) * b.rank(n - i);
        if idx < block {
            return (i, idx / b.rank(n - i), idx % b.rank(n - i));
        }
        idx -= block;
    }
    panic!("generator index out of range")
}

/// Mapping cone of `f : A -> B`: `Cone_n = B_n + A_(n-1)` with
/// `d(b, a) = (db + f a, -da)`. Generators of `A` are labelled `cone(a)`.
pub fn mapping_cone(f: &ChainMap) -> ChainComplex {
    let (a, b) = (&f.source, &f.target);
    let top = b.len().max(a.len() + 1);
    let labels: Vec<Vec<String>> = (0..top)
        .map(|n| {
            let mut l: Vec<String> = b.labels(n).to_vec();
            if n > 0 {
                l.extend(a.labels(n - 1).iter().map(|s| format!("cone({s})")));
            }
            l
        })
        .collect();
    let boundary = (0..top)
        .map(|n| {
            let rows = if n == 0 { 0 } else { labels[n - 1].len() };
            let (bn, an1) = (b.rank(n), if n > 0 { a.rank(n - 1) } else { 0 });
            IntMatrix::from_fn(rows, bn + an1, |r, c| {
                let bm1 = if n > 0 { b.rank(n - 1) } else { 0 };
                match (r < bm1, c < bn) {
                    (true, true) => b.boundary(n).get(r, c),
                    (true, false) => f.matrix(n - 1).get(r, c - bn),
                    (false, true) => 0,
                    (false, false) => -a.boundary(n - 1).get(r - bm1, c - bn),
                }
            })
        })
        .collect();
    ChainComplex { labels, boundary }
}
