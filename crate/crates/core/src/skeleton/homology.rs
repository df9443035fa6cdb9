//! Integral homology with explicit cycle bases, induced maps, and exactness
//! of sequences of free abelian groups.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::complex::ChainComplex;
use super::matrix::{BigMatrix, IntMatrix};
use super::snf::smith_normal_form;
use crate::error::{Error, Result};

/// `H_k = Z^rank + sum Z/torsion_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub rank: usize,
    /// Orders at least 2, each dividing the next.
    #[serde(with = "decimal")]
    pub torsion: Vec<BigUint>,
}

impl HomologyGroup {
    pub fn free(rank: usize) -> Self {
        HomologyGroup { rank, torsion: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyTable {
    pub groups: Vec<HomologyGroup>,
}

impl HomologyTable {
    pub fn ranks(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.rank).collect()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.groups.iter().all(|g| g.torsion.is_empty())
    }

    /// Alternating sum of free ranks.
    pub fn euler_characteristic(&self) -> i64 {
        self.groups
            .iter()
            .enumerate()
            .map(|(k, g)| if k % 2 == 0 { g.rank as i64 } else { -(g.rank as i64) })
            .sum()
    }

    /// Ranks with trailing zero groups removed.
    pub fn trimmed_ranks(&self) -> Vec<usize> {
        let mut r = self.ranks();
        while r.len() > 1 && r.last() == Some(&0) && self.groups[r.len() - 1].torsion.is_empty() {
            r.pop();
        }
        r
    }
}

/// Torsion orders serialize as decimal strings.
mod decimal {
    use num_bigint::BigUint;
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|x| x.to_string()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigUint>, D::Error> {
        Vec::<String>::deserialize(d)?
            .iter()
            .map(|s| s.parse().map_err(D::Error::custom))
            .collect()
    }
}

/// Homology of one degree together with the data needed to name classes.
#[derive(Clone, Debug)]
pub(crate) struct DegreeData {
    group: HomologyGroup,
    /// Rank of `d_k`.
    r: usize,
    /// `V^-1` of the SNF of `d_k`; rows `r..` give kernel coordinates.
    v_inv: BigMatrix,
    /// `U'` of the SNF of the boundaries in kernel coordinates.
    u_prime: BigMatrix,
    /// Rank of the boundary map in kernel coordinates.
    r_prime: usize,
    /// Free generators as cycles in `C_k`.
    pub generators: Vec<Vec<BigInt>>,
}

impl DegreeData {
    /// Coordinates of the class of `cycle` in the free part.
    pub(crate) fn class_of(&self, cycle: &[BigInt]) -> Option<Vec<BigInt>> {
        let coords = self.v_inv.mul_vec(cycle);
        if coords[..self.r].iter().any(|c| !c.is_zero()) {
            return None;
        }
        let y = self.u_prime.mul_vec(&coords[self.r..]);
        Some(y[self.r_prime..].to_vec())
    }
}

pub(crate) fn degree_data(cc: &ChainComplex) -> Vec<DegreeData> {
    (0..cc.len())
        .map(|k| {
            let dk = cc.boundary(k).to_big();
            let snf = smith_normal_form(&dk);
            let r = snf.rank();
            let n = cc.rank(k);
            let z = n - r;
            let next = cc.boundary(k + 1).to_big();
            // boundaries in kernel coordinates
            let coords = snf.v_inv.mul(&next);
            let x = BigMatrix::from_fn(z, next.cols(), |i, j| coords.get(r + i, j).clone());
            let snf2 = smith_normal_form(&x);
            let r_prime = snf2.rank();
            let torsion = snf2
                .invariants
                .iter()
                .filter(|d| !d.is_one())
                .map(|d| d.magnitude().clone())
                .collect();
            let kernel = BigMatrix::from_fn(n, z, |i, j| snf.v.get(i, r + j).clone());
            let gens_coords = snf2.u_inv;
            let generators = (r_prime..z)
                .map(|j| kernel.mul_vec(&gens_coords.column(j)))
                .collect();
            DegreeData {
                group: HomologyGroup {
                    rank: z - r_prime,
                    torsion,
                },
                r,
                v_inv: snf.v_inv,
                u_prime: snf2.u,
                r_prime,
                generators,
            }
        })
        .collect()
}

/// Integral homology via Smith normal form. The complex's constructor has
/// already enforced `d . d = 0`.
pub fn homology(cc: &ChainComplex) -> HomologyTable {
    HomologyTable {
        groups: degree_data(cc).into_iter().map(|d| d.group).collect(),
    }
}

/// Matrix of the map induced on free homology by a linear map sending
/// `C_k` of `source` to `C_(k + shift)` of `target`. The map must send cycles
/// to cycles and boundaries to boundaries; only the first is checked.
pub(crate) fn induced_map(
    matrix: &IntMatrix,
    source: &DegreeData,
    target: &DegreeData,
    degree: usize,
) -> Result<BigMatrix> {
    let big = matrix.to_big();
    let cols: Vec<Vec<BigInt>> = source
        .generators
        .iter()
        .map(|g| {
            let image = big.mul_vec(g);
            target.class_of(&image).ok_or(Error::NotAChainMap { degree })
        })
        .collect::<Result<_>>()?;
    Ok(BigMatrix::from_fn(target.group.rank, cols.len(), |i, j| cols[j][i].clone()))
}

pub(crate) fn group_of(d: &DegreeData) -> &HomologyGroup {
    &d.group
}

/// Exactness of `X --alpha--> Y --beta--> Z` at `Y` for free groups:
/// `beta alpha = 0`, `rank alpha + rank beta = dim Y`, and the image of
/// `alpha` is saturated (all invariant factors 1), which together give
/// `im alpha = ker beta` over Z.
pub fn exact_at(alpha: &BigMatrix, beta: &BigMatrix, dim_y: usize) -> bool {
    assert_eq!(alpha.rows(), dim_y);
    assert_eq!(beta.cols(), dim_y);
    if !beta.mul(alpha).is_zero() {
        return false;
    }
    let sa = smith_normal_form(alpha);
    let sb = smith_normal_form(beta);
    sa.rank() + sb.rank() == dim_y && sa.invariants.iter().all(|d| d.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complex(labels: &[&[&str]], d: Vec<IntMatrix>) -> ChainComplex {
        ChainComplex::new(
            labels.iter().map(|l| l.iter().map(|s| s.to_string()).collect()).collect(),
            d,
        )
        .unwrap()
    }

    #[test]
    fn real_projective_plane_has_torsion() {
        // RP^2: one cell per degree, d_1 = 0, d_2 = 2
        let c = complex(
            &[&["v"], &["e"], &["f"]],
            vec![IntMatrix::zeros(0, 1), IntMatrix::zeros(1, 1), IntMatrix::from_fn(1, 1, |_, _| 2)],
        );
        let h = homology(&c);
        assert_eq!(h.ranks(), vec![1, 0, 0]);
        assert_eq!(h.groups[1].torsion, vec![BigUint::from(2u32)]);
        assert_eq!(h.euler_characteristic(), c.euler_characteristic());
    }

    #[test]
    fn interval_is_contractible_and_classes_are_named() {
        let c = complex(
            &[&["a", "b"], &["ab"]],
            vec![IntMatrix::zeros(0, 2), IntMatrix::from_fn(2, 1, |i, _| if i == 0 { -1 } else { 1 })],
        );
        let data = degree_data(&c);
        assert_eq!(data[0].group, HomologyGroup::free(1));
        assert_eq!(data[1].group, HomologyGroup::free(0));
        // both vertices represent the same generator up to sign
        let ca = data[0].class_of(&[BigInt::from(1), BigInt::from(0)]).unwrap();
        let cb = data[0].class_of(&[BigInt::from(0), BigInt::from(1)]).unwrap();
        assert_eq!(ca, cb);
        assert!(ca[0] == BigInt::from(1) || ca[0] == BigInt::from(-1));
    }

    #[test]
    fn exactness_detects_multiplication_by_two() {
        let two = BigMatrix::from_fn(1, 1, |_, _| BigInt::from(2));
        let zero = BigMatrix::zeros(0, 1);
        // Z --2--> Z --> 0 is not exact at the middle over Z
        assert!(!exact_at(&two, &zero, 1));
        let one = BigMatrix::identity(1);
        assert!(exact_at(&one, &zero, 1));
    }
}
