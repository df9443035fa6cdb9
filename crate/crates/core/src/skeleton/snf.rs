//! Smith normal form over the integers with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::BigMatrix;

/// `u * a * v = d` with `u`, `v` unimodular and `d` diagonal, its nonzero
/// entries `d_0 | d_1 | ...` positive. The inverses are tracked alongside.
#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Nonzero diagonal entries.
    pub invariants: Vec<BigInt>,
    pub u: BigMatrix,
    pub u_inv: BigMatrix,
    pub v: BigMatrix,
    pub v_inv: BigMatrix,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariants.len()
    }
}

struct State {
    a: BigMatrix,
    u: BigMatrix,
    u_inv: BigMatrix,
    v: BigMatrix,
    v_inv: BigMatrix,
}

impl State {
    /// row_i -= q * row_t
    fn row_sub(&mut self, i: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for m in [&mut self.a, &mut self.u] {
            let (ri, rt) = two_rows(&mut m.data, i, t);
            for (x, y) in ri.iter_mut().zip(rt.iter()) {
                if !y.is_zero() {
                    *x -= q * y;
                }
            }
        }
        // u_inv <- u_inv * E^-1: col_t += q * col_i
        for row in self.u_inv.data.iter_mut() {
            if !row[i].is_zero() {
                let add = q * &row[i];
                row[t] += add;
            }
        }
    }

    /// col_j -= q * col_t
    fn col_sub(&mut self, j: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for m in [&mut self.a, &mut self.v] {
            for row in m.data.iter_mut() {
                if !row[t].is_zero() {
                    let sub = q * &row[t];
                    row[j] -= sub;
                }
            }
        }
        // v_inv <- F^-1 * v_inv: row_t += q * row_j
        let (rt, rj) = two_rows(&mut self.v_inv.data, t, j);
        for (x, y) in rt.iter_mut().zip(rj.iter()) {
            if !y.is_zero() {
                *x += q * y;
            }
        }
    }

    fn swap_rows(&mut self, i: usize, t: usize) {
        if i == t {
            return;
        }
        self.a.data.swap(i, t);
        self.u.data.swap(i, t);
        for row in self.u_inv.data.iter_mut() {
            row.swap(i, t);
        }
    }

    fn swap_cols(&mut self, j: usize, t: usize) {
        if j == t {
            return;
        }
        for m in [&mut self.a, &mut self.v] {
            for row in m.data.iter_mut() {
                row.swap(j, t);
            }
        }
        self.v_inv.data.swap(j, t);
    }

    fn negate_row(&mut self, t: usize) {
        for m in [&mut self.a, &mut self.u] {
            for x in m.data[t].iter_mut() {
                *x = -&*x;
            }
        }
        for row in self.u_inv.data.iter_mut() {
            row[t] = -&row[t];
        }
    }
}

fn two_rows<T>(data: &mut [Vec<T>], i: usize, t: usize) -> (&mut Vec<T>, &Vec<T>) {
    assert_ne!(i, t);
    if i < t {
        let (lo, hi) = data.split_at_mut(t);
        (&mut lo[i], &hi[0])
    } else {
        let (lo, hi) = data.split_at_mut(i);
        (&mut hi[0], &lo[t])
    }
}

/// Computes the Smith normal form of `a`.
pub fn smith_normal_form(a: &BigMatrix) -> SmithForm {
    let (m, n) = (a.rows, a.cols);
    let mut s = State {
        a: a.clone(),
        u: BigMatrix::identity(m),
        u_inv: BigMatrix::identity(m),
        v: BigMatrix::identity(n),
        v_inv: BigMatrix::identity(n),
    };
    let mut invariants = Vec::new();
    for t in 0..m.min(n) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let mut best: Option<(usize, usize, BigInt)> = None;
        for i in t..m {
            for j in t..n {
                let v = &s.a.data[i][j];
                if !v.is_zero() && best.as_ref().is_none_or(|b| v.abs() < b.2) {
                    best = Some((i, j, v.abs()));
                }
            }
        }
        let Some((bi, bj, _)) = best else { break };
        s.swap_rows(bi, t);
        s.swap_cols(bj, t);
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if s.a.data[i][t].is_zero() {
                    continue;
                }
                let q = s.a.data[i][t].div_floor(&s.a.data[t][t]);
                s.row_sub(i, t, &q);
                if !s.a.data[i][t].is_zero() {
                    // remainder is smaller than the pivot: promote it
                    s.swap_rows(i, t);
                    dirty = true;
                }
            }
            for j in t + 1..n {
                if s.a.data[t][j].is_zero() {
                    continue;
                }
                let q = s.a.data[t][j].div_floor(&s.a.data[t][t]);
                s.col_sub(j, t, &q);
                if !s.a.data[t][j].is_zero() {
                    s.swap_cols(j, t);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility of the trailing block by the pivot
            let pivot = s.a.data[t][t].clone();
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !s.a.data[i][j].is_multiple_of(&pivot)));
            match bad {
                Some(i) => {
                    // row_t += row_i brings a non-multiple into row t
                    s.row_sub(t, i, &BigInt::from(-1));
                }
                None => break,
            }
        }
        if s.a.data[t][t].is_negative() {
            s.negate_row(t);
        }
        invariants.push(s.a.data[t][t].clone());
    }
    SmithForm {
        invariants,
        u: s.u,
        u_inv: s.u_inv,
        v: s.v,
        v_inv: s.v_inv,
    }
}
