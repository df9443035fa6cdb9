//! Fixtures shared by the benchmarks.

use syz_core::bside::LaurentPoly;

/// `(z_0 ... z_n)^k (1 + u_1 + ... + u_m)`, whose normal form needs `k`
/// nested rewrites per term.
pub fn tower(n: usize, m: usize, k: u32) -> LaurentPoly {
    LaurentPoly::z_product(n, m)
        .pow(k)
        .mul(&LaurentPoly::g(n, m))
        .expect("same variables")
}
