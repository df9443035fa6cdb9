use std::fmt;

use num_rational::BigRational;

use super::poly::{LaurentPoly, Monomial};

/// Element of `Q[z_0, ..., z_n, u^±] / (z_0 ... z_n - 1 - u_1 - ... - u_m)`
/// held in normal form: no monomial is divisible by the full product `z_0 ... z_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuotientElement {
    poly: LaurentPoly,
}

impl QuotientElement {
    pub fn poly(&self) -> &LaurentPoly {
        &self.poly
    }

    pub fn into_poly(self) -> LaurentPoly {
        self.poly
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
}

impl fmt::Display for QuotientElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.poly.fmt(f)
    }
}

fn reducible(mono: &Monomial, n: usize) -> bool {
    mono.0[..=n].iter().all(|&e| e >= 1)
}

/// Normal form with the default rewrite order (largest reducible term first).
pub fn normal_form(a: &LaurentPoly, n: usize, m: usize) -> QuotientElement {
    normal_form_with(a, n, m, |sites| sites.len() - 1)
}

/// Normal form where `choose` picks which reducible term is rewritten next,
/// given the reducible monomials in ascending term order. Each rewrite
/// replaces one copy of `z_0 ... z_n` by `1 + u_1 + ... + u_m`, lowering the
/// total z-degree of that term by `n + 1`, so the loop terminates.
pub fn normal_form_with(
    a: &LaurentPoly,
    n: usize,
    m: usize,
    mut choose: impl FnMut(&[Monomial]) -> usize,
) -> QuotientElement {
    assert!(
        a.n() == n && a.m() == m,
        "polynomial variables (n={}, m={}) do not match (n={n}, m={m})",
        a.n(),
        a.m()
    );
    let mut p = a.clone();
    loop {
        let sites: Vec<Monomial> = p.terms().filter(|(k, _)| reducible(k, n)).map(|(k, _)| k.clone()).collect();
        if sites.is_empty() {
            return QuotientElement { poly: p };
        }
        let pick = choose(&sites).min(sites.len() - 1);
        let mono = sites[pick].clone();
        let c: BigRational = p.terms().find(|(k, _)| **k == mono).map(|(_, c)| c.clone()).expect("site present");
        p.add_term(mono.0.clone(), -c.clone());
        let mut base = mono.0;
        for e in base.iter_mut().take(n + 1) {
            *e -= 1;
        }
        p.add_term(base.clone(), c.clone());
        for j in 1..=m {
            let mut e = base.clone();
            e[n + j] += 1;
            p.add_term(e, c.clone());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::{One, Zero};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(a: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(a))
    }

    pub(crate) fn random_poly(rng: &mut impl Rng, n: usize, m: usize, max_z_deg: i64) -> LaurentPoly {
        let mut p = LaurentPoly::zero(n, m);
        for _ in 0..rng.gen_range(1..=6) {
            let mut e = vec![0i64; n + 1 + m];
            let mut budget = rng.gen_range(0..=max_z_deg);
            for i in 0..=n {
                let k = rng.gen_range(0..=budget.min(3));
                e[i] = k;
                budget -= k;
            }
            for j in 0..m {
                e[n + 1 + j] = rng.gen_range(-2..=2);
            }
            let c = BigRational::new(BigInt::from(rng.gen_range(-9..=9)), BigInt::from(rng.gen_range(1..=4)));
            p.add_term(e, c);
        }
        p
    }

    /// Direct formula: `z^a u^b` with `k = min_i a_i` reduces to
    /// `z^(a-k) u^b (1 + sum u)^k`.
    fn closed_form(a: &LaurentPoly, n: usize, m: usize) -> LaurentPoly {
        let mut out = LaurentPoly::zero(n, m);
        for (k, c) in a.terms() {
            let t = *k.0[..=n].iter().min().unwrap();
            let mut e = k.0.clone();
            for x in e.iter_mut().take(n + 1) {
                *x -= t;
            }
            let mono = LaurentPoly::monomial(n, m, e, c.clone()).unwrap();
            out = out.add(&mono.mul(&LaurentPoly::g(n, m).pow(t as u32)).unwrap()).unwrap();
        }
        out
    }

    #[test]
    fn examples() {
        let z0z1 = LaurentPoly::z(1, 1, 0).mul(&LaurentPoly::z(1, 1, 1)).unwrap();
        assert_eq!(normal_form(&z0z1, 1, 1).to_string(), "1 + u1");
        assert_eq!(normal_form(&z0z1.pow(2), 1, 1).to_string(), "1 + 2*u1 + u1^2");
        let z0z1_in_x2 = LaurentPoly::z(2, 1, 0).mul(&LaurentPoly::z(2, 1, 1)).unwrap();
        assert_eq!(normal_form(&z0z1_in_x2, 2, 1).poly(), &z0z1_in_x2);
    }

    #[test]
    fn matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let n = rng.gen_range(1..=3);
            let m = rng.gen_range(0..=3);
            let a = random_poly(&mut rng, n, m, 6);
            assert_eq!(normal_form(&a, n, m).into_poly(), closed_form(&a, n, m));
        }
    }

    #[test]
    fn confluent_under_random_site_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=4);
            let m = rng.gen_range(0..=4);
            let a = random_poly(&mut rng, n, m, 6);
            let reference = normal_form(&a, n, m);
            let mut order_rng = ChaCha8Rng::seed_from_u64(rng.gen());
            let shuffled = normal_form_with(&a, n, m, |s| order_rng.gen_range(0..s.len()));
            assert_eq!(reference, shuffled);
        }
    }

    #[test]
    fn evaluation_compatible_on_points_of_x() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.gen_range(1..=4);
            let m = rng.gen_range(0..=4);
            let a = random_poly(&mut rng, n, m, 6);
            let point = super::super::checks::random_point(&mut rng, n, m);
            assert!((LaurentPoly::z_product(n, m).sub(&LaurentPoly::g(n, m)).unwrap())
                .evaluate(&point)
                .unwrap()
                .is_zero());
            assert_eq!(a.evaluate(&point), normal_form(&a, n, m).poly().evaluate(&point));
        }
    }

    fn arb_poly(n: usize, m: usize) -> impl Strategy<Value = LaurentPoly> {
        let term = (
            proptest::collection::vec(0i64..=3, n + 1),
            proptest::collection::vec(-2i64..=2, m),
            -5i64..=5,
        );
        proptest::collection::vec(term, 0..5).prop_map(move |ts| {
            let mut p = LaurentPoly::zero(n, m);
            for (z, u, c) in ts {
                p.add_term(z.into_iter().chain(u).collect(), q(c));
            }
            p
        })
    }

    fn arb_case() -> impl Strategy<Value = (usize, usize, LaurentPoly, LaurentPoly)> {
        (1usize..=4, 0usize..=4).prop_flat_map(|(n, m)| (Just(n), Just(m), arb_poly(n, m), arb_poly(n, m)))
    }

    proptest! {
        #[test]
        fn idempotent((n, m, a, _b) in arb_case()) {
            let once = normal_form(&a, n, m);
            prop_assert_eq!(normal_form(once.poly(), n, m), once);
        }

        #[test]
        fn ring_homomorphism((n, m, a, b) in arb_case()) {
            let na = normal_form(&a, n, m).into_poly();
            let nb = normal_form(&b, n, m).into_poly();
            prop_assert_eq!(
                normal_form(&a.mul(&b).unwrap(), n, m),
                normal_form(&na.mul(&nb).unwrap(), n, m)
            );
            prop_assert_eq!(normal_form(&a.add(&b).unwrap(), n, m).into_poly(), na.add(&nb).unwrap());
            prop_assert!(normal_form(&LaurentPoly::one(n, m), n, m).poly().terms().all(|(_, c)| c.is_one()));
        }
    }
}
