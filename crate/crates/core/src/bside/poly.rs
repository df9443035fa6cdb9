use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exponent vector `(z_0, ..., z_n, u_1, ..., u_m)`, ordered graded
/// lexicographically: by total degree, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<i64>);

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let da: i64 = self.0.iter().sum();
        let db: i64 = other.0.iter().sum();
        da.cmp(&db).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Laurent polynomial with rational coefficients in `z_0, ..., z_n`
/// (nonnegative exponents) and `u_1, ..., u_m` (integer exponents).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    n: usize,
    m: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl LaurentPoly {
    pub fn zero(n: usize, m: usize) -> Self {
        LaurentPoly {
            n,
            m,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, m: usize, c: BigRational) -> Self {
        let mut p = LaurentPoly::zero(n, m);
        p.add_term(vec![0; n + 1 + m], c);
        p
    }

    pub fn one(n: usize, m: usize) -> Self {
        LaurentPoly::constant(n, m, BigRational::one())
    }

    /// Single term `c * z^a u^b`. Fails on negative z-exponents or wrong length.
    pub fn monomial(n: usize, m: usize, exponents: Vec<i64>, c: BigRational) -> Result<Self> {
        if exponents.len() != n + 1 + m {
            return Err(Error::DimensionMismatch {
                expected: n + 1 + m,
                got: exponents.len(),
            });
        }
        if exponents[..=n].iter().any(|&e| e < 0) {
            return Err(Error::InvalidParameter {
                name: "exponents",
                reason: "z-exponents must be nonnegative".into(),
            });
        }
        let mut p = LaurentPoly::zero(n, m);
        p.add_term(exponents, c);
        Ok(p)
    }

    /// The variable `z_i`, `0 <= i <= n`.
    pub fn z(n: usize, m: usize, i: usize) -> Self {
        let mut e = vec![0; n + 1 + m];
        e[i] = 1;
        let mut p = LaurentPoly::zero(n, m);
        p.add_term(e, BigRational::one());
        p
    }

    /// `u_j^power`, `1 <= j <= m`.
    pub fn u(n: usize, m: usize, j: usize, power: i64) -> Self {
        let mut e = vec![0; n + 1 + m];
        e[n + j] = power;
        let mut p = LaurentPoly::zero(n, m);
        p.add_term(e, BigRational::one());
        p
    }

    /// `z_0 ... z_n`.
    pub fn z_product(n: usize, m: usize) -> Self {
        LaurentPoly::z(n, m, 0).mul(&LaurentPoly::z_product_without_z0(n, m)).expect("same variables")
    }

    /// `z_1 ... z_n`.
    pub fn z_product_without_z0(n: usize, m: usize) -> Self {
        let mut e = vec![0; n + 1 + m];
        for x in e.iter_mut().take(n + 1).skip(1) {
            *x = 1;
        }
        let mut p = LaurentPoly::zero(n, m);
        p.add_term(e, BigRational::one());
        p
    }

    /// `1 + u_1 + ... + u_m`.
    pub fn g(n: usize, m: usize) -> Self {
        let mut p = LaurentPoly::one(n, m);
        for j in 1..=m {
            p = p.add(&LaurentPoly::u(n, m, j, 1)).expect("same variables");
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub(crate) fn add_term(&mut self, exponents: Vec<i64>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let key = Monomial(exponents);
        let remove = match self.terms.get_mut(&key) {
            Some(v) => {
                *v += c;
                v.is_zero()
            }
            None => {
                self.terms.insert(key.clone(), c);
                false
            }
        };
        if remove {
            self.terms.remove(&key);
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.n != other.n || self.m != other.m {
            return Err(Error::VariableMismatch {
                left: format!("(n={}, m={})", self.n, self.m),
                right: format!("(n={}, m={})", other.n, other.m),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.0.clone(), v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        LaurentPoly {
            n: self.n,
            m: self.m,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), -v)).collect(),
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return LaurentPoly::zero(self.n, self.m);
        }
        LaurentPoly {
            n: self.n,
            m: self.m,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = LaurentPoly::zero(self.n, self.m);
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                let e = ka.0.iter().zip(&kb.0).map(|(a, b)| a + b).collect();
                out.add_term(e, va * vb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = LaurentPoly::one(self.n, self.m);
        for _ in 0..k {
            out = out.mul(self).expect("same variables");
        }
        out
    }

    /// Formal partial derivative in variable `v` (z-variables first).
    pub fn derivative(&self, v: usize) -> Self {
        let mut out = LaurentPoly::zero(self.n, self.m);
        for (k, c) in &self.terms {
            let e = k.0[v];
            if e != 0 {
                let mut exps = k.0.clone();
                exps[v] -= 1;
                out.add_term(exps, c * BigRational::from_integer(BigInt::from(e)));
            }
        }
        out
    }

    /// Value at a point given as `(z_0, ..., z_n, u_1, ..., u_m)`. Returns
    /// `None` if a negative power meets a zero coordinate.
    pub fn evaluate(&self, point: &[BigRational]) -> Option<BigRational> {
        assert_eq!(point.len(), self.n + 1 + self.m, "point has wrong length");
        let mut total = BigRational::zero();
        for (k, c) in &self.terms {
            let mut term = c.clone();
            for (x, &e) in point.iter().zip(&k.0) {
                if e > 0 {
                    term *= num_traits::pow(x.clone(), e as usize);
                } else if e < 0 {
                    if x.is_zero() {
                        return None;
                    }
                    term /= num_traits::pow(x.clone(), (-e) as usize);
                }
            }
            total += term;
        }
        Some(total)
    }

    /// Constant polynomials and single u-monomials are units of the ring.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .keys()
                .next()
                .is_some_and(|k| k.0[..=self.n].iter().all(|&e| e == 0))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().all(|k| k.0.iter().all(|&e| e == 0)))
    }

    pub fn variable_name(&self, v: usize) -> String {
        if v <= self.n {
            format!("z{v}")
        } else {
            format!("u{}", v - self.n)
        }
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            let vars: Vec<String> = k
                .0
                .iter()
                .enumerate()
                .filter(|(_, &e)| e != 0)
                .map(|(v, &e)| {
                    let name = self.variable_name(v);
                    if e == 1 {
                        name
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            let (neg, mag) = (c.is_negative(), c.abs());
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            match (vars.is_empty(), mag.is_one()) {
                (true, _) => write!(f, "{mag}")?,
                (false, true) => write!(f, "{}", vars.join("*"))?,
                (false, false) => write!(f, "{mag}*{}", vars.join("*"))?,
            }
        }
        Ok(())
    }
}
