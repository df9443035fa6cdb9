use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::normal::normal_form;
use super::poly::LaurentPoly;
use crate::error::{Error, Result};

fn small_nonzero(rng: &mut impl Rng) -> BigRational {
    let num = rng.gen_range(1..=7) * if rng.gen() { 1 } else { -1 };
    BigRational::new(BigInt::from(num), BigInt::from(rng.gen_range(1..=4)))
}

/// Random rational point `(z_0, ..., z_n, u_1, ..., u_m)` of `X(n, m)`:
/// all coordinates but `z_0` are nonzero and `z_0 = (1 + sum u) / (z_1 ... z_n)`.
pub(crate) fn random_point(rng: &mut impl Rng, n: usize, m: usize) -> Vec<BigRational> {
    let z: Vec<BigRational> = (0..n).map(|_| small_nonzero(rng)).collect();
    let u: Vec<BigRational> = (0..m).map(|_| small_nonzero(rng)).collect();
    let g = u.iter().fold(BigRational::one(), |a, b| a + b);
    let f = z.iter().fold(BigRational::one(), |a, b| a * b);
    std::iter::once(g / f).chain(z).chain(u).collect()
}

fn rand_poly(rng: &mut impl Rng, n: usize, m: usize) -> LaurentPoly {
    let mut p = LaurentPoly::zero(n, m);
    for _ in 0..rng.gen_range(1..=4) {
        let mut e: Vec<i64> = (0..=n).map(|_| rng.gen_range(0..=2)).collect();
        e.extend((0..m).map(|_| rng.gen_range(-1..=1)));
        p.add_term(e, BigRational::from_integer(BigInt::from(rng.gen_range(-5..=5))));
    }
    p
}

/// Fails with the reduced residual unless `poly` is zero in the quotient ring.
pub fn check_vanishes(identity: &str, poly: &LaurentPoly) -> Result<()> {
    let r = normal_form(poly, poly.n(), poly.m());
    if r.is_zero() {
        Ok(())
    } else {
        Err(Error::IdentityFailed {
            identity: identity.to_string(),
            residual: r.to_string(),
        })
    }
}

/// Rank and a primitive integer nullspace basis of an integer matrix, by
/// fraction-free (Bareiss) elimination and rational back substitution.
fn rank_and_kernel(mut rows: Vec<Vec<BigInt>>, ncols: usize) -> (usize, Vec<Vec<BigInt>>) {
    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot_row = &head[r];
        for row in tail.iter_mut() {
            for k in c + 1..ncols {
                let v = &pivot_row[c] * &row[k] - &row[c] * &pivot_row[k];
                row[k] = v / &prev;
            }
            row[c] = BigInt::zero();
        }
        prev = rows[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    let mut kernel = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut x = vec![BigRational::zero(); ncols];
        x[free] = BigRational::one();
        for (i, &pc) in pivots.iter().enumerate().rev() {
            let s: BigRational = (pc + 1..ncols)
                .filter(|&k| !x[k].is_zero() && !rows[i][k].is_zero())
                .map(|k| &x[k] * BigRational::from_integer(rows[i][k].clone()))
                .sum();
            x[pc] = -s / BigRational::from_integer(rows[i][pc].clone());
        }
        kernel.push(primitive(&x));
    }
    (r, kernel)
}

fn primitive(x: &[BigRational]) -> Vec<BigInt> {
    let l = x.iter().fold(BigInt::one(), |a, v| a.lcm(v.denom()));
    let ints: Vec<BigInt> = x.iter().map(|v| v.numer() * (&l / v.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |a, v| a.gcd(v));
    ints.into_iter().map(|v| if g.is_zero() { v } else { v / &g }).collect()
}

fn integer_row(row: Vec<BigRational>) -> Vec<BigInt> {
    let l = row.iter().fold(BigInt::one(), |a, v| a.lcm(v.denom()));
    row.into_iter().map(|v| v.numer() * (&l / v.denom())).collect()
}

/// Point of `X(n, m)` with integer coordinates when `m >= 1` (solving for `u_1`),
/// otherwise a rational point with `z_0 = 1 / (z_1 ... z_n)`.
fn sample_point(rng: &mut impl Rng, n: usize, m: usize) -> Vec<BigRational> {
    if m == 0 {
        return random_point(rng, n, m);
    }
    let int = |rng: &mut ChaCha8Rng, k: i64| BigInt::from(rng.gen_range(1..=k) * if rng.gen() { 1 } else { -1 });
    let mut local = ChaCha8Rng::seed_from_u64(rng.gen());
    loop {
        let z: Vec<BigInt> = (0..=n).map(|_| int(&mut local, 3)).collect();
        let rest: Vec<BigInt> = (1..m).map(|_| int(&mut local, 5)).collect();
        let prod = z.iter().fold(BigInt::one(), |a, b| a * b);
        let u1: BigInt = prod - 1 - rest.iter().fold(BigInt::zero(), |a, b| a + b);
        if !u1.is_zero() {
            return z
                .into_iter()
                .chain(std::iter::once(u1))
                .chain(rest)
                .map(BigRational::from_integer)
                .collect();
        }
    }
}

/// Spanning monomials for the evaluation-kernel test: squarefree z-monomials
/// times `1`, `u_j` and `u_1^-1`.
fn probe_monomials(n: usize, m: usize) -> Vec<Vec<i64>> {
    let mut u_parts = vec![vec![0i64; m]];
    for j in 0..m {
        let mut e = vec![0; m];
        e[j] = 1;
        u_parts.push(e);
    }
    if m > 0 {
        let mut e = vec![0; m];
        e[0] = -1;
        u_parts.push(e);
    }
    let mut out = Vec::new();
    for mask in 0u32..(1 << (n + 1)) {
        for up in &u_parts {
            let z = (0..=n).map(|i| i64::from(mask >> i & 1));
            out.push(z.chain(up.iter().copied()).collect());
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlowupReport {
    pub n: usize,
    pub m: usize,
    /// Normal form of `z_0 f - g`.
    pub relation_residual: String,
    pub substitution_checks: usize,
    pub probe_monomials: usize,
    pub sample_points: usize,
    pub kernel_dim: usize,
    /// Rank of the probe monomials after reduction to normal form.
    pub quotient_rank: usize,
    pub kernel_samples_checked: usize,
}

/// Exact checks that `Q[z_1..z_n, u^±][z_0] / (z_0 f - g)` presents the ring
/// of `X(n, m)` with `f = z_1 ... z_n`, `g = 1 + sum u`.
pub fn verify_blowup_presentation(n: usize, m: usize, seed: u64) -> Result<BlowupReport> {
    if n < 1 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "the blowup presentation needs n >= 1".into(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = LaurentPoly::z_product_without_z0(n, m);
    let g = LaurentPoly::g(n, m);
    let z0f = LaurentPoly::z(n, m, 0).mul(&f)?;
    let relation = z0f.sub(&g)?;
    check_vanishes("z0*f - g = 0", &relation)?;

    // g/f maps to z0: after clearing denominators, a*z0*f and a*g agree.
    let substitution_checks = 50;
    for _ in 0..substitution_checks {
        let a = rand_poly(&mut rng, n, m);
        check_vanishes("a*z0*f - a*g = 0", &a.mul(&relation)?)?;
        if normal_form(&a.mul(&z0f)?, n, m) != normal_form(&a.mul(&g)?, n, m) {
            return Err(Error::IdentityFailed {
                identity: "nf(a*z0*f) = nf(a*g)".into(),
                residual: a.to_string(),
            });
        }
    }

    let probes = probe_monomials(n, m);
    let one = BigRational::one();
    let probe_polys: Vec<LaurentPoly> = probes
        .iter()
        .map(|e| LaurentPoly::monomial(n, m, e.clone(), one.clone()))
        .collect::<Result<_>>()?;
    let n_points = probes.len() + 16;
    // Columns are probes, rows are points; the kernel is a set of relations.
    let mut rows = Vec::with_capacity(n_points);
    for _ in 0..n_points {
        let pt = sample_point(&mut rng, n, m);
        rows.push(integer_row(probe_polys.iter().map(|p| p.evaluate(&pt).expect("u nonzero")).collect()));
    }
    let (_, kernel) = rank_and_kernel(rows, probes.len());

    // Coefficients of the reduced probes, one row per probe.
    let reduced: Vec<LaurentPoly> = probe_polys.iter().map(|p| normal_form(p, n, m).into_poly()).collect();
    let mut support: Vec<_> = reduced.iter().flat_map(|p| p.terms().map(|(k, _)| k.clone())).collect();
    support.sort();
    support.dedup();
    let coeff_rows: Vec<Vec<BigInt>> = (0..support.len())
        .map(|s| {
            integer_row(
                reduced
                    .iter()
                    .map(|p| p.terms().find(|(k, _)| **k == support[s]).map_or_else(BigRational::zero, |(_, c)| c.clone()))
                    .collect(),
            )
        })
        .collect();
    let (_, nf_kernel) = rank_and_kernel(coeff_rows, probes.len());
    let quotient_rank = probes.len() - nf_kernel.len();
    if kernel.len() != nf_kernel.len() {
        return Err(Error::IdentityFailed {
            identity: "dim ker(evaluation) = dim ker(normal form)".into(),
            residual: format!("{} vs {}", kernel.len(), nf_kernel.len()),
        });
    }

    let kernel_samples = if kernel.is_empty() { 0 } else { 20 };
    for _ in 0..kernel_samples {
        let mut element = LaurentPoly::zero(n, m);
        for v in &kernel {
            let c = BigRational::from_integer(BigInt::from(rng.gen_range(-9..=9)));
            for (p, x) in probe_polys.iter().zip(v) {
                if !x.is_zero() {
                    element = element.add(&p.scale(&(BigRational::from_integer(x.clone()) * &c)))?;
                }
            }
        }
        check_vanishes("kernel element = 0", &element)?;
    }

    Ok(BlowupReport {
        n,
        m,
        relation_residual: normal_form(&relation, n, m).to_string(),
        substitution_checks,
        probe_monomials: probes.len(),
        sample_points: n_points,
        kernel_dim: kernel.len(),
        quotient_rank,
        kernel_samples_checked: kernel_samples,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JacobianReport {
    pub polynomial: String,
    /// `(variable, partial derivative)` pairs.
    pub partials: Vec<(String, String)>,
    /// A variable whose partial is a unit of the Laurent ring.
    pub unit_partial: Option<String>,
    /// Identity `v * dF/dv - F = c` with `c` a nonzero constant.
    pub certificate: Option<String>,
    /// A point where `F` and all partials vanish.
    pub singular_witness: Option<Vec<i64>>,
    pub smooth: bool,
}

/// Jacobian criterion for `{F = 0}` in `C^{n+1} x (C^*)^m`.
pub fn jacobian_report(poly: &LaurentPoly) -> JacobianReport {
    let nv = poly.n() + 1 + poly.m();
    let derivs: Vec<LaurentPoly> = (0..nv).map(|v| poly.derivative(v)).collect();
    let partials = derivs
        .iter()
        .enumerate()
        .map(|(v, d)| (poly.variable_name(v), d.to_string()))
        .collect();
    let unit_partial = derivs.iter().position(|d| d.is_unit()).map(|v| poly.variable_name(v));

    let mut certificate = None;
    for (v, d) in derivs.iter().enumerate() {
        let vd = LaurentPoly::monomial(poly.n(), poly.m(), unit_vector(nv, v), BigRational::one())
            .and_then(|x| x.mul(d))
            .and_then(|x| x.sub(poly))
            .expect("same variables");
        if vd.is_constant() && !vd.is_zero() {
            certificate = Some(format!("{}*dF/d{} - F = {}", poly.variable_name(v), poly.variable_name(v), vd));
            break;
        }
    }

    let singular_witness = find_singular_point(poly, &derivs);
    JacobianReport {
        polynomial: poly.to_string(),
        partials,
        unit_partial: unit_partial.clone(),
        certificate: certificate.clone(),
        singular_witness,
        smooth: unit_partial.is_some() || certificate.is_some(),
    }
}

fn unit_vector(len: usize, k: usize) -> Vec<i64> {
    let mut e = vec![0; len];
    e[k] = 1;
    e
}

/// Searches z in {-1, 0, 1}, u in {-1, 1} for a common zero of F and its partials.
fn find_singular_point(poly: &LaurentPoly, derivs: &[LaurentPoly]) -> Option<Vec<i64>> {
    let (nz, m) = (poly.n() + 1, poly.m());
    let total = 3usize.pow(nz as u32) * 2usize.pow(m as u32);
    (0..total).find_map(|mut code| {
        let mut pt = Vec::with_capacity(nz + m);
        for _ in 0..nz {
            pt.push((code % 3) as i64 - 1);
            code /= 3;
        }
        for _ in 0..m {
            pt.push(if code % 2 == 0 { -1 } else { 1 });
            code /= 2;
        }
        let q: Vec<BigRational> = pt.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect();
        let vanishes = |p: &LaurentPoly| p.evaluate(&q).is_some_and(|v| v.is_zero());
        (vanishes(poly) && derivs.iter().all(vanishes)).then_some(pt)
    })
}

/// Smoothness of `X(n, m)` from its defining polynomial `z_0 ... z_n - 1 - sum u`.
pub fn jacobian_smoothness(n: usize, m: usize) -> Result<JacobianReport> {
    let poly = LaurentPoly::z_product(n, m).sub(&LaurentPoly::g(n, m))?;
    let report = jacobian_report(&poly);
    if !report.smooth {
        return Err(Error::IdentityFailed {
            identity: "Jacobian ideal = (1)".into(),
            residual: report.polynomial,
        });
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConeReport {
    pub n: usize,
    pub m: usize,
    pub relation_residual: String,
    pub random_elements: usize,
    /// Points of `{z_1 ... z_n = 0, 1 + sum u = 0}` used to compare images.
    pub sample_points: usize,
    /// The target ring `R/(f, g)` is zero (`m = 0` or `n = 0`).
    pub target_is_zero: bool,
}

/// `R -> R/(f)`: the monomial ideal `(z_1 ... z_n)` is dropped termwise.
fn reduce_mod_f(a: &LaurentPoly) -> LaurentPoly {
    let n = a.n();
    let mut out = LaurentPoly::zero(n, a.m());
    for (k, c) in a.terms() {
        if !k.0[1..=n].iter().all(|&e| e >= 1) {
            out.add_term(k.0.clone(), c.clone());
        }
    }
    out
}

/// Random point with some `z_i = 0` (`i >= 1`) and `1 + sum u = 0`, `u` nonzero.
fn random_point_on_base(rng: &mut impl Rng, n: usize, m: usize) -> Vec<BigRational> {
    loop {
        let mut z: Vec<BigRational> = (0..=n).map(|_| small_nonzero(rng)).collect();
        z[rng.gen_range(1..=n)] = BigRational::zero();
        let rest: Vec<BigRational> = (1..m).map(|_| small_nonzero(rng)).collect();
        let u1 = -rest.iter().fold(BigRational::one(), |a, b| a + b);
        if !u1.is_zero() {
            return z.into_iter().chain(std::iter::once(u1)).chain(rest).collect();
        }
    }
}

/// Ring-level form of the cone datum: `z_0 (z_1 ... z_n) = 1 + sum u` in the
/// quotient, and the surjections `R -> R/(f) -> R/(f, g)` agree with the
/// direct map `R -> R/(f, g)` on random elements of `R = Q[z_1..z_n, u^±]`.
pub fn cone_relation_check(n: usize, m: usize, seed: u64) -> Result<ConeReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = LaurentPoly::z_product_without_z0(n, m);
    let g = LaurentPoly::g(n, m);
    let relation = LaurentPoly::z(n, m, 0).mul(&f)?.sub(&g)?;
    check_vanishes("z0*(z1...zn) - (1 + u1 + ... + um) = 0", &relation)?;

    let target_is_zero = n == 0 || m == 0;
    let random_elements = 100;
    let points: Vec<Vec<BigRational>> = if target_is_zero {
        Vec::new()
    } else {
        (0..8).map(|_| random_point_on_base(&mut rng, n, m)).collect()
    };
    let without_z0 = |p: LaurentPoly| {
        let mut out = LaurentPoly::zero(n, m);
        for (k, c) in p.terms() {
            let mut e = k.0.clone();
            e[0] = 0;
            out.add_term(e, c.clone());
        }
        out
    };
    for _ in 0..random_elements {
        let a = without_z0(rand_poly(&mut rng, n, m));
        let h1 = without_z0(rand_poly(&mut rng, n, m));
        let h2 = without_z0(rand_poly(&mut rng, n, m));
        // R -> R/(f) is well defined.
        let shifted = a.add(&f.mul(&h1)?)?;
        if reduce_mod_f(&shifted) != reduce_mod_f(&a) {
            return Err(Error::IdentityFailed {
                identity: "a + f*h = a in R/(f)".into(),
                residual: reduce_mod_f(&shifted).sub(&reduce_mod_f(&a))?.to_string(),
            });
        }
        let via_f = reduce_mod_f(&a);
        let moved = shifted.add(&g.mul(&h2)?)?;
        for pt in &points {
            let direct = a.evaluate(pt);
            if via_f.evaluate(pt) != direct || moved.evaluate(pt) != direct {
                return Err(Error::IdentityFailed {
                    identity: "R -> R/(f) -> R/(f, g) equals R -> R/(f, g)".into(),
                    residual: a.to_string(),
                });
            }
        }
    }
    Ok(ConeReport {
        n,
        m,
        relation_residual: normal_form(&relation, n, m).to_string(),
        random_elements,
        sample_points: points.len(),
        target_is_zero,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blowup_examples_and_full_range() {
        for n in 1..=4 {
            for m in 0..=4 {
                let r = verify_blowup_presentation(n, m, 1).unwrap_or_else(|e| panic!("({n},{m}): {e}"));
                assert_eq!(r.relation_residual, "0");
                // F, and also F/u1 when m = 1 (then u_j/u_1 = 1 is a probe).
                assert_eq!(r.kernel_dim, if m == 1 { 2 } else { 1 }, "({n},{m})");
                assert_eq!(r.quotient_rank, r.probe_monomials - r.kernel_dim);
            }
        }
    }

    #[test]
    fn corrupted_relation_is_caught() {
        let (n, m) = (1, 1);
        let bad = LaurentPoly::z(n, m, 0)
            .mul(&LaurentPoly::z_product_without_z0(n, m))
            .unwrap()
            .sub(&LaurentPoly::g(n, m))
            .unwrap()
            .sub(&LaurentPoly::one(n, m))
            .unwrap();
        match check_vanishes("z0*f - g - 1 = 0", &bad) {
            Err(Error::IdentityFailed { residual, .. }) => assert_eq!(residual, "-1"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rank_and_kernel_small() {
        let q = |a: i64| BigInt::from(a);
        let rows = vec![vec![q(1), q(2), q(3)], vec![q(2), q(4), q(6)], vec![q(0), q(1), q(5)]];
        let (r, k) = rank_and_kernel(rows.clone(), 3);
        assert_eq!((r, k.len()), (2, 1));
        assert_eq!(k[0], vec![q(7), q(-5), q(1)]);
        for v in k {
            for row in &rows {
                let dot: BigInt = row.iter().zip(&v).map(|(a, b)| a * b).sum();
                assert!(dot.is_zero());
            }
        }
    }

    #[test]
    fn jacobian_examples() {
        for n in 0..=4 {
            for m in 0..=4 {
                let r = jacobian_smoothness(n, m).unwrap();
                assert!(r.smooth && r.singular_witness.is_none());
                if m >= 1 {
                    assert_eq!(r.unit_partial.as_deref(), Some("z0").filter(|_| n == 0).or(Some("u1")));
                    let du1 = &r.partials[n + 1];
                    assert_eq!((du1.0.as_str(), du1.1.as_str()), ("u1", "-1"));
                } else {
                    assert_eq!(r.certificate.as_deref(), Some("z0*dF/dz0 - F = 1"));
                }
            }
        }
    }

    #[test]
    fn jacobian_negative_controls() {
        // z0^2 = u1^2 has only non-constant partials; off u1 = 0 it is still smooth.
        let f = LaurentPoly::z(0, 1, 0).pow(2).sub(&LaurentPoly::u(0, 1, 1, 2)).unwrap();
        let r = jacobian_report(&f);
        assert!(r.partials.iter().all(|(_, d)| d != "0" && d.contains(['z', 'u'])));
        assert_eq!(r.unit_partial.as_deref(), Some("u1"));
        // z0*z1 = 0 is singular at the origin.
        let node = LaurentPoly::z_product(1, 0);
        let r = jacobian_report(&node);
        assert!(!r.smooth);
        assert_eq!(r.singular_witness, Some(vec![0, 0]));
    }

    #[test]
    fn cone_relation_examples() {
        for n in 0..=4 {
            for m in 0..=4 {
                let r = cone_relation_check(n, m, 2).unwrap();
                assert_eq!(r.relation_residual, "0");
                assert_eq!(r.target_is_zero, n == 0 || m == 0);
            }
        }
    }
}
