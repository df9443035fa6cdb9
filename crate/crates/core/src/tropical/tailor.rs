use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cone::project_slice;
use super::{BasePoint, ChamberId};
use crate::error::{Error, Result};
use crate::profile::BlendedRamp;

/// Width of the slope blends at either end of the tailoring ramp.
///
/// The ramp's maximum slope is `1/(1 - 0.1)`, so along a unit direction the
/// tailoring function changes at most `(2/eps) / 0.9`, and its gradient
/// 1-norm is below `4/eps` whenever `q <= 3`.
pub const PSI_RAMP_BLEND: f64 = 0.1;

/// Scales of the tailoring deformation: transition width `eps` and base
/// offset `l` (minima sit at `xi = (-l, ..., -l)`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailoringParams {
    pub eps: f64,
    pub l: f64,
}

impl Default for TailoringParams {
    fn default() -> Self {
        TailoringParams { eps: 0.5, l: 5.0 }
    }
}

impl TailoringParams {
    pub fn new(eps: f64, l: f64) -> Result<Self> {
        let p = TailoringParams { eps, l };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "eps",
                reason: format!("must be positive, got {}", self.eps),
            });
        }
        if !(self.l >= 10.0 * self.eps && self.l.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "L",
                reason: format!("must be at least 10 * eps = {}, got {}", 10.0 * self.eps, self.l),
            });
        }
        Ok(())
    }
}

/// Value and gradient (in `xi`) of a tailoring function.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiValue {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub distance: f64,
}

pub(crate) fn psi_slice(i: ChamberId, xi: &[f64], params: &TailoringParams) -> PsiValue {
    let proj = project_slice(xi, i);
    let half = 0.5 * params.eps;
    let t = (proj.distance - half) / half;
    let (value, slope) = BlendedRamp::new(PSI_RAMP_BLEND).eval(t);
    let gradient = if slope == 0.0 {
        vec![0.0; xi.len()]
    } else {
        proj.distance_gradient(xi)
            .into_iter()
            .map(|g| g * slope / half)
            .collect()
    };
    PsiValue {
        value,
        gradient,
        distance: proj.distance,
    }
}

/// Tailoring function of chamber `i`: 0 within `eps/2` of the chamber, 1 at
/// distance `eps` and beyond, monotone in the distance in between.
pub fn psi(i: ChamberId, xi: &BasePoint, params: &TailoringParams) -> Result<PsiValue> {
    params.validate()?;
    if i.0 > xi.q() {
        return Err(Error::InvalidParameter {
            name: "chamber",
            reason: format!("{i} does not exist for q = {}", xi.q()),
        });
    }
    Ok(psi_slice(i, xi, params))
}

/// Coefficients `c_k = 1 - s psi_k(xi)` of the tailored polynomial
/// `c_0 + sum_k c_k u_k`, with their `xi`-gradients.
#[derive(Clone, Debug, PartialEq)]
pub struct TailoringCoefficients {
    /// `values[k]` for `k = 0..=q`.
    pub values: Vec<f64>,
    /// `grad[k][j] = d c_k / d xi_j`.
    pub grad: Vec<Vec<f64>>,
}

pub(crate) fn coefficients_slice(xi: &[f64], s: f64, params: &TailoringParams) -> TailoringCoefficients {
    let q = xi.len();
    let mut values = Vec::with_capacity(q + 1);
    let mut grad = Vec::with_capacity(q + 1);
    for k in 0..=q {
        if s == 0.0 {
            values.push(1.0);
            grad.push(vec![0.0; q]);
            continue;
        }
        let p = psi_slice(ChamberId(k), xi, params);
        values.push(1.0 - s * p.value);
        grad.push(p.gradient.iter().map(|g| -s * g).collect());
    }
    TailoringCoefficients { values, grad }
}

pub fn tailoring_coefficients(xi: &BasePoint, s: f64, params: &TailoringParams) -> Result<TailoringCoefficients> {
    params.validate()?;
    check_s(s)?;
    Ok(coefficients_slice(xi, s, params))
}

fn check_s(s: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter {
            name: "s",
            reason: format!("tailoring parameter must lie in [0, 1], got {s}"),
        });
    }
    Ok(())
}

/// Value of the tailored polynomial and its Wirtinger derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct FsValue {
    pub value: Complex64,
    /// `d f / d u_k`.
    pub d_du: Vec<Complex64>,
    /// `d f / d conj(u_k)`; nonzero only where the tailoring varies.
    pub d_dubar: Vec<Complex64>,
    pub coefficients: Vec<f64>,
}

/// Evaluates `f_s(u) = (1 - s psi_0) + sum_i (1 - s psi_i) u_i` with the
/// tailoring functions evaluated at `Log u`.
pub fn f_s(u: &[Complex64], s: f64, params: &TailoringParams) -> Result<FsValue> {
    params.validate()?;
    check_s(s)?;
    if u.is_empty() {
        return Err(Error::InvalidParameter {
            name: "u",
            reason: "need at least one coordinate".into(),
        });
    }
    if let Some(index) = u.iter().position(|z| z.norm() == 0.0) {
        return Err(Error::ZeroCoordinate { index });
    }
    let xi: Vec<f64> = u.iter().map(|z| z.norm().ln()).collect();
    let coeffs = coefficients_slice(&xi, s, params);
    let q = u.len();

    let mut value = Complex64::new(coeffs.values[0], 0.0);
    for k in 0..q {
        value += coeffs.values[k + 1] * u[k];
    }
    // d f / d xi_j, holding arg u fixed; then d xi_j / d u_j = 1 / (2 u_j).
    let mut d_du = Vec::with_capacity(q);
    let mut d_dubar = Vec::with_capacity(q);
    for j in 0..q {
        let mut df_dxi = Complex64::new(coeffs.grad[0][j], 0.0);
        for k in 0..q {
            df_dxi += coeffs.grad[k + 1][j] * u[k];
        }
        d_du.push(coeffs.values[j + 1] + df_dxi / (2.0 * u[j]));
        d_dubar.push(df_dxi / (2.0 * u[j].conj()));
    }
    Ok(FsValue {
        value,
        d_du,
        d_dubar,
        coefficients: coeffs.values,
    })
}

/// Walks the path `xi_i = t` (`i` in `subset`), `xi_j = -l` otherwise, from
/// `t = -l` up to `t = 1`, and bisects for the first point where the constant
/// term stops dominating the tailored moduli, which is where the path enters
/// the tailored amoeba. `subset` holds 1-based coordinate indices.
pub fn boundary_point_on_diagonal(
    subset: &[usize],
    q: usize,
    params: &TailoringParams,
    tol: f64,
) -> Result<BasePoint> {
    params.validate()?;
    if subset.is_empty() || subset.iter().any(|&i| i == 0 || i > q) {
        return Err(Error::InvalidParameter {
            name: "subset",
            reason: format!("must be a nonempty subset of 1..={q}"),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: "must be positive".into(),
        });
    }
    let point = |t: f64| -> Vec<f64> {
        (1..=q)
            .map(|j| if subset.contains(&j) { t } else { -params.l })
            .collect()
    };
    let dominance = |t: f64| -> f64 {
        let xi = point(t);
        let c = coefficients_slice(&xi, 1.0, params);
        let others: f64 = (0..q).map(|j| c.values[j + 1] * xi[j].exp()).sum();
        c.values[0] - others
    };
    let (mut lo, mut hi) = (-params.l, 1.0);
    let (h_lo, h_hi) = (dominance(lo), dominance(hi));
    if !(h_lo > 0.0 && h_hi < 0.0) {
        return Err(Error::NoBracket { lo, hi, h_lo, h_hi });
    }
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        if dominance(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    BasePoint::new(point(0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tropical::distance_to_chamber;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params() -> TailoringParams {
        TailoringParams::default()
    }

    fn bp(v: &[f64]) -> BasePoint {
        BasePoint::new(v.to_vec()).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(TailoringParams::new(0.5, 5.0).is_ok());
        assert!(TailoringParams::new(0.0, 5.0).is_err());
        assert!(TailoringParams::new(1.0, 5.0).is_err());
    }

    #[test]
    fn psi_examples() {
        let p = params();
        // interior of C_0
        assert_eq!(psi(ChamberId(0), &bp(&[-1.0, -2.0]), &p).unwrap().value, 0.0);
        // distance exactly 2 eps from C_1 on the line
        assert_eq!(psi(ChamberId(1), &bp(&[-2.0 * p.eps]), &p).unwrap().value, 1.0);
        let a = psi(ChamberId(1), &bp(&[-0.7 * p.eps]), &p).unwrap().value;
        let b = psi(ChamberId(1), &bp(&[-0.75 * p.eps]), &p).unwrap().value;
        let c = psi(ChamberId(1), &bp(&[-0.8 * p.eps]), &p).unwrap().value;
        assert!(0.0 < b && b < 1.0);
        assert!(a < b && b < c);
    }

    #[test]
    fn psi_gradient_matches_finite_differences() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 200 {
            let q = rng.gen_range(1..=3);
            let xi: Vec<f64> = (0..q).map(|_| rng.gen_range(-1.5..1.5)).collect();
            let i = ChamberId(rng.gen_range(0..=q));
            let v = psi(i, &bp(&xi), &p).unwrap();
            if v.value == 0.0 || v.value == 1.0 {
                continue;
            }
            for j in 0..q {
                let h = 1e-6;
                let mut a = xi.clone();
                let mut b = xi.clone();
                a[j] += h;
                b[j] -= h;
                let fd = (psi(i, &bp(&a), &p).unwrap().value - psi(i, &bp(&b), &p).unwrap().value) / (2.0 * h);
                assert!((fd - v.gradient[j]).abs() < 1e-5, "{xi:?} {i} j={j}: {fd} vs {}", v.gradient[j]);
            }
            checked += 1;
        }
    }

    #[test]
    fn f0_is_the_pants_polynomial() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let q = rng.gen_range(1..=4);
            let u: Vec<Complex64> = (0..q)
                .map(|_| Complex64::from_polar(rng.gen_range(-3.0f64..3.0).exp(), rng.gen_range(0.0..6.3)))
                .collect();
            let f = f_s(&u, 0.0, &params()).unwrap();
            let expected = u.iter().fold(Complex64::new(1.0, 0.0), |acc, z| acc + z);
            assert_eq!(f.value, expected);
            assert!(f.coefficients.iter().all(|&c| c == 1.0));
            assert!(f.d_dubar.iter().all(|d| d.norm() == 0.0));
            assert!(f.d_du.iter().all(|d| *d == Complex64::new(1.0, 0.0)));
        }
    }

    #[test]
    fn f1_deep_in_c0_is_constant() {
        let p = params();
        let u = vec![Complex64::from_polar((-10.0f64).exp(), 1.0); 2];
        let f = f_s(&u, 1.0, &p).unwrap();
        assert_eq!(f.coefficients, vec![1.0, 0.0, 0.0]);
        assert_eq!(f.value, Complex64::new(1.0, 0.0));
        assert!(f.d_du.iter().all(|d| d.norm() == 0.0));
    }

    #[test]
    fn f_s_rejects_zero_coordinate() {
        let u = vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert_eq!(f_s(&u, 1.0, &params()).unwrap_err(), Error::ZeroCoordinate { index: 1 });
    }

    #[test]
    fn f_s_wirtinger_derivatives_match_finite_differences() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let q = rng.gen_range(1..=3);
            let s = rng.gen_range(0.0..=1.0);
            let u: Vec<Complex64> = (0..q)
                .map(|_| Complex64::from_polar(rng.gen_range(-1.2f64..1.2).exp(), rng.gen_range(0.0..6.3)))
                .collect();
            let f = f_s(&u, s, &p).unwrap();
            for j in 0..q {
                let h = 1e-6;
                let shift = |dz: Complex64| {
                    let mut v = u.clone();
                    v[j] += dz;
                    f_s(&v, s, &p).unwrap().value
                };
                let dx = (shift(Complex64::new(h, 0.0)) - shift(Complex64::new(-h, 0.0))) / (2.0 * h);
                let dy = (shift(Complex64::new(0.0, h)) - shift(Complex64::new(0.0, -h))) / (2.0 * h);
                let d_du = 0.5 * (dx - Complex64::i() * dy);
                let d_dubar = 0.5 * (dx + Complex64::i() * dy);
                assert!((d_du - f.d_du[j]).norm() < 1e-5 * (1.0 + f.d_du[j].norm()));
                assert!((d_dubar - f.d_dubar[j]).norm() < 1e-5 * (1.0 + f.d_dubar[j].norm()));
            }
        }
    }

    #[test]
    fn coefficient_vanishes_far_from_its_chamber() {
        let p = params();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let mut hits = 0;
        for _ in 0..2000 {
            let q = rng.gen_range(1..=3);
            let xi: Vec<f64> = (0..q).map(|_| rng.gen_range(-6.0..3.0)).collect();
            let c = tailoring_coefficients(&bp(&xi), 1.0, &p).unwrap();
            for i in 0..=q {
                if distance_to_chamber(&bp(&xi), ChamberId(i)).unwrap() >= p.eps {
                    assert_eq!(c.values[i], 0.0);
                    assert!(c.grad[i].iter().all(|&g| g == 0.0));
                    hits += 1;
                }
            }
        }
        assert!(hits > 1000);
    }

    #[test]
    fn boundary_point_examples() {
        let p = params();
        let t1 = boundary_point_on_diagonal(&[1], 1, &p, 1e-10).unwrap();
        assert!(t1[0].abs() <= p.eps);
        assert!(t1[0].abs() < 1e-9);

        let t2 = boundary_point_on_diagonal(&[1], 2, &p, 1e-10).unwrap();
        assert!(t2[0].abs() <= p.eps);
        assert_eq!(t2[1], -p.l);

        let t12 = boundary_point_on_diagonal(&[1, 2], 2, &p, 1e-10).unwrap();
        assert_eq!(t12[0], t12[1]);
        assert!(t12[0] < 0.0 && t12[0] > -p.eps);
    }

    #[test]
    fn boundary_point_rejects_bad_subsets() {
        let p = params();
        assert!(boundary_point_on_diagonal(&[], 2, &p, 1e-9).is_err());
        assert!(boundary_point_on_diagonal(&[3], 2, &p, 1e-9).is_err());
    }
}
