use proptest::prelude::*;
use syz_core::tropical::{
    classify_chamber, distance_to_chamber, enumerate_spine_cells, f_s, project_to_chamber, psi,
};
use syz_core::{BasePoint, ChamberId, Complex64, Location, TailoringParams};

fn forms(xi: &[f64]) -> Vec<f64> {
    std::iter::once(0.0).chain(xi.iter().copied()).collect()
}

fn arb_xi() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-8.0f64..3.0, 1..=4)
}

#[test]
fn spine_cell_counts() {
    for q in 1..=6usize {
        let cells = enumerate_spine_cells(q).unwrap();
        assert_eq!(cells.len(), (1 << (q + 1)) - (q + 2), "q={q}");
        assert!(cells.iter().all(|c| c.dim() == q + 1 - c.tie_set().len()));
    }
}

proptest! {
    #[test]
    fn psi_is_a_monotone_function_of_distance(xi in arb_xi(), xi2 in arb_xi(), i in 0usize..5) {
        let params = TailoringParams::default();
        let q = xi.len();
        let i = ChamberId(i % (q + 1));
        let mut other = xi2;
        other.resize(q, -1.0);
        let a = psi(i, &BasePoint::new(xi).unwrap(), &params).unwrap();
        let b = psi(i, &BasePoint::new(other).unwrap(), &params).unwrap();
        prop_assert!((0.0..=1.0).contains(&a.value));
        if a.distance <= b.distance {
            prop_assert!(a.value <= b.value);
        } else {
            prop_assert!(a.value >= b.value);
        }
    }

    #[test]
    fn chamber_points_have_zero_distance(xi in arb_xi()) {
        let bp = BasePoint::new(xi.clone()).unwrap();
        let f = forms(&xi);
        for k in 0..f.len() {
            let d = distance_to_chamber(&bp, ChamberId(k)).unwrap();
            let top = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(d == 0.0, f[k] >= top, "chamber {} distance {}", k, d);
            let proj = project_to_chamber(&bp, ChamberId(k)).unwrap();
            let pf = forms(&proj.point);
            let ptop = pf.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(pf[k] >= ptop - 1e-9);
        }
    }

    #[test]
    fn classification_respects_ties(xi in arb_xi(), tol in 1e-9f64..0.5) {
        let f = forms(&xi);
        let top = f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let near: Vec<usize> = (0..f.len()).filter(|&k| f[k] >= top - tol).collect();
        match classify_chamber(&BasePoint::new(xi).unwrap(), tol).unwrap() {
            Location::Chamber(ChamberId(k)) => prop_assert_eq!(near, vec![k]),
            Location::Cell(c) => prop_assert_eq!(c.tie_set(), near.as_slice()),
        }
    }

    #[test]
    fn untailored_polynomial_is_one_plus_sum(u in proptest::collection::vec((0.01f64..5.0, -3.2f64..3.2), 1..=4)) {
        let u: Vec<Complex64> = u.iter().map(|&(r, t)| Complex64::from_polar(r, t)).collect();
        let v = f_s(&u, 0.0, &TailoringParams::default()).unwrap();
        let expected = u.iter().fold(Complex64::new(1.0, 0.0), |a, b| a + b);
        prop_assert_eq!(v.value, expected);
        prop_assert!(v.coefficients.iter().all(|&c| c == 1.0));
        prop_assert!(v.d_dubar.iter().all(|d| *d == Complex64::new(0.0, 0.0)));
    }
}
