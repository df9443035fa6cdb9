use proptest::prelude::*;
use syz_core::skeleton::{
    direct_sum, glued_skeleton, homology, mayer_vietoris, tensor, torus_chain, ChainComplex, SkeletonSpec,
};

fn squares_to_zero(c: &ChainComplex) -> bool {
    (1..c.len()).all(|k| c.boundary(k).mul(&c.boundary(k + 1)).is_zero())
}

fn binom(n: usize, k: usize) -> usize {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn mayer_vietoris_on_listed_shapes() {
    for (p, q) in [(0, 1), (1, 1), (1, 2), (2, 1), (2, 2)] {
        let g = glued_skeleton(&SkeletonSpec::new(p, q).unwrap()).unwrap();
        assert!(mayer_vietoris(&g).unwrap().exact(), "({p},{q})");
    }
}

#[test]
fn glued_one_one_is_a_torus_with_a_disk() {
    let g = glued_skeleton(&SkeletonSpec::new(1, 1).unwrap()).unwrap();
    let h = homology(&g.complex);
    assert_eq!(h.trimmed_ranks(), vec![1, 1, 1]);
    assert!(h.is_torsion_free());
}

proptest! {
    #[test]
    fn kunneth_for_tori(a in 0usize..4, b in 0usize..4) {
        let t = tensor(&torus_chain(a), &torus_chain(b));
        prop_assert!(squares_to_zero(&t));
        let expected: Vec<usize> = (0..=a + b).map(|k| binom(a + b, k)).collect();
        prop_assert_eq!(homology(&t).ranks(), expected);
    }

    #[test]
    fn direct_sums_add_homology(a in 0usize..4, b in 0usize..4) {
        let s = direct_sum(&torus_chain(a), &torus_chain(b));
        let (ha, hb) = (homology(&torus_chain(a)).ranks(), homology(&torus_chain(b)).ranks());
        let n = ha.len().max(hb.len());
        let expected: Vec<usize> = (0..n).map(|k| ha.get(k).unwrap_or(&0) + hb.get(k).unwrap_or(&0)).collect();
        prop_assert_eq!(homology(&s).trimmed_ranks(), expected);
    }

    #[test]
    fn glued_complexes_are_well_formed(p in 0usize..4, q in 1usize..5) {
        let g = glued_skeleton(&SkeletonSpec::new(p, q).unwrap()).unwrap();
        prop_assert!(squares_to_zero(&g.complex));
        let (chi, c1, c2, c0) = g.euler_characteristics();
        prop_assert_eq!(chi, c1 + c2 - c0);
        let h = homology(&g.complex);
        for grp in &h.groups {
            prop_assert!(grp.torsion.windows(2).all(|w| &w[1] % &w[0] == 0u32.into()));
        }
    }
}
