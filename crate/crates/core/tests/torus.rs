mod common;

use common::naive_rank;
use proptest::prelude::*;
use z2weight::gf2::BitMatrix;
use z2weight::torus::{
    binomial, exterior_model_check, graded_matrix, graded_matrix_by_pushforward, hom_pushforward, AlgebraElement,
    TorusAlgebra, TorusHom,
};

/// Group-ring elements as sets of group elements, multiplied by hand.
fn convolve(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; a.len()];
    for (g, &x) in a.iter().enumerate() {
        for (h, &y) in b.iter().enumerate() {
            out[g ^ h] ^= x & y;
        }
    }
    out
}

fn one_plus(size: usize, g: usize) -> Vec<u8> {
    let mut v = vec![0u8; size];
    v[0] ^= 1;
    v[g] ^= 1;
    v
}

/// Every product of `p` factors `1 + [g]`.
fn power_spanning_set(rank: usize, p: usize) -> Vec<Vec<u8>> {
    let size = 1 << rank;
    let mut unit = vec![0u8; size];
    unit[0] = 1;
    let mut current = vec![unit];
    for _ in 0..p {
        let mut next = Vec::new();
        for c in &current {
            for g in 1..size {
                next.push(convolve(c, &one_plus(size, g)));
            }
        }
        // Keep a basis so the sweep stays small.
        let mut basis: Vec<Vec<u8>> = Vec::new();
        for v in next {
            let mut trial = basis.clone();
            trial.push(v.clone());
            if naive_rank(&trial) > basis.len() {
                basis.push(v);
            }
        }
        current = basis;
    }
    current
}

#[test]
fn ideal_power_dims_are_binomial_tails() {
    for rank in 0..=6 {
        let alg = TorusAlgebra::new(rank).unwrap();
        for p in 0..=rank + 1 {
            let tail: usize = (p..=rank).map(|i| binomial(rank, i)).sum();
            assert_eq!(alg.ideal_power(p).dim(), tail, "rank {rank} p {p}");
            assert_eq!(alg.graded_dim(p), binomial(rank, p));
        }
    }
}

#[test]
fn ideal_powers_match_product_expansion() {
    for rank in 1..=4 {
        let alg = TorusAlgebra::new(rank).unwrap();
        for p in 0..=rank + 1 {
            let rows = power_spanning_set(rank, p);
            let dim = if p == 0 { 1 << rank } else { naive_rank(&rows) };
            assert_eq!(alg.ideal_power(p).dim(), dim, "rank {rank} p {p}");
            for v in &rows {
                let support = z2weight::gf2::BitVector::from_support(1 << rank, (0..v.len()).filter(|&i| v[i] == 1));
                assert!(alg.ideal_power(p).contains(&support));
            }
        }
    }
}

#[test]
fn coordinate_subgroup_is_a_product_of_generators() {
    let rank = 4;
    let size = 1 << rank;
    for set in TorusAlgebra::coordinate_sets(rank, 2).into_iter().chain(TorusAlgebra::coordinate_sets(rank, 3)) {
        let mut prod = vec![0u8; size];
        prod[0] = 1;
        for &j in &set {
            prod = convolve(&prod, &one_plus(size, 1 << j));
        }
        let ours = AlgebraElement::coordinate_subgroup(rank, &set);
        let expected: Vec<usize> = (0..size).filter(|&i| prod[i] == 1).collect();
        assert_eq!(ours.elements().collect::<Vec<_>>(), expected);
    }
}

#[test]
fn algebra_element_operations() {
    let a = AlgebraElement::from_support(3, [0, 3, 5]);
    let b = AlgebraElement::from_support(3, [1, 3]);
    assert_eq!(a.add(&b).unwrap().elements().collect::<Vec<_>>(), vec![0, 1, 5]);
    assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
    assert_eq!(a.translate(6).elements().collect::<Vec<_>>(), vec![3, 5, 6]);
    assert!(a.augmentation());
    assert!(!b.augmentation());
    let x = AlgebraElement::one_plus(3, 6);
    assert!(x.mul(&x).unwrap().is_zero());
    assert!(a.mul(&AlgebraElement::zero(2)).is_err());
}

#[test]
fn exterior_model_passes_up_to_rank_six() {
    for rank in 0..=6 {
        let rep = exterior_model_check(rank).unwrap();
        assert!(rep.passed(), "rank {rank}: {rep:?}");
    }
}

#[test]
fn graded_matrix_agrees_with_pushforward_for_small_ranks() {
    for n in 0..=3 {
        for m in 0..=3 {
            let (src, tgt) = (TorusAlgebra::new(n).unwrap(), TorusAlgebra::new(m).unwrap());
            for hom in TorusHom::all(n, m) {
                for p in 0..=n.min(m) {
                    assert_eq!(graded_matrix(&hom, p), graded_matrix_by_pushforward(&hom, &src, &tgt, p).unwrap());
                }
            }
        }
    }
}

/// Pushing `∏(1 + e_j)` forward gives `∏(1 + γ(e_j))`; expanding each factor
/// linearly mod the next power recovers the minors.
#[test]
fn graded_matrix_by_factor_expansion() {
    let (n, m) = (3, 3);
    let tgt = TorusAlgebra::new(m).unwrap();
    for hom in TorusHom::all(n, m) {
        for p in 1..=n {
            let gm = graded_matrix(&hom, p);
            for (col, set) in TorusAlgebra::coordinate_sets(n, p).iter().enumerate() {
                let size = 1 << m;
                let mut prod = vec![0u8; size];
                prod[0] = 1;
                for &j in set {
                    let mut factor = vec![0u8; size];
                    for i in 0..m {
                        if hom.matrix.get(i, j) {
                            for (t, b) in one_plus(size, 1 << i).iter().enumerate() {
                                factor[t] ^= b;
                            }
                        }
                    }
                    prod = convolve(&prod, &factor);
                }
                let elem = AlgebraElement::from_support(m, (0..size).filter(|&i| prod[i] == 1));
                assert_eq!(tgt.graded_coordinates(&elem, p).unwrap(), gm.column(col));
            }
        }
    }
}

#[test]
fn hom_shape_mismatch_is_an_error() {
    let hom = TorusHom::identity(2);
    assert!(hom_pushforward(&hom, &AlgebraElement::one(3)).is_err());
    assert!(TorusAlgebra::new(40).is_err());
}

fn hom_strategy(n: usize, m: usize) -> impl Strategy<Value = TorusHom> {
    proptest::collection::vec(proptest::collection::vec(0u8..2, n), m)
        .prop_map(move |rows| TorusHom::new(BitMatrix::from_dense(m, n, &rows).unwrap()))
}

proptest! {
    #[test]
    fn cauchy_binet(g in hom_strategy(5, 4), h in hom_strategy(4, 5), p in 0usize..=4) {
        let composite = graded_matrix(&h.compose(&g), p);
        let product = graded_matrix(&h, p).mul(&graded_matrix(&g, p)).unwrap();
        prop_assert_eq!(composite, product);
    }

    #[test]
    fn pushforward_is_a_ring_map(g in hom_strategy(3, 4), a in 0u32..256, b in 0u32..256) {
        let x = AlgebraElement::from_support(3, (0..8).filter(|i| a >> i & 1 == 1));
        let y = AlgebraElement::from_support(3, (0..8).filter(|i| b >> i & 1 == 1));
        let lhs = hom_pushforward(&g, &x.mul(&y).unwrap()).unwrap();
        let rhs = hom_pushforward(&g, &x).unwrap().mul(&hom_pushforward(&g, &y).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        for e in 0..8 {
            let img = hom_pushforward(&g, &AlgebraElement::group_element(3, e)).unwrap();
            prop_assert_eq!(img, AlgebraElement::group_element(4, g.apply(e)));
        }
    }
}
