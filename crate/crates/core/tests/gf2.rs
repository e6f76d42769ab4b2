mod common;

use common::{dense, naive_rank};
use proptest::prelude::*;
use z2weight::gf2::{rank_kernel_image, subspace_algebra, BitMatrix, BitVector, QuotientBasis, Subspace};

fn matrix_strategy(max_rows: usize, max_cols: usize) -> impl Strategy<Value = BitMatrix> {
    (0..=max_rows, 0..=max_cols).prop_flat_map(|(r, c)| {
        proptest::collection::vec(proptest::collection::vec(0u8..2, c), r)
            .prop_map(move |rows| BitMatrix::from_dense(r, c, &rows).unwrap())
    })
}

/// All vectors of a subspace of a small ambient space, as bitmasks.
fn elements(s: &Subspace) -> Vec<u32> {
    let n = s.ambient();
    (0u32..1 << n).filter(|&m| s.contains(&BitVector::from_support(n, (0..n).filter(|i| m >> i & 1 == 1)))).collect()
}

fn mask(v: &BitVector) -> u32 {
    v.ones().map(|i| 1u32 << i).sum()
}

fn subspace_strategy(ambient: usize) -> impl Strategy<Value = Subspace> {
    proptest::collection::vec(0u32..(1 << ambient), 0..=ambient).prop_map(move |ms| {
        Subspace::span_owned(ambient, ms.iter().map(|&m| BitVector::from_support(ambient, (0..ambient).filter(|i| m >> i & 1 == 1))).collect())
    })
}

#[test]
fn identity_and_zero_ranks() {
    assert_eq!(BitMatrix::identity(70).rank(), 70);
    assert_eq!(BitMatrix::zeros(5, 9).rank(), 0);
    let r = rank_kernel_image(&BitMatrix::zeros(0, 4));
    assert_eq!((r.rank, r.kernel.dim(), r.image.ambient()), (0, 4, 0));
}

#[test]
fn vectors_across_word_boundaries() {
    let mut v = BitVector::zeros(130);
    for i in [0, 63, 64, 65, 127, 129] {
        v.flip(i);
    }
    assert_eq!(v.count_ones(), 6);
    assert_eq!(v.pivot(), Some(0));
    assert_eq!(v.ones().collect::<Vec<_>>(), vec![0, 63, 64, 65, 127, 129]);
    assert_eq!(v.slice(60, 70).ones().collect::<Vec<_>>(), vec![3, 4, 5]);
    assert!(v.xor(&v).is_zero());
}

#[test]
fn shape_mismatch_is_an_error() {
    assert!(BitMatrix::zeros(2, 3).mul(&BitMatrix::zeros(2, 3)).is_err());
    assert!(Subspace::full(3).sum(&Subspace::full(4)).is_err());
}

proptest! {
    #[test]
    fn rank_matches_dense_elimination(m in matrix_strategy(40, 90)) {
        prop_assert_eq!(m.rank(), naive_rank(&dense(&m)));
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn rank_nullity(m in matrix_strategy(20, 20)) {
        let r = rank_kernel_image(&m);
        prop_assert_eq!(r.rank + r.kernel.dim(), m.cols());
        for k in r.kernel.basis() {
            prop_assert!(m.mul_vec(k).is_zero());
        }
        for j in 0..m.cols() {
            prop_assert!(r.image.contains(&m.column(j)));
        }
    }

    #[test]
    fn product_is_associative_and_matches_dense(a in matrix_strategy(6, 6), seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let b = common::random_matrix(&mut rng, a.cols(), 5, 0.5);
        let c = common::random_matrix(&mut rng, 5, 4, 0.5);
        let ab = a.mul(&b).unwrap();
        prop_assert_eq!(ab.mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        let (da, db) = (dense(&a), dense(&b));
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let s = (0..a.cols()).fold(0u8, |acc, t| acc ^ (da[i][t] & db[t][j]));
                prop_assert_eq!(ab.get(i, j), s == 1);
            }
        }
    }

    #[test]
    fn subspace_operations_match_enumeration(u in subspace_strategy(6), v in subspace_strategy(6)) {
        let eu = elements(&u);
        let ev = elements(&v);
        prop_assert_eq!(eu.len(), 1 << u.dim());
        let alg = subspace_algebra(&u, &v).unwrap();
        let inter: Vec<u32> = eu.iter().copied().filter(|x| ev.contains(x)).collect();
        prop_assert_eq!(elements(&alg.intersection), inter);
        let mut sums: Vec<u32> = eu.iter().flat_map(|&a| ev.iter().map(move |&b| a ^ b)).collect();
        sums.sort_unstable();
        sums.dedup();
        prop_assert_eq!(elements(&alg.sum), sums);
        prop_assert_eq!(alg.quotient_reps.len(), u.dim() - alg.intersection.dim());
        prop_assert_eq!(u.contains_subspace(&alg.intersection), true);
    }

    #[test]
    fn annihilator_matches_enumeration(u in subspace_strategy(5), seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let pairing = common::random_matrix(&mut rng, 4, 5, 0.5);
        let ann = u.annihilator(&pairing).unwrap();
        let eu = elements(&u);
        let expected: Vec<u32> = (0u32..16)
            .filter(|&a| {
                let alpha = BitVector::from_support(4, (0..4).filter(|i| a >> i & 1 == 1));
                eu.iter().all(|&b| {
                    let beta = BitVector::from_support(5, (0..5).filter(|i| b >> i & 1 == 1));
                    !alpha.dot(&pairing.mul_vec(&beta))
                })
            })
            .collect();
        prop_assert_eq!(elements(&ann), expected);
    }

    #[test]
    fn preimage_and_image(u in subspace_strategy(5), t in subspace_strategy(4), seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = common::random_matrix(&mut rng, 4, 5, 0.5);
        let pre = u.preimage(&m, &t).unwrap();
        let expected: Vec<u32> = elements(&u)
            .into_iter()
            .filter(|&x| t.contains(&m.mul_vec(&BitVector::from_support(5, (0..5).filter(|i| x >> i & 1 == 1)))))
            .collect();
        prop_assert_eq!(elements(&pre), expected);
        let img = u.image(&m).unwrap();
        let mut imgs: Vec<u32> = elements(&u)
            .into_iter()
            .map(|x| mask(&m.mul_vec(&BitVector::from_support(5, (0..5).filter(|i| x >> i & 1 == 1)))))
            .collect();
        imgs.sort_unstable();
        imgs.dedup();
        prop_assert_eq!(elements(&img), imgs);
    }

    #[test]
    fn quotient_coordinates_round_trip(num in subspace_strategy(6), den_gens in subspace_strategy(6)) {
        let den = den_gens.intersection(&num).unwrap();
        let q = QuotientBasis::of(&num, &den);
        prop_assert_eq!(q.dim(), num.dim() - den.dim());
        for (i, r) in q.reps().iter().enumerate() {
            prop_assert_eq!(q.coordinates(r).unwrap(), BitVector::singleton(q.dim(), i));
        }
        for d in den.basis() {
            prop_assert!(q.coordinates(d).unwrap().is_zero());
        }
    }

    #[test]
    fn canonical_basis_is_unique(u in subspace_strategy(7)) {
        let again = Subspace::span(7, u.basis().iter().rev());
        prop_assert_eq!(again, u);
    }
}
