mod common;

use std::collections::BTreeMap;
use std::sync::Arc;

use common::{naive_homology_dim, random_filtered};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use z2weight::chain::{ChainComplex, ChainMap, CubeDiagram};
use z2weight::fixtures;
use z2weight::gf2::BitMatrix;
use z2weight::simp::SimplicialComplex;

fn tetrahedron_boundary() -> SimplicialComplex {
    SimplicialComplex::from_maximal(4, &[vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]).unwrap()
}

#[test]
fn sphere_and_torus_homology() {
    assert_eq!(tetrahedron_boundary().homology_dims(), vec![1, 0, 1]);
    let torus = fixtures::torus_grid(2);
    assert_eq!(torus.complex.homology_dims(), vec![1, 2, 1]);
    let three_torus = z2weight::simp::product_fixture(&torus, &fixtures::plain_circle4()).unwrap();
    assert_eq!(three_torus.complex.homology_dims(), vec![1, 3, 3, 1]);
}

#[test]
fn non_square_zero_is_rejected() {
    let d1 = BitMatrix::from_dense(1, 1, &[vec![1]]).unwrap();
    let d2 = BitMatrix::from_dense(1, 1, &[vec![1]]).unwrap();
    assert!(ChainComplex::from_dims(0, &[1, 1, 1], vec![BitMatrix::zeros(0, 1), d1, d2]).is_err());
}

#[test]
fn homology_representatives_are_cycles_and_independent() {
    let c = fixtures::torus_grid(2).complex.chain_complex();
    let h = c.homology();
    for k in c.degrees() {
        let reps = h.representatives(k);
        assert_eq!(reps.len(), naive_homology_dim(&c, k));
        for r in reps {
            assert!(c.boundary(k).mul_vec(r).is_zero());
        }
        assert_eq!(h.classes_span(k, reps).dim(), reps.len());
        for b in c.boundaries(k).basis() {
            assert!(h.class_of(k, b).unwrap().is_zero());
        }
    }
}

#[test]
fn dual_complex_has_same_betti_numbers() {
    let c = fixtures::torus_grid(2).complex.chain_complex();
    let d = c.dualize();
    let mut a: Vec<usize> = c.homology_dims().into_values().collect();
    let mut b: Vec<usize> = d.homology_dims().into_values().collect();
    a.sort_unstable();
    b.sort_unstable();
    assert_eq!(a, b);
}

#[test]
fn cone_of_identity_is_acyclic() {
    let c = Arc::new(fixtures::torus_grid(1).complex.chain_complex());
    let id = ChainMap::identity(c);
    assert!(id.is_quasi_iso());
    assert!(id.mapping_cone().is_acyclic());
}

#[test]
fn cone_of_zero_map_splits() {
    let a = Arc::new(tetrahedron_boundary().chain_complex());
    let b = Arc::new(fixtures::torus_grid(2).complex.chain_complex());
    let zero = ChainMap::new(a.clone(), b.clone(), BTreeMap::new()).unwrap();
    zero.check().unwrap();
    let cone = zero.mapping_cone();
    let total: usize = cone.homology_dims().values().sum();
    let expected: usize = a.homology_dims().values().sum::<usize>() + b.homology_dims().values().sum::<usize>();
    assert_eq!(total, expected);
}

#[test]
fn one_arrow_cube_is_the_cone() {
    let c = Arc::new(fixtures::circle().complex.chain_complex());
    let mut cube = CubeDiagram::new();
    cube.nodes.insert(1, c.clone());
    cube.nodes.insert(0, c.clone());
    cube.arrows.insert((1, 0), ChainMap::identity(c));
    cube.validate().unwrap();
    assert!(cube.total_complex().unwrap().is_acyclic());
}

#[test]
fn cube_with_missing_arrow_is_rejected() {
    let c = Arc::new(fixtures::circle().complex.chain_complex());
    let mut cube = CubeDiagram::new();
    cube.nodes.insert(1, c.clone());
    cube.nodes.insert(0, c);
    assert!(cube.validate().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn homology_matches_dense_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_filtered(&mut rng, 24);
        let c = &r.filtered.complex;
        let dims = c.homology_dims();
        for k in c.degrees() {
            prop_assert_eq!(dims.get(&k).copied().unwrap_or(0), naive_homology_dim(c, k));
        }
    }
}
