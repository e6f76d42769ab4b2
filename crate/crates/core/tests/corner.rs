mod common;

use std::collections::BTreeMap;

use common::naive_homology_dim;
use z2weight::corner::{
    build_cut_complex, cellular_pullback_phi, corner_complex, graded_iso_psi, induced_map, local_model_mismatches,
    pi_pushforward_exactness, pullback_report,
};
use z2weight::fixtures;
use z2weight::simp::{GoodCompData, SimplicialMap};

/// Fixtures with the Betti numbers of the open part, worked out by hand.
fn fixtures_with_complement_betti() -> Vec<(GoodCompData, Vec<usize>)> {
    vec![
        (fixtures::point(), vec![1]),
        (fixtures::circle(), vec![1, 1]),
        (fixtures::r_star(), vec![2, 0]),
        (fixtures::real_line(), vec![1, 0]),
        (fixtures::line_minus_three_points(), vec![4, 0]),
        (fixtures::torus_grid(0), vec![1, 2, 1]),
        (fixtures::torus_grid(1), vec![1, 1, 0]),
        (fixtures::torus_grid(2), vec![2, 2, 0]),
        (fixtures::torus_grid(4), vec![4, 0, 0]),
        (fixtures::punctured_plane(), vec![1, 1, 0]),
        (fixtures::projective_plane(&["x", "y", "z"]), vec![4, 0, 0]),
        (fixtures::three_parallel_lines_product(), vec![4, 0, 0]),
    ]
}

#[test]
fn cut_complex_has_the_homology_of_the_open_part() {
    for (g, betti) in fixtures_with_complement_betti() {
        let x = build_cut_complex(&g).unwrap();
        let found: Vec<usize> = x.complex.degrees().map(|k| naive_homology_dim(&x.complex, k)).collect();
        assert_eq!(found, betti, "{}", g.name);
    }
}

#[test]
fn fibers_have_one_cell_per_local_branch() {
    for (g, _) in fixtures_with_complement_betti() {
        let x = build_cut_complex(&g).unwrap();
        for d in 0..=g.n() {
            let expected: usize = (0..g.complex.count(d)).map(|i| 1usize << g.mask(d, i).count_ones()).sum();
            assert_eq!(x.cells[d].len(), expected, "{} dim {d}", g.name);
            for i in 0..g.complex.count(d) {
                assert_eq!(x.fiber(d, i).len(), 1 << g.mask(d, i).count_ones());
            }
        }
    }
}

#[test]
fn corner_filtration_graded_dims_count_strata() {
    for (g, _) in fixtures_with_complement_betti() {
        let cf = corner_complex(&g).unwrap();
        let n = g.n();
        for d in 0..=n {
            for p in 0..=n {
                let graded = cf.level(d, p).dim() - cf.level(d, p + 1).dim();
                let mut expected = 0;
                for i in 0..g.complex.count(d) {
                    let m = g.mask(d, i).count_ones() as usize;
                    if m >= p {
                        expected += z2weight::torus::binomial(m, p);
                    }
                }
                assert_eq!(graded, expected, "{} d={d} p={p}", g.name);
            }
        }
    }
}

#[test]
fn local_model_and_exactness() {
    for (g, _) in fixtures_with_complement_betti() {
        let cf = corner_complex(&g).unwrap();
        assert!(local_model_mismatches(&cf).is_empty(), "{}", g.name);
        let ex = pi_pushforward_exactness(&cf);
        assert!(ex.passed(), "{}: {ex:?}", g.name);
        for p in 0..=g.n() {
            let psi = graded_iso_psi(&cf, p);
            assert!(psi.passed(), "{} p={p}: {psi:?}", g.name);
        }
    }
}

#[test]
fn cellular_pullback_is_a_filtered_quasi_isomorphism() {
    for (g, _) in fixtures_with_complement_betti().into_iter().filter(|(g, _)| g.n() <= 2) {
        let phi = cellular_pullback_phi(&g).unwrap();
        let rep = pullback_report(&phi);
        assert!(rep.passed(), "{}: {rep:?}", g.name);
    }
}

#[test]
fn identity_induces_identity() {
    let g = fixtures::torus_grid(2);
    let x = build_cut_complex(&g).unwrap();
    let f = induced_map(&SimplicialMap::identity(g.complex.vertex_count()), &x, &x).unwrap();
    for k in x.complex.degrees() {
        assert_eq!(*f.matrix(k), z2weight::gf2::BitMatrix::identity(x.complex.dim(k)));
    }
}

#[test]
fn maps_that_are_not_maps_of_pairs_are_rejected() {
    // Rotating r_star by one step moves the point 0 off the divisor.
    let g = fixtures::r_star();
    let x = build_cut_complex(&g).unwrap();
    let rotate = SimplicialMap { vertex_map: vec![1, 2, 3, 0] };
    assert!(induced_map(&rotate, &x, &x).is_err());
    // Rotating by two steps swaps 0 and ∞ and is accepted.
    let swap = SimplicialMap { vertex_map: vec![2, 3, 0, 1] };
    let f = induced_map(&swap, &x, &x).unwrap();
    f.check().unwrap();
    assert!(f.is_quasi_iso());
}

#[test]
fn exactness_counts_per_degree() {
    let g = fixtures::torus_grid(4);
    let cf = corner_complex(&g).unwrap();
    let x = &cf.cut;
    let mut counts = BTreeMap::new();
    for d in 0..=2 {
        counts.insert(d, (x.cells[d].len(), g.complex.count(d), cf.level(d, 1).dim()));
    }
    for (d, (cells, simplices, kernel)) in counts {
        assert_eq!(cells, simplices + kernel, "dim {d}");
    }
}
