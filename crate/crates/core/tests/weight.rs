use z2weight::fixtures;
use z2weight::simp::{GoodCompData, SimplicialMap};
use z2weight::weight::{
    assemble, blowup_square_checks, contained_blowup_check, independence_check, kernel_characterization,
    single_node_matches, singular_bounds, smooth_bounds, transverse_blowup_check, weight_complex, HyperresolutionArrow,
    HyperresolutionInput, WeightError,
};

fn row(g: &GoodCompData, k: i32) -> Vec<usize> {
    let t = weight_complex(g).unwrap().table();
    let n = g.n() as i32;
    (-n - 1..=0).map(|p| t.dim(k, p)).collect()
}

fn smooth_fixtures() -> Vec<GoodCompData> {
    vec![
        fixtures::point(),
        fixtures::circle(),
        fixtures::r_star(),
        fixtures::real_line(),
        fixtures::line_minus_three_points(),
        fixtures::torus_grid(0),
        fixtures::torus_grid(1),
        fixtures::torus_grid(2),
        fixtures::torus_grid(4),
        fixtures::punctured_plane(),
        fixtures::projective_plane(&["x", "y", "z"]),
        fixtures::three_parallel_lines_product(),
    ]
}

#[test]
fn r_star_weights() {
    assert_eq!(row(&fixtures::r_star(), 0), vec![0, 1, 2]);
    assert_eq!(row(&fixtures::real_line(), 0), vec![0, 0, 1]);
}

#[test]
fn two_presentations_of_the_punctured_square() {
    assert_eq!(row(&fixtures::torus_grid(4), 0), vec![0, 1, 3, 4]);
    assert_eq!(row(&fixtures::projective_plane(&["x", "y", "z"]), 0), vec![0, 1, 3, 4]);
    let rep = independence_check(&fixtures::torus_grid(4), &fixtures::projective_plane(&["x", "y", "z"])).unwrap();
    assert!(rep.equal);
}

#[test]
fn three_parallel_lines_differ() {
    assert_eq!(row(&fixtures::three_parallel_lines_product(), 0), vec![0, 0, 3, 4]);
    let rep = independence_check(&fixtures::torus_grid(4), &fixtures::three_parallel_lines_product()).unwrap();
    assert!(!rep.equal);
}

#[test]
fn cylinder_versus_punctured_plane() {
    assert_eq!(row(&fixtures::torus_grid(1), 1), vec![0, 0, 1, 1]);
    assert_eq!(row(&fixtures::punctured_plane(), 1), vec![0, 1, 1, 1]);
}

#[test]
fn compact_fixtures_are_pure() {
    for g in [fixtures::circle(), fixtures::torus_grid(0), fixtures::sphere()] {
        let t = weight_complex(&g).unwrap().table();
        let n = g.n() as i32;
        for k in 0..=n {
            for p in -n - 1..=0 {
                let expected = if p >= -k { t.homology_dim(k) } else { 0 };
                assert_eq!(t.dim(k, p), expected, "{} k={k} p={p}", g.name);
            }
        }
    }
}

#[test]
fn smooth_checks_on_every_fixture() {
    for g in smooth_fixtures() {
        let w = weight_complex(&g).unwrap();
        let b = smooth_bounds(&w);
        assert!(b.passed(), "{}: {b:?}", g.name);
        assert!(kernel_characterization(&g).unwrap().passed(), "{}", g.name);
        assert!(single_node_matches(&g).unwrap(), "{}", g.name);
    }
}

#[test]
fn lemniscate_assembly() {
    let a = assemble(&fixtures::lemniscate_cube()).unwrap();
    let t = a.weight.table();
    assert_eq!((t.dim(1, -1), t.homology_dim(1)), (1, 2));
    assert_eq!(t.homology_dim(0), 1);
    assert!(singular_bounds(&a.weight).passed());
}

#[test]
fn lemniscate_times_r_star_assembly() {
    let a = assemble(&fixtures::lemniscate_times_r_star()).unwrap();
    let t = a.weight.table();
    assert_eq!((t.dim(1, -2), t.dim(1, -1), t.homology_dim(1)), (1, 3, 4));
}

#[test]
fn hyperresolution_validation() {
    let mut h = fixtures::lemniscate_cube();
    h.validate().unwrap();
    // An arrow that changes two indices at once.
    h.arrows.push(HyperresolutionArrow { source: 3, target: 0, map: SimplicialMap { vertex_map: vec![0, 0] } });
    assert!(h.validate().is_err());
    let mut h = fixtures::lemniscate_cube();
    h.arrows[0].map.vertex_map = vec![0, 99];
    assert!(assemble(&h).is_err());
    let single = HyperresolutionInput::single(fixtures::circle());
    single.validate().unwrap();
}

#[test]
fn sphere_blowup_square() {
    let sq = fixtures::sphere_blowup_square();
    let rep = blowup_square_checks(&sq).unwrap();
    assert!(rep.passed(), "{rep:?}");
    let one = rep.degrees.iter().find(|d| d.k == 1).unwrap();
    assert_eq!(one.dims, (1, 0, 1, 0));
}

#[test]
fn blowup_square_needs_positive_codimension() {
    let mut sq = fixtures::sphere_blowup_square();
    sq.codim = 0;
    assert!(matches!(blowup_square_checks(&sq), Err(WeightError::Precondition(_))));
}

#[test]
fn transverse_blowup_is_acyclic() {
    let rep = transverse_blowup_check(&fixtures::transverse_blowup_square()).unwrap();
    assert!(rep.passed(), "{rep:?}");
}

#[test]
fn contained_blowup_is_a_filtered_quasi_isomorphism() {
    let (b, base) = fixtures::contained_blowup();
    let rep = contained_blowup_check(&b.data, &base, &b.blowdown).unwrap();
    assert!(rep.passed(), "{rep:?}");
}
