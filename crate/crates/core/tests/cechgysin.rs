mod common;

use std::collections::BTreeMap;

use common::naive_homology_dim;
use z2weight::cechgysin::{
    cech_report, duality_report, gysin_complex, homology_pushforward, poincare_gysin, weighted_pushforward, ClosedManifold,
    PushforwardSpec,
};
use z2weight::corner::corner_complex;
use z2weight::filt::spectral_sequence;
use z2weight::fixtures;
use z2weight::gf2::BitMatrix;
use z2weight::simp::{GoodCompData, SimplicialMap};

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

/// `dim ⊕_{|J|=p} H_k(K_J)` straight from the strata.
fn stratum_homology(g: &GoodCompData) -> BTreeMap<(usize, i32), usize> {
    let mut out = BTreeMap::new();
    for mask in g.strata() {
        let p = mask.count_ones() as usize;
        let (c, _) = g.stratum_chain_complex(mask);
        for k in c.degrees() {
            *out.entry((p, k)).or_insert(0) += naive_homology_dim(&c, k);
        }
    }
    out
}

#[test]
fn gysin_terms_are_stratum_homology() {
    for g in smooth_fixtures() {
        let gy = gysin_complex(&g);
        assert!(gy.squares_to_zero(), "{}", g.name);
        assert!(gy.stratum_mismatches().is_empty(), "{}", g.name);
        for ((p, k), d) in stratum_homology(&g) {
            assert_eq!(gy.dim(p, k), d, "{} p={p} k={k}", g.name);
        }
    }
}

#[test]
fn gysin_terms_of_the_four_line_grid() {
    let gy = gysin_complex(&fixtures::torus_grid(4));
    let dims: Vec<((usize, i32), usize)> = gy.dims.iter().filter(|(_, &d)| d > 0).map(|(&k, &d)| (k, d)).collect();
    assert_eq!(dims, vec![((0, 0), 1), ((0, 1), 2), ((0, 2), 1), ((1, 0), 4), ((1, 1), 4), ((2, 0), 4)]);
}

#[test]
fn first_two_pages_match_gysin() {
    for g in smooth_fixtures() {
        let cf = corner_complex(&g).unwrap();
        let ss = spectral_sequence(&cf.filtered);
        let gy = gysin_complex(&g);
        assert!(gy.page_mismatches(&ss).is_empty(), "{}", g.name);
        assert!(gy.second_page_mismatches(&ss).is_empty(), "{}", g.name);
        assert!(ss.stable_page <= 2, "{}", g.name);
    }
}

#[test]
fn cech_complexes_agree() {
    for g in smooth_fixtures() {
        let rep = cech_report(&g);
        assert!(rep.passed(), "{}: {rep:?}", g.name);
        let open: Vec<usize> = {
            let c = g.complement_retract_complex();
            c.degrees().map(|k| naive_homology_dim(&c, k)).collect()
        };
        for (k, d) in open.iter().enumerate() {
            assert_eq!(rep.total_dims.get(&(k as i32)).copied().unwrap_or(0), *d, "{} k={k}", g.name);
        }
    }
}

#[test]
fn borel_moore_duality() {
    for g in smooth_fixtures() {
        let rep = duality_report(&g).unwrap();
        assert!(rep.passed(), "{}: {:?}", g.name, rep.failures());
    }
    // R has H^BM_1 = 1 and no H^BM_0.
    let rep = duality_report(&fixtures::real_line()).unwrap();
    let total: BTreeMap<i32, usize> = rep.bm_table.iter().map(|(&k, row)| (k, row.last().map_or(0, |&(_, d)| d))).collect();
    assert_eq!(total.get(&0).copied().unwrap_or(0), 0);
    assert_eq!(total.get(&1).copied().unwrap_or(0), 1);
}

#[test]
fn identity_pushforward_is_the_identity() {
    for g in [fixtures::r_star(), fixtures::torus_grid(4), fixtures::projective_plane(&["x", "y", "z"])] {
        let id = SimplicialMap::identity(g.complex.vertex_count());
        let spec = PushforwardSpec::identity(g.divisor_count());
        let (morphism, rep) = weighted_pushforward(&id, &g, &g, &spec).unwrap();
        assert!(rep.passed(), "{}: {rep:?}", g.name);
        assert!(rep.pushforward_hypotheses);
        for (&(p, k), m) in &morphism.maps {
            assert_eq!(*m, BitMatrix::identity(m.rows()), "{} p={p} k={k}", g.name);
        }
    }
}

#[test]
fn exponent_shape_is_checked() {
    let g = fixtures::r_star();
    let id = SimplicialMap::identity(g.complex.vertex_count());
    let spec = PushforwardSpec { exponents: vec![vec![1]] };
    assert!(weighted_pushforward(&id, &g, &g, &spec).is_err());
}

#[test]
fn contained_blowdown_pushforward() {
    let (b, base) = fixtures::contained_blowup();
    let spec = PushforwardSpec { exponents: fixtures::contained_blowdown_exponents() };
    let (_, rep) = weighted_pushforward(&b.blowdown, &b.data, &base, &spec).unwrap();
    assert!(rep.passed(), "{rep:?}");
}

#[test]
fn poincare_gysin_of_identity() {
    let s = ClosedManifold::new(fixtures::sphere().complex).unwrap();
    let id = SimplicialMap::identity(s.complex.vertex_count());
    for k in 0..=2 {
        let dim = s.homology.dim(k);
        assert_eq!(poincare_gysin(&id, &s, &s, k), BitMatrix::identity(dim));
        assert_eq!(homology_pushforward(&id, &s, &s, k), BitMatrix::identity(dim));
    }
}

#[test]
fn closed_manifold_rejects_boundary() {
    let g = fixtures::projective_line("arc", 4, &[]);
    assert!(ClosedManifold::new(g.complex).is_ok());
    let arc = z2weight::simp::SimplicialComplex::from_maximal(3, &[vec![0, 1], vec![1, 2]]).unwrap();
    assert!(ClosedManifold::new(arc).is_err());
}
