//! The twelve acceptance criteria, one PASS/FAIL line each.

mod common;

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use z2weight::cechgysin::{cech_report, duality_report, gysin_complex};
use z2weight::cli::fixtures::{fixture, NAMES};
use z2weight::corner::{cellular_pullback_phi, corner_complex, pi_pushforward_exactness, pullback_report};
use z2weight::filt::{abutment_mismatches, decalage, homology_filtration, spectral_sequence};
use z2weight::fixtures;
use z2weight::simp::GoodCompData;
use z2weight::torus::{binomial, graded_matrix, graded_matrix_by_pushforward, TorusAlgebra, TorusHom};
use z2weight::weight::{
    assemble, blowup_square_checks, contained_blowup_check, decalage_page_mismatches, independence_check,
    transverse_blowup_check, weight_complex,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

/// Every good compactification appearing in the emitted corpus, once each.
fn corpus() -> Vec<GoodCompData> {
    let mut seen = BTreeMap::new();
    for name in NAMES {
        let bundle = fixture(name).expect("corpus name");
        for doc in bundle.compactifications() {
            let g = doc.to_data().expect("corpus document converts");
            seen.entry(g.name.clone()).or_insert(g);
        }
    }
    seen.into_values().collect()
}

fn h0_weights(g: &GoodCompData, ps: &[i32]) -> Vec<usize> {
    let t = weight_complex(g).expect("weight complex").table();
    ps.iter().map(|&p| t.dim(0, p)).collect()
}

fn torus_exactness() -> Outcome {
    let mut bad = Vec::new();
    for n in 0..=6 {
        let alg = TorusAlgebra::new(n).unwrap();
        for p in 0..=n {
            if alg.graded_dim(p) != binomial(n, p) {
                bad.push(format!("dim gr^{p} at rank {n}"));
            }
        }
        if !alg.ideal_power(n + 1).is_zero() {
            bad.push(format!("top power at rank {n}"));
        }
    }
    let mut homs = 0;
    for n in 0..=3 {
        for m in 0..=3 {
            let (src, tgt) = (TorusAlgebra::new(n).unwrap(), TorusAlgebra::new(m).unwrap());
            for hom in TorusHom::all(n, m) {
                homs += 1;
                for p in 0..=n.min(m) {
                    if graded_matrix(&hom, p) != graded_matrix_by_pushforward(&hom, &src, &tgt, p).unwrap() {
                        bad.push(format!("hom {n}->{m} p={p}"));
                    }
                }
            }
        }
    }
    outcome(bad.is_empty(), format!("{homs} homs; failures {bad:?}"))
}

fn r_star() -> Outcome {
    let found = h0_weights(&fixtures::r_star(), &[-1, 0]);
    outcome(found == [1, 2], format!("(W_-1, W_0) H_0 = {found:?}"))
}

fn punctured_square() -> Outcome {
    let ps = [0, -1, -2];
    let grid = h0_weights(&fixtures::torus_grid(4), &ps);
    let plane = h0_weights(&fixtures::projective_plane(&["x", "y", "z"]), &ps);
    let indep = independence_check(&fixtures::torus_grid(4), &fixtures::projective_plane(&["x", "y", "z"])).unwrap();
    outcome(
        grid == [4, 3, 1] && plane == [4, 3, 1] && indep.equal,
        format!("grid {grid:?}, plane {plane:?}, independent {}", indep.equal),
    )
}

fn three_lines() -> Outcome {
    let ps = [0, -1, -2];
    let lines = h0_weights(&fixtures::three_parallel_lines_product(), &ps);
    let indep = independence_check(&fixtures::torus_grid(4), &fixtures::three_parallel_lines_product()).unwrap();
    outcome(lines == [4, 3, 0] && !indep.equal, format!("{lines:?}, equal to the square's table: {}", indep.equal))
}

fn cylinder_vs_plane() -> Outcome {
    let a = weight_complex(&fixtures::torus_grid(1)).unwrap().table().dim(1, -2);
    let b = weight_complex(&fixtures::punctured_plane()).unwrap().table().dim(1, -2);
    outcome((a, b) == (0, 1), format!("W_-2 H_1: {a} vs {b}"))
}

fn lemniscates() -> Outcome {
    let t = assemble(&fixtures::lemniscate_cube()).unwrap().weight.table();
    let lem = (t.dim(1, -1), t.homology_dim(1));
    let t = assemble(&fixtures::lemniscate_times_r_star()).unwrap().weight.table();
    let prod = (t.dim(1, -2), t.dim(1, -1), t.homology_dim(1));
    outcome(lem == (1, 2) && prod == (1, 3, 4), format!("lemniscate {lem:?}, times R* {prod:?}"))
}

fn over_corpus(f: impl Fn(&GoodCompData) -> bool) -> Outcome {
    let all = corpus();
    let bad: Vec<String> = all.iter().filter(|g| !f(g)).map(|g| g.name.clone()).collect();
    outcome(bad.is_empty(), format!("{} compactifications; failing {bad:?}", all.len()))
}

fn e1_gysin() -> Outcome {
    over_corpus(|g| {
        let cf = corner_complex(g).unwrap();
        gysin_complex(g).page_mismatches(&spectral_sequence(&cf.filtered)).is_empty()
    })
}

fn phi() -> Outcome {
    over_corpus(|g| pullback_report(&cellular_pullback_phi(g).unwrap()).passed() && cech_report(g).passed())
}

fn pi_exact() -> Outcome {
    over_corpus(|g| pi_pushforward_exactness(&corner_complex(g).unwrap()).passed())
}

fn duality() -> Outcome {
    over_corpus(|g| duality_report(g).unwrap().passed())
}

fn blowups() -> Outcome {
    let transverse = transverse_blowup_check(&fixtures::transverse_blowup_square()).unwrap().passed();
    let (b, base) = fixtures::contained_blowup();
    let contained = contained_blowup_check(&b.data, &base, &b.blowdown).unwrap().passed();
    let square = blowup_square_checks(&fixtures::sphere_blowup_square()).unwrap().passed();
    outcome(
        transverse && contained && square,
        format!("transverse {transverse}, contained {contained}, sphere square {square}"),
    )
}

fn random_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2024);
    let count = 500;
    let mut failures = Vec::new();
    for i in 0..count {
        let r = common::random_filtered(&mut rng, 30);
        let fc = &r.filtered;
        let ss = spectral_sequence(fc);
        let dec = decalage(fc);
        let dss = spectral_sequence(&dec);
        if !decalage_page_mismatches(&ss, &dss).is_empty() {
            failures.push(format!("#{i} decalage pages"));
        }
        let oracle = common::DenseFiltration::from_indices(&r);
        let (dlo, dhi) = dec.index_range();
        for rr in 1..=2 {
            for k in fc.degrees() {
                for p in dlo..=dhi {
                    let q = k - p;
                    if dss.page(rr).get(p, q).dim != oracle.page_dim(rr as i32 + 1, 2 * p + q, k) {
                        failures.push(format!("#{i} E^{rr}({p},{q}) against direct count"));
                    }
                }
            }
        }
        let h = fc.complex.homology_dims();
        for (k, d) in ss.abutment_dims() {
            if h.get(&k).copied().unwrap_or(0) != d {
                failures.push(format!("#{i} abutment k={k}"));
            }
        }
        let t = homology_filtration(fc);
        if !abutment_mismatches(&t, &ss).is_empty() {
            failures.push(format!("#{i} graded abutment"));
        }
        let (lo, hi) = fc.index_range();
        for k in fc.degrees() {
            for p in lo - 1..=hi + 1 {
                if t.dim(k, p) != common::image_filtration_dim(&r, k, p) {
                    failures.push(format!("#{i} image filtration k={k} p={p}"));
                }
            }
        }
    }
    failures.truncate(10);
    outcome(failures.is_empty(), format!("{count} complexes; failures {failures:?}"))
}

fn main() {
    let criteria: Vec<(&str, Option<Duration>, fn() -> Outcome)> = vec![
        ("1 torus exactness and graded matrices", Some(Duration::from_secs(5)), torus_exactness),
        ("2 R* weights", Some(Duration::from_secs(1)), r_star),
        ("3 (R*)^2 presentations", Some(Duration::from_secs(10)), punctured_square),
        ("4 three parallel lines", None, three_lines),
        ("5 P1 x R versus R^2 minus 0", None, cylinder_vs_plane),
        ("6 lemniscate assemblies", None, lemniscates),
        ("7 E1 equals Gysin", None, e1_gysin),
        ("8 cellular pullback", None, phi),
        ("9 projection exactness", None, pi_exact),
        ("10 duality", None, duality),
        ("11 blowups", None, blowups),
        ("12 random filtered complexes", Some(Duration::from_secs(60)), random_properties),
    ];
    let mut failed = 0;
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let mut o = run();
        let elapsed = start.elapsed();
        if let Some(limit) = limit {
            if elapsed > limit {
                o.pass = false;
                o.detail.push_str(&format!("; over the {limit:?} limit"));
            }
        }
        if !o.pass {
            failed += 1;
        }
        println!("{} criterion {name} ({:.2?}): {}", if o.pass { "PASS" } else { "FAIL" }, elapsed, o.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
