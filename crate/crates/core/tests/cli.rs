use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use z2weight::cli::{parse_torus_text, torus_query};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_z2weight"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn fixture_file(dir: &Path, name: &str) -> String {
    let out = run(&["fixtures", name, "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    dir.join(format!("{name}.json")).to_str().unwrap().to_string()
}

fn structured(args: &[&str]) -> (i32, serde_json::Value) {
    let mut all = vec!["--format", "structured"];
    all.extend_from_slice(args);
    let out = run(&all);
    let json = serde_json::from_slice(&out.stdout).unwrap_or(serde_json::Value::Null);
    (out.status.code().unwrap(), json)
}

#[test]
fn every_fixture_round_trips_through_validate() {
    let dir = scratch("round_trip");
    let out = run(&["fixtures", "all", "--out", dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let mut count = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let out = run(&["validate", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0), "{}: {}", path.display(), String::from_utf8_lossy(&out.stdout));
        count += 1;
    }
    assert_eq!(count, z2weight::cli::fixtures::NAMES.len());
}

#[test]
fn r_star_weight_row() {
    let dir = scratch("r_star_row");
    let f = fixture_file(&dir, "r_star");
    let (code, json) = structured(&["weight", &f]);
    assert_eq!(code, 0);
    let row = &json["subjects"][0]["weight_table"]["rows"]["0"];
    assert_eq!(row, &serde_json::json!([[-2, 0], [-1, 1], [0, 2]]));
}

#[test]
fn pages_first_page_equals_gysin_dump() {
    let dir = scratch("pages_gysin");
    for name in ["r_star", "torus_grid4", "punctured_plane", "three_parallel_lines"] {
        let f = fixture_file(&dir, name);
        let (c1, pages) = structured(&["pages", &f]);
        let (c2, gysin) = structured(&["gysin", &f]);
        assert_eq!((c1, c2), (0, 0), "{name}");
        let dims = |v: &serde_json::Value| -> Vec<(i64, i64, i64)> {
            v["subjects"][0]["pages"]["pages"]["1"]
                .as_array()
                .unwrap()
                .iter()
                .map(|e| (e["p"].as_i64().unwrap(), e["q"].as_i64().unwrap(), e["dim"].as_i64().unwrap()))
                .filter(|e| e.2 > 0)
                .collect()
        };
        assert_eq!(dims(&pages), dims(&gysin), "{name}");
    }
}

#[test]
fn reports_are_deterministic() {
    let dir = scratch("determinism");
    let f = fixture_file(&dir, "lemniscate");
    for format in ["table", "csv", "structured"] {
        let a = run(&["--format", format, "--emit-pages", "assemble", &f]);
        let b = run(&["--format", format, "--emit-pages", "assemble", &f]);
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout, "{format}");
    }
}

#[test]
fn exit_codes() {
    let dir = scratch("exit_codes");
    let malformed = dir.join("malformed.json");
    std::fs::write(&malformed, "{ \"kind\": \"good_compactification\", \"name\": ").unwrap();
    let out = run(&["validate", malformed.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line"));

    let unknown_field = dir.join("unknown.json");
    std::fs::write(&unknown_field, r#"{"kind": "good_compactification", "name": "x", "vertices": 1, "maximal_simplices": [[0]], "divisors": [], "extra": 1}"#).unwrap();
    assert_eq!(run(&["validate", unknown_field.to_str().unwrap()]).status.code(), Some(2));

    assert_eq!(run(&["validate", dir.join("missing.json").to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["--subdivide", "3", "validate", "x"]).status.code(), Some(2));
    assert_eq!(run(&["fixtures", "no_such_fixture"]).status.code(), Some(2));

    // Not a manifold: three triangles on one edge.
    let book = dir.join("book.json");
    std::fs::write(&book, r#"{"kind": "good_compactification", "name": "book", "vertices": 5, "maximal_simplices": [[0,1,2],[0,1,3],[0,1,4]], "divisors": []}"#).unwrap();
    assert_eq!(run(&["validate", book.to_str().unwrap()]).status.code(), Some(1));

    let grid = fixture_file(&dir, "r_star_squared_grid");
    let lines = fixture_file(&dir, "three_parallel_lines");
    let plane = fixture_file(&dir, "r_star_squared_plane");
    assert_eq!(run(&["--compare", &plane, "independence", &grid]).status.code(), Some(0));
    assert_eq!(run(&["--compare", &lines, "independence", &grid]).status.code(), Some(1));
}

#[test]
fn every_command_passes_on_its_fixtures() {
    let dir = scratch("commands");
    let smooth = ["circle", "r_star", "torus_grid2", "punctured_plane", "r_star_squared_plane"];
    for name in smooth {
        let f = fixture_file(&dir, name);
        for cmd in ["validate", "corner", "weight", "pages", "gysin", "cech", "duality"] {
            let out = run(&[cmd, &f]);
            assert_eq!(out.status.code(), Some(0), "{cmd} {name}: {}", String::from_utf8_lossy(&out.stdout));
        }
    }
    for name in ["lemniscate", "lemniscate_times_r_star"] {
        let f = fixture_file(&dir, name);
        assert_eq!(run(&["assemble", &f]).status.code(), Some(0), "{name}");
    }
    for name in ["sphere_blowup_square", "transverse_blowup", "contained_blowup"] {
        let f = fixture_file(&dir, name);
        let out = run(&["blowup-check", &f]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stdout));
    }
}

#[test]
fn csv_has_a_fixed_header() {
    let dir = scratch("csv");
    let f = fixture_file(&dir, "r_star");
    let out = run(&["--format", "csv", "weight", &f]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("subject,section,k_or_r,p,q,dim,d_rank,check,pass,detail\n"));
    assert!(text.contains("r_star,weight_table,0,-1,,1,,,,"));
}

#[test]
fn torus_queries() {
    let dir = scratch("torus");
    let path = dir.join("queries.txt");
    std::fs::write(&path, "rank 3\n# comment\nmul 1+g1 1+g2\naugmentation g1+g2+g3\ndims\n").unwrap();
    let out = run(&["torus", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = parse_torus_text("q", "rank 2\nmul 1+g1 1+g1\n").unwrap();
    assert_eq!(doc.rank, 2);
    let algebra = z2weight::torus::TorusAlgebra::new(2).unwrap();
    assert_eq!(torus_query(&algebra, &doc.queries[0]).unwrap(), "0");
    assert_eq!(torus_query(&algebra, "dims").unwrap(), "p=0:1 p=1:2 p=2:1");
    assert_eq!(torus_query(&algebra, "filtration 1+g1+g2+g3").unwrap(), "2");
    assert!(torus_query(&algebra, "frobnicate").is_err());
    assert!(parse_torus_text("q", "mul 1 1\n").is_err());
}
