//! The fixture corpus as input documents.

use crate::fixtures as fx;
use crate::simp::GoodCompData;
use crate::weight::{BlowupSquarePairs, HyperresolutionInput};

use super::document::{
    ArrowDoc, BlowupSquareDoc, Bundle, Document, GoodCompDoc, HyperresolutionDoc, NodeDoc, SquareDoc,
};

pub const NAMES: &[&str] = &[
    "point",
    "circle",
    "torus_grid0",
    "torus_grid1",
    "torus_grid2",
    "torus_grid4",
    "r_star",
    "real_line",
    "p1_times_real_line",
    "punctured_plane",
    "r_star_squared_grid",
    "r_star_squared_plane",
    "three_parallel_lines",
    "lemniscate",
    "lemniscate_times_r_star",
    "sphere_blowup_square",
    "transverse_blowup",
    "contained_blowup",
];

fn single(g: &GoodCompData) -> Bundle {
    Bundle { documents: vec![Document::GoodCompactification(GoodCompDoc::from_data(g))] }
}

fn hyperresolution(name: &str, h: &HyperresolutionInput) -> Bundle {
    let mut documents: Vec<Document> = Vec::new();
    let mut nodes = Vec::new();
    for (&mask, g) in &h.nodes {
        if !documents.iter().any(|d| d.name() == g.name) {
            documents.push(Document::GoodCompactification(GoodCompDoc::from_data(g)));
        }
        nodes.push(NodeDoc { mask, compactification: g.name.clone() });
    }
    let arrows = h
        .arrows
        .iter()
        .map(|a| ArrowDoc { source: a.source, target: a.target, vertex_map: a.map.vertex_map.clone() })
        .collect();
    documents.push(Document::Hyperresolution(HyperresolutionDoc { name: name.to_string(), nodes, arrows }));
    Bundle { documents }
}

fn transverse(name: &str, sq: &BlowupSquarePairs) -> Bundle {
    let mut documents: Vec<Document> = [&sq.exceptional, &sq.blown_up, &sq.center, &sq.base]
        .iter()
        .map(|g| Document::GoodCompactification(GoodCompDoc::from_data(g)))
        .collect();
    documents.push(Document::BlowupSquare(BlowupSquareDoc {
        name: name.to_string(),
        square: SquareDoc::Transverse {
            exceptional: sq.exceptional.name.clone(),
            blown_up: sq.blown_up.name.clone(),
            center: sq.center.name.clone(),
            base: sq.base.name.clone(),
            inclusion_up: sq.inclusion_up.vertex_map.clone(),
            projection: sq.projection.vertex_map.clone(),
            blowdown: sq.blowdown.vertex_map.clone(),
            inclusion: sq.inclusion.vertex_map.clone(),
        },
    }));
    Bundle { documents }
}

/// The bundle emitted for a corpus name.
pub fn fixture(name: &str) -> Option<Bundle> {
    Some(match name {
        "point" => single(&fx::point()),
        "circle" => single(&fx::circle()),
        "torus_grid0" => single(&fx::torus_grid(0)),
        "torus_grid1" => single(&fx::torus_grid(1)),
        "torus_grid2" => single(&fx::torus_grid(2)),
        "torus_grid4" => single(&fx::torus_grid(4)),
        "r_star" => single(&fx::r_star()),
        "real_line" => single(&fx::real_line()),
        "p1_times_real_line" => single(&fx::renamed(&fx::torus_grid(1), "p1_times_real_line")),
        "punctured_plane" => single(&fx::punctured_plane()),
        "r_star_squared_grid" => single(&fx::renamed(&fx::torus_grid(4), "r_star_squared_grid")),
        "r_star_squared_plane" => single(&fx::renamed(&fx::projective_plane(&["x", "y", "z"]), "r_star_squared_plane")),
        "three_parallel_lines" => single(&fx::three_parallel_lines_product()),
        "lemniscate" => hyperresolution("lemniscate", &fx::lemniscate_cube()),
        "lemniscate_times_r_star" => hyperresolution("lemniscate_times_r_star", &fx::lemniscate_times_r_star()),
        "sphere_blowup_square" => Bundle {
            documents: vec![Document::BlowupSquare(BlowupSquareDoc::from_data("sphere_blowup_square", &fx::sphere_blowup_square()))],
        },
        "transverse_blowup" => transverse("transverse_blowup", &fx::transverse_blowup_square()),
        "contained_blowup" => {
            let (b, base) = fx::contained_blowup();
            let documents = vec![
                Document::GoodCompactification(GoodCompDoc::from_data(&b.data)),
                Document::GoodCompactification(GoodCompDoc::from_data(&base)),
                Document::BlowupSquare(BlowupSquareDoc {
                    name: "contained_blowup".into(),
                    square: SquareDoc::Contained {
                        blown_up: b.data.name.clone(),
                        base: base.name.clone(),
                        blowdown: b.blowdown.vertex_map.clone(),
                        exponents: Some(fx::contained_blowdown_exponents()),
                    },
                }),
            ];
            Bundle { documents }
        }
        _ => return None,
    })
}
