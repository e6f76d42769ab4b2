//! Input documents. A file holds one document or an array of them; nodes of
//! hyperresolutions and blowup squares refer to compactifications by name.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::BitMatrix;
use crate::simp::{GoodCompData, SimplicialMap};
use crate::weight::{BlowupSquareData, BlowupSquarePairs, HyperresolutionArrow, HyperresolutionInput};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("{location}: {message}")]
    Field { location: String, message: String },
}

fn field(location: impl Into<String>, message: impl Into<String>) -> InputError {
    InputError::Field { location: location.into(), message: message.into() }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DivisorDoc {
    pub name: String,
    pub maximal_simplices: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoodCompDoc {
    pub name: String,
    pub vertices: usize,
    pub maximal_simplices: Vec<Vec<usize>>,
    #[serde(default)]
    pub divisors: Vec<DivisorDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub mask: u32,
    pub compactification: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowDoc {
    pub source: u32,
    pub target: u32,
    pub vertex_map: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HyperresolutionDoc {
    pub name: String,
    pub nodes: Vec<NodeDoc>,
    #[serde(default)]
    pub arrows: Vec<ArrowDoc>,
}

/// Homology dims of `E, C, M̃, M` keyed by degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareDims {
    pub exceptional: BTreeMap<String, usize>,
    pub center: BTreeMap<String, usize>,
    pub blown_up: BTreeMap<String, usize>,
    pub base: BTreeMap<String, usize>,
}

/// Row-major 0/1 matrices of `q, s, p, r` keyed by source degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SquareMaps {
    #[serde(default)]
    pub q: BTreeMap<String, Vec<Vec<u8>>>,
    #[serde(default)]
    pub s: BTreeMap<String, Vec<Vec<u8>>>,
    #[serde(default)]
    pub p: BTreeMap<String, Vec<Vec<u8>>>,
    #[serde(default)]
    pub r: BTreeMap<String, Vec<Vec<u8>>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum SquareDoc {
    /// Center meeting the divisor transversally.
    Transverse {
        exceptional: String,
        blown_up: String,
        center: String,
        base: String,
        inclusion_up: Vec<usize>,
        projection: Vec<usize>,
        blowdown: Vec<usize>,
        inclusion: Vec<usize>,
    },
    /// Center contained in the divisor; `exponents` rows are divisors of the
    /// blown-up space, columns divisors of the base.
    Contained {
        blown_up: String,
        base: String,
        blowdown: Vec<usize>,
        #[serde(default)]
        exponents: Option<Vec<Vec<u32>>>,
    },
    Matrices {
        codim: usize,
        dims: SquareDims,
        pushforward: SquareMaps,
        gysin: SquareMaps,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlowupSquareDoc {
    pub name: String,
    pub square: SquareDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorusQueryDoc {
    pub name: String,
    pub rank: usize,
    pub queries: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Document {
    GoodCompactification(GoodCompDoc),
    Hyperresolution(HyperresolutionDoc),
    BlowupSquare(BlowupSquareDoc),
    TorusQuery(TorusQueryDoc),
}

impl Document {
    pub fn name(&self) -> &str {
        match self {
            Document::GoodCompactification(d) => &d.name,
            Document::Hyperresolution(d) => &d.name,
            Document::BlowupSquare(d) => &d.name,
            Document::TorusQuery(d) => &d.name,
        }
    }
}

/// Documents of one input file, in file order.
#[derive(Clone, Debug, Default)]
pub struct Bundle {
    pub documents: Vec<Document>,
}

impl Bundle {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        // Errors inside a tagged document come without a position.
        let syntax = |e: serde_json::Error| match e.line() {
            0 => field("document", e.to_string()),
            line => InputError::Syntax { line, column: e.column(), message: e.to_string() },
        };
        let documents = if text.trim_start().starts_with('[') {
            serde_json::from_str::<Vec<Document>>(text).map_err(syntax)?
        } else {
            vec![serde_json::from_str::<Document>(text).map_err(syntax)?]
        };
        let bundle = Bundle { documents };
        bundle.check_names()?;
        Ok(bundle)
    }

    pub fn read(path: &str) -> Result<Self, InputError> {
        let text = std::fs::read_to_string(path).map_err(|e| InputError::Io { path: path.into(), message: e.to_string() })?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        let text = if self.documents.len() == 1 {
            serde_json::to_string_pretty(&self.documents[0])
        } else {
            serde_json::to_string_pretty(&self.documents)
        };
        text.expect("documents serialize") + "\n"
    }

    fn check_names(&self) -> Result<(), InputError> {
        let mut seen = BTreeMap::new();
        for (i, d) in self.documents.iter().enumerate() {
            if let Some(j) = seen.insert(d.name().to_string(), i) {
                return Err(field(format!("document {i}.name"), format!("`{}` already names document {j}", d.name())));
            }
        }
        Ok(())
    }

    pub fn compactifications(&self) -> impl Iterator<Item = &GoodCompDoc> {
        self.documents.iter().filter_map(|d| match d {
            Document::GoodCompactification(g) => Some(g),
            _ => None,
        })
    }

    pub fn compactification(&self, name: &str, location: &str) -> Result<GoodCompData, InputError> {
        self.compactifications()
            .find(|g| g.name == name)
            .ok_or_else(|| field(location, format!("no good_compactification named `{name}`")))?
            .to_data()
    }
}

impl GoodCompDoc {
    pub fn to_data(&self) -> Result<GoodCompData, InputError> {
        let loc = |f: &str| format!("{}.{f}", self.name);
        if self.maximal_simplices.is_empty() {
            return Err(field(loc("maximal_simplices"), "empty complex"));
        }
        let check = |what: String, simplices: &[Vec<usize>]| -> Result<(), InputError> {
            for (j, s) in simplices.iter().enumerate() {
                if s.is_empty() {
                    return Err(field(format!("{what}[{j}]"), "empty simplex"));
                }
                if let Some(&v) = s.iter().find(|&&v| v >= self.vertices) {
                    return Err(field(format!("{what}[{j}]"), format!("vertex {v} out of range 0..{}", self.vertices)));
                }
                let mut sorted = s.clone();
                sorted.sort_unstable();
                sorted.dedup();
                if sorted.len() != s.len() {
                    return Err(field(format!("{what}[{j}]"), "repeated vertex"));
                }
            }
            Ok(())
        };
        check(loc("maximal_simplices"), &self.maximal_simplices)?;
        for (i, d) in self.divisors.iter().enumerate() {
            check(loc(&format!("divisors[{i}].maximal_simplices")), &d.maximal_simplices)?;
        }
        let complex = crate::simp::SimplicialComplex::from_maximal(self.vertices, &self.maximal_simplices)
            .map_err(|e| field(loc("maximal_simplices"), e.to_string()))?;
        let divisors = self.divisors.iter().map(|d| (d.name.clone(), d.maximal_simplices.clone())).collect();
        GoodCompData::new(self.name.clone(), complex, divisors).map_err(|e| field(loc("divisors"), e.to_string()))
    }

    pub fn from_data(g: &GoodCompData) -> Self {
        GoodCompDoc {
            name: g.name.clone(),
            vertices: g.complex.vertex_count(),
            maximal_simplices: g.complex.maximal_simplices(),
            divisors: g
                .divisor_names
                .iter()
                .enumerate()
                .map(|(i, n)| DivisorDoc { name: n.clone(), maximal_simplices: g.divisor_maximal(i).to_vec() })
                .collect(),
        }
    }
}

fn vertex_map(v: &[usize], location: &str, source: &GoodCompData, target: &GoodCompData) -> Result<SimplicialMap, InputError> {
    if v.len() != source.complex.vertex_count() {
        return Err(field(location, format!("has {} entries, source has {} vertices", v.len(), source.complex.vertex_count())));
    }
    let f = SimplicialMap { vertex_map: v.to_vec() };
    f.check(&source.complex, &target.complex).map_err(|e| field(location, e.to_string()))?;
    Ok(f)
}

impl HyperresolutionDoc {
    pub fn to_input(&self, bundle: &Bundle) -> Result<HyperresolutionInput, InputError> {
        let mut h = HyperresolutionInput::default();
        for (i, n) in self.nodes.iter().enumerate() {
            let loc = format!("{}.nodes[{i}]", self.name);
            let g = bundle.compactification(&n.compactification, &loc)?;
            if h.nodes.insert(n.mask, g).is_some() {
                return Err(field(loc, format!("mask {} appears twice", n.mask)));
            }
        }
        for (i, a) in self.arrows.iter().enumerate() {
            let loc = format!("{}.arrows[{i}]", self.name);
            let (Some(s), Some(t)) = (h.nodes.get(&a.source), h.nodes.get(&a.target)) else {
                return Err(field(loc, format!("arrow {} -> {} references a missing node", a.source, a.target)));
            };
            let map = vertex_map(&a.vertex_map, &format!("{loc}.vertex_map"), s, t)?;
            h.arrows.push(HyperresolutionArrow { source: a.source, target: a.target, map });
        }
        Ok(h)
    }
}

fn matrix(rows: &[Vec<u8>], location: &str) -> Result<BitMatrix, InputError> {
    let width = rows.first().map_or(0, Vec::len);
    let mut m = BitMatrix::zeros(rows.len(), width);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != width {
            return Err(field(format!("{location}[{i}]"), "ragged matrix row"));
        }
        for (j, &x) in r.iter().enumerate() {
            match x {
                0 => {}
                1 => m.set(i, j, true),
                _ => return Err(field(format!("{location}[{i}][{j}]"), "entries must be 0 or 1")),
            }
        }
    }
    Ok(m)
}

fn degree(key: &str, location: &str) -> Result<i32, InputError> {
    key.parse().map_err(|_| field(format!("{location}.{key}"), "keys must be integer degrees"))
}

fn matrices(maps: &BTreeMap<String, Vec<Vec<u8>>>, location: &str) -> Result<BTreeMap<i32, BitMatrix>, InputError> {
    maps.iter().map(|(k, rows)| Ok((degree(k, location)?, matrix(rows, &format!("{location}.{k}"))?))).collect()
}

fn dims(d: &BTreeMap<String, usize>, location: &str) -> Result<BTreeMap<i32, usize>, InputError> {
    d.iter().map(|(k, &v)| Ok((degree(k, location)?, v))).collect()
}

pub enum ResolvedSquare {
    Transverse(BlowupSquarePairs),
    Contained { blown_up: GoodCompData, base: GoodCompData, blowdown: SimplicialMap, exponents: Option<Vec<Vec<u32>>> },
    Matrices(BlowupSquareData),
}

impl BlowupSquareDoc {
    pub fn resolve(&self, bundle: &Bundle) -> Result<ResolvedSquare, InputError> {
        let loc = |f: &str| format!("{}.square.{f}", self.name);
        Ok(match &self.square {
            SquareDoc::Transverse { exceptional, blown_up, center, base, inclusion_up, projection, blowdown, inclusion } => {
                let e = bundle.compactification(exceptional, &loc("exceptional"))?;
                let mt = bundle.compactification(blown_up, &loc("blown_up"))?;
                let c = bundle.compactification(center, &loc("center"))?;
                let m = bundle.compactification(base, &loc("base"))?;
                ResolvedSquare::Transverse(BlowupSquarePairs {
                    inclusion_up: vertex_map(inclusion_up, &loc("inclusion_up"), &e, &mt)?,
                    projection: vertex_map(projection, &loc("projection"), &e, &c)?,
                    blowdown: vertex_map(blowdown, &loc("blowdown"), &mt, &m)?,
                    inclusion: vertex_map(inclusion, &loc("inclusion"), &c, &m)?,
                    exceptional: e,
                    blown_up: mt,
                    center: c,
                    base: m,
                })
            }
            SquareDoc::Contained { blown_up, base, blowdown, exponents } => {
                let mt = bundle.compactification(blown_up, &loc("blown_up"))?;
                let m = bundle.compactification(base, &loc("base"))?;
                let blowdown = vertex_map(blowdown, &loc("blowdown"), &mt, &m)?;
                if let Some(x) = exponents {
                    if x.len() != mt.divisor_count() || x.iter().any(|r| r.len() != m.divisor_count()) {
                        return Err(field(
                            loc("exponents"),
                            format!("expected {} rows of length {}", mt.divisor_count(), m.divisor_count()),
                        ));
                    }
                }
                ResolvedSquare::Contained { blown_up: mt, base: m, blowdown, exponents: exponents.clone() }
            }
            SquareDoc::Matrices { codim, dims: square_dims, pushforward, gysin } => ResolvedSquare::Matrices(BlowupSquareData {
                codim: *codim,
                dim_e: dims(&square_dims.exceptional, &loc("dims.exceptional"))?,
                dim_c: dims(&square_dims.center, &loc("dims.center"))?,
                dim_mt: dims(&square_dims.blown_up, &loc("dims.blown_up"))?,
                dim_m: dims(&square_dims.base, &loc("dims.base"))?,
                q_push: matrices(&pushforward.q, &loc("pushforward.q"))?,
                s_push: matrices(&pushforward.s, &loc("pushforward.s"))?,
                p_push: matrices(&pushforward.p, &loc("pushforward.p"))?,
                r_push: matrices(&pushforward.r, &loc("pushforward.r"))?,
                q_gysin: matrices(&gysin.q, &loc("gysin.q"))?,
                s_gysin: matrices(&gysin.s, &loc("gysin.s"))?,
                p_gysin: matrices(&gysin.p, &loc("gysin.p"))?,
                r_gysin: matrices(&gysin.r, &loc("gysin.r"))?,
            }),
        })
    }

    pub fn from_data(name: &str, b: &BlowupSquareData) -> Self {
        let dense = |m: &BTreeMap<i32, BitMatrix>| -> BTreeMap<String, Vec<Vec<u8>>> {
            m.iter().filter(|(_, x)| x.rows() * x.cols() > 0).map(|(&k, x)| (k.to_string(), x.to_dense())).collect()
        };
        let nonzero = |d: &BTreeMap<i32, usize>| d.iter().filter(|(_, &v)| v > 0).map(|(&k, &v)| (k.to_string(), v)).collect();
        BlowupSquareDoc {
            name: name.to_string(),
            square: SquareDoc::Matrices {
                codim: b.codim,
                dims: SquareDims {
                    exceptional: nonzero(&b.dim_e),
                    center: nonzero(&b.dim_c),
                    blown_up: nonzero(&b.dim_mt),
                    base: nonzero(&b.dim_m),
                },
                pushforward: SquareMaps { q: dense(&b.q_push), s: dense(&b.s_push), p: dense(&b.p_push), r: dense(&b.r_push) },
                gysin: SquareMaps { q: dense(&b.q_gysin), s: dense(&b.s_gysin), p: dense(&b.p_gysin), r: dense(&b.r_gysin) },
            },
        }
    }
}
