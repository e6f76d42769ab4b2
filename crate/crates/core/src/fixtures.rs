//! Triangulated good compactifications and maps used as the example corpus.

use std::collections::{BTreeMap, HashMap};

use crate::cechgysin::ClosedManifold;
use crate::simp::{barycentric_subdivide, product_fixture, GoodCompData, Simplex, SimplicialComplex, SimplicialMap};
use crate::weight::{BlowupSquareData, BlowupSquarePairs, HyperresolutionArrow, HyperresolutionInput};

pub fn complex(vertex_count: usize, maximal: &[Simplex]) -> SimplicialComplex {
    SimplicialComplex::from_maximal(vertex_count, maximal).expect("fixture complex")
}

pub fn data(name: &str, k: SimplicialComplex, divisors: &[(&str, Vec<Simplex>)]) -> GoodCompData {
    GoodCompData::new(name, k, divisors.iter().map(|(n, s)| (n.to_string(), s.clone())).collect()).expect("fixture data")
}

pub fn cycle_edges(len: usize) -> Vec<Simplex> {
    (0..len).map(|i| vec![i, (i + 1) % len]).collect()
}

pub fn point() -> GoodCompData {
    data("point", complex(1, &[vec![0]]), &[])
}

/// `k` isolated points.
pub fn points(k: usize) -> GoodCompData {
    data(&format!("{k}points"), complex(k, &(0..k).map(|v| vec![v]).collect::<Vec<_>>()), &[])
}

/// Boundary of a triangle.
pub fn circle() -> GoodCompData {
    data("circle", complex(3, &cycle_edges(3)), &[])
}

/// `len`-gon with the named divisor points.
pub fn projective_line(name: &str, len: usize, points: &[(&str, Vec<usize>)]) -> GoodCompData {
    let divisors: Vec<(&str, Vec<Simplex>)> =
        points.iter().map(|(n, vs)| (*n, vs.iter().map(|&v| vec![v]).collect())).collect();
    data(name, complex(len, &cycle_edges(len)), &divisors)
}

/// `P¹` with the points `0` and `∞`.
pub fn r_star() -> GoodCompData {
    projective_line("r_star", 4, &[("zero", vec![0]), ("infinity", vec![2])])
}

pub fn r_star_named(zero: &str, infinity: &str) -> GoodCompData {
    projective_line("r_star", 4, &[(zero, vec![0]), (infinity, vec![2])])
}

/// `P¹` with the point `∞`.
pub fn real_line() -> GoodCompData {
    projective_line("real_line", 4, &[("infinity", vec![0])])
}

/// `P¹` with `-1, 0, 1, ∞` as one divisor.
pub fn line_minus_three_points() -> GoodCompData {
    projective_line("line_minus_three_points", 8, &[("x_roots", vec![0, 2, 4, 6])])
}

pub fn plain_circle4() -> GoodCompData {
    projective_line("circle4", 4, &[])
}

/// `P¹ × P¹` with 0, 1, 2 or 4 grid circles as divisor.
pub fn torus_grid(circles: usize) -> GoodCompData {
    let g = match circles {
        0 => product_fixture(&plain_circle4(), &plain_circle4()),
        1 => product_fixture(&plain_circle4(), &real_line()),
        2 => product_fixture(&plain_circle4(), &r_star()),
        4 => product_fixture(&r_star_named("x0", "xinf"), &r_star_named("y0", "yinf")),
        _ => panic!("torus grid with {circles} circles is not in the corpus"),
    }
    .expect("product fixture");
    GoodCompData::new(format!("torus_grid{circles}"), g.complex.clone(), divisor_list(&g)).expect("renamed")
}

pub fn divisor_list(g: &GoodCompData) -> Vec<(String, Vec<Simplex>)> {
    g.divisor_names.iter().enumerate().map(|(i, n)| (n.clone(), g.divisor_maximal(i).to_vec())).collect()
}

pub fn renamed(g: &GoodCompData, name: &str) -> GoodCompData {
    GoodCompData::new(name, g.complex.clone(), divisor_list(g)).expect("renamed")
}

/// `(R ∖ {-1,0,1}) × R` compactified in `P¹ × P¹`.
pub fn three_parallel_lines_product() -> GoodCompData {
    let l = line_minus_three_points();
    let r = projective_line("real_line", 4, &[("y_inf", vec![0])]);
    renamed(&product_fixture(&l, &r).expect("product"), "three_parallel_lines")
}

// ====================================================================
// Sign-vector triangulations of S² and P²
// ====================================================================

type Sign = [i8; 3];

fn normalize_projective(v: Sign) -> Sign {
    match v.iter().find(|&&x| x != 0) {
        Some(&x) if x < 0 => [-v[0], -v[1], -v[2]],
        _ => v,
    }
}

fn full_flags() -> Vec<[Sign; 3]> {
    let mut out = Vec::new();
    for signs in 0..8u8 {
        let top: Sign = [0, 1, 2].map(|i| if signs >> i & 1 == 1 { -1 } else { 1 });
        for perm in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let mut v0 = [0i8; 3];
            v0[perm[0]] = top[perm[0]];
            let mut v1 = v0;
            v1[perm[1]] = top[perm[1]];
            out.push([v0, v1, top]);
        }
    }
    out
}

/// Barycentric subdivision of the octahedron (`projective = false`) or of its
/// antipodal quotient; vertices are sign vectors.
pub struct SignComplex {
    pub complex: SimplicialComplex,
    pub vertices: Vec<Sign>,
    index: HashMap<Sign, usize>,
    projective: bool,
}

impl SignComplex {
    pub fn new(projective: bool) -> Self {
        let mut vertices: Vec<Sign> = Vec::new();
        let mut index = HashMap::new();
        let mut tris = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        for flag in full_flags() {
            let flag = if projective && flag[2][0] < 0 { flag.map(|v| v.map(|x| -x)) } else { flag };
            if !seen.insert(flag) {
                continue;
            }
            let mut tri = Vec::new();
            for v in flag {
                let key = if projective { normalize_projective(v) } else { v };
                let id = *index.entry(key).or_insert_with(|| {
                    vertices.push(key);
                    vertices.len() - 1
                });
                tri.push(id);
            }
            tris.push(tri);
        }
        let complex = SimplicialComplex::from_maximal(vertices.len(), &tris).expect("sign complex");
        Self { complex, vertices, index, projective }
    }

    pub fn vertex(&self, v: Sign) -> usize {
        let key = if self.projective { normalize_projective(v) } else { v };
        self.index[&key]
    }

    /// Edges of the coordinate line `x_axis = 0`.
    pub fn coordinate_line(&self, axis: usize) -> Vec<Simplex> {
        self.complex
            .simplices(1)
            .iter()
            .filter(|e| e.iter().all(|&v| self.vertices[v][axis] == 0))
            .cloned()
            .collect()
    }
}

/// `P²` with the named coordinate lines (`"x"`, `"y"`, `"z"`) as divisors.
pub fn projective_plane(lines: &[&str]) -> GoodCompData {
    let sc = SignComplex::new(true);
    let divisors: Vec<(&str, Vec<Simplex>)> = lines
        .iter()
        .map(|&l| {
            let axis = match l {
                "x" => 0,
                "y" => 1,
                "z" => 2,
                _ => panic!("unknown line {l}"),
            };
            (l, sc.coordinate_line(axis))
        })
        .collect();
    data(&format!("p2_{}", lines.join("")), sc.complex.clone(), &divisors)
}

pub fn sphere() -> GoodCompData {
    data("sphere", SignComplex::new(false).complex, &[])
}

/// The point `[0:0:1]` (or the north pole of the sphere).
pub fn pole(projective: bool) -> usize {
    SignComplex::new(projective).vertex([0, 0, 1])
}

// ====================================================================
// Blowing up a vertex of a surface
// ====================================================================

pub struct VertexBlowup {
    pub data: GoodCompData,
    /// Blowdown to the original complex.
    pub blowdown: SimplicialMap,
    /// Vertices of the exceptional cycle, in order.
    pub exceptional: Vec<usize>,
}

/// Link cycle of a vertex in a closed surface, in cyclic order.
pub fn link_cycle(k: &SimplicialComplex, v: usize) -> Vec<usize> {
    let edges: Vec<(usize, usize)> = k
        .simplices(2)
        .iter()
        .filter(|t| t.contains(&v))
        .map(|t| {
            let o: Vec<usize> = t.iter().copied().filter(|&x| x != v).collect();
            (o[0], o[1])
        })
        .collect();
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in &edges {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let start = *adj.keys().next().expect("nonempty link");
    let mut cycle = vec![start];
    let mut prev = start;
    let mut cur = adj[&start][0];
    while cur != start {
        cycle.push(cur);
        let next = if adj[&cur][0] == prev { adj[&cur][1] } else { adj[&cur][0] };
        prev = cur;
        cur = next;
    }
    cycle
}

/// Replaces the star of vertex `v` by a Möbius band whose core becomes the
/// exceptional divisor. The link cycle `w_0 … w_{L-1}` is joined to core
/// vertex `e_{c(i)}`, where `c` advances by one at each step except into a
/// vertex `w_a` with `{v, w_a}` in a divisor; such a vertex then meets the core
/// only in the endpoint of its strict transform, so the blowdown is a map of
/// pairs. The exceptional divisor is added under `exceptional_name` when given.
pub fn blow_up_vertex(g: &GoodCompData, v: usize, exceptional_name: Option<&str>, name: &str) -> VertexBlowup {
    let k = &g.complex;
    let w = link_cycle(k, v);
    let len = w.len();
    let on_divisor: Vec<bool> = w.iter().map(|&x| g.mask_of(&[v.min(x), v.max(x)]) != 0).collect();
    let stays = on_divisor.iter().filter(|&&b| b).count();
    assert!(
        (len - stays) % 2 == 0 && len - stays >= 6,
        "link of length {len} with {stays} divisor directions cannot be blown up by this construction"
    );
    let r = (len - stays) / 2;
    let mut core_index = vec![0usize; len];
    for i in 1..len {
        core_index[i] = (core_index[i - 1] + usize::from(!on_divisor[i])) % r;
    }
    let nv = k.vertex_count();
    let e: Vec<usize> = std::iter::once(v).chain(nv..nv + r - 1).collect();
    let mut tris: Vec<Simplex> = k.simplices(2).iter().filter(|t| !t.contains(&v)).cloned().collect();
    for i in 0..len {
        let n = (i + 1) % len;
        let (a, b) = (e[core_index[i]], e[core_index[n]]);
        tris.push(vec![w[i], w[n], a]);
        if a != b {
            tris.push(vec![w[n], a, b]);
        }
    }
    let complex = SimplicialComplex::from_maximal(nv + r - 1, &tris).expect("blowup complex");
    let pos: HashMap<usize, usize> = w.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let mut divisors: Vec<(String, Vec<Simplex>)> = Vec::new();
    for (b, dname) in g.divisor_names.iter().enumerate() {
        let mut simplices = Vec::new();
        for s in g.divisor_maximal(b) {
            if !s.contains(&v) {
                simplices.push(s.clone());
            } else if s.len() == 2 {
                let other = if s[0] == v { s[1] } else { s[0] };
                simplices.push(vec![other, e[core_index[pos[&other]]]]);
            } else {
                panic!("divisor simplex {s:?} through the center is not an edge");
            }
        }
        divisors.push((dname.clone(), simplices));
    }
    if let Some(en) = exceptional_name {
        divisors.push((en.to_string(), (0..r).map(|i| vec![e[i], e[(i + 1) % r]]).collect()));
    }
    let data = GoodCompData::new(name, complex, divisors).expect("blowup data");
    let mut vertex_map: Vec<usize> = (0..nv).collect();
    vertex_map.extend(std::iter::repeat(v).take(r - 1));
    VertexBlowup { data, blowdown: SimplicialMap { vertex_map }, exceptional: e }
}

/// `R² ∖ 0`: `P²` with the line at infinity, blown up at the origin.
pub fn punctured_plane() -> GoodCompData {
    let p2 = projective_plane(&["z"]);
    blow_up_vertex(&p2, pole(true), Some("e"), "punctured_plane").data
}

/// The exceptional cycle of a vertex blowup as a divisor-free complex, with
/// its inclusion into the blown-up surface.
pub fn exceptional_curve(b: &VertexBlowup) -> (GoodCompData, SimplicialMap) {
    let r = b.exceptional.len();
    let g = data("exceptional", complex(r, &cycle_edges(r)), &[]);
    (g, SimplicialMap { vertex_map: b.exceptional.clone() })
}

// ====================================================================
// Hyperresolutions and blowup squares
// ====================================================================

fn arrow(source: u32, target: u32, vertex_map: Vec<usize>) -> HyperresolutionArrow {
    HyperresolutionArrow { source, target, map: SimplicialMap { vertex_map } }
}

/// Figure eight: circle `1`, node `2`, the two preimages of the node `3`.
pub fn lemniscate_cube() -> HyperresolutionInput {
    let nodes = [(1u32, plain_circle4()), (2, point()), (3, points(2))].into_iter().collect();
    HyperresolutionInput { nodes, arrows: vec![arrow(3, 1, vec![0, 2]), arrow(3, 2, vec![0, 0])] }
}

/// Nodewise product of a cube with `g`; maps act by `f × id`.
pub fn cube_times(h: &HyperresolutionInput, g: &GoodCompData) -> HyperresolutionInput {
    let width = g.complex.vertex_count();
    let nodes = h
        .nodes
        .iter()
        .map(|(&m, x)| (m, product_fixture(x, g).expect("product node")))
        .collect();
    let arrows = h
        .arrows
        .iter()
        .map(|a| {
            let vertex_map = (0..a.map.vertex_map.len() * width)
                .map(|v| a.map.vertex_map[v / width] * width + v % width)
                .collect();
            arrow(a.source, a.target, vertex_map)
        })
        .collect();
    HyperresolutionInput { nodes, arrows }
}

pub fn lemniscate_times_r_star() -> HyperresolutionInput {
    cube_times(&lemniscate_cube(), &r_star())
}

/// `S²` blown up at a vertex, with the point center and the exceptional
/// circle, as closed manifolds with the four maps `q, s, p, r`.
pub fn sphere_blowup_square() -> BlowupSquareData {
    let sphere = sphere();
    let v = pole(false);
    let b = blow_up_vertex(&sphere, v, None, "sphere_blowup");
    let (e, s) = exceptional_curve(&b);
    let man = |k: &SimplicialComplex| ClosedManifold::new(k.clone()).expect("closed manifold");
    let (me, mc, mt, mm) = (man(&e.complex), man(&point().complex), man(&b.data.complex), man(&sphere.complex));
    let q = SimplicialMap { vertex_map: vec![0; e.complex.vertex_count()] };
    let r = SimplicialMap { vertex_map: vec![v] };
    BlowupSquareData::from_maps(&me, &mc, &mt, &mm, &q, &s, &b.blowdown, &r).expect("square data")
}

/// `P²` with the line at infinity, blown up at a point off it.
pub fn transverse_blowup_square() -> BlowupSquarePairs {
    let base = projective_plane(&["z"]);
    let v = pole(true);
    let b = blow_up_vertex(&base, v, None, "p2_z_blowup");
    let (e, s) = exceptional_curve(&b);
    let projection = SimplicialMap { vertex_map: vec![0; e.complex.vertex_count()] };
    BlowupSquarePairs {
        exceptional: e,
        blown_up: b.data,
        center: point(),
        base,
        inclusion_up: s,
        projection,
        blowdown: b.blowdown,
        inclusion: SimplicialMap { vertex_map: vec![v] },
    }
}

/// Subdivided `P²` with the three coordinate lines, blown up at `x ∩ y`.
pub fn contained_blowup() -> (VertexBlowup, GoodCompData) {
    let base = renamed(&barycentric_subdivide(&projective_plane(&["x", "y", "z"])).data, "sd_p2_xyz");
    (blow_up_vertex(&base, pole(true), Some("e"), "p2_xyz_blowup"), base)
}

/// Divisor exponents of the blowdown in `contained_blowup`: rows are
/// `x̃, ỹ, z̃, e`, columns `x, y, z`.
pub fn contained_blowdown_exponents() -> Vec<Vec<u32>> {
    vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 0]]
}
