//! Simplicial complexes with families of divisor subcomplexes: validation,
//! the normal-crossing star count, barycentric subdivision, the dual cell
//! complex, divisor complexity and products.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{ChainComplex, ChainMap};
use crate::filt::FilteredComplex;
use crate::gf2::BitMatrix;

/// Sorted vertex list.
pub type Simplex = Vec<usize>;

/// Divisor index sets are bit masks over the divisor list.
pub type StratumMask = u64;

pub const MAX_DIVISORS: usize = 64;
pub const MAX_COMPLEXITY_COMPONENTS: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimpError {
    #[error("vertex {vertex} out of range (vertex count {count})")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("simplex {0:?} repeats a vertex")]
    RepeatedVertex(Simplex),
    #[error("vertex {0} is not used by any simplex")]
    UnusedVertex(usize),
    #[error("divisor `{divisor}` lists {simplex:?}, which is not a simplex of the complex")]
    UnknownSimplex { divisor: String, simplex: Simplex },
    #[error("too many divisors ({0}, limit {MAX_DIVISORS})")]
    TooManyDivisors(usize),
    #[error("duplicate divisor name `{0}`")]
    DuplicateName(String),
    #[error("divisor has {0} components; exhaustive coloring is limited to {MAX_COMPLEXITY_COMPONENTS}")]
    TooManyComponents(usize),
    #[error("simplicial map: {0}")]
    Map(String),
    #[error("product factors must be divisor-free on at least one side or use distinct names: {0}")]
    Product(String),
    #[error("input fails validation: {0}")]
    Invalid(String),
}

fn normalize(mut s: Simplex) -> Result<Simplex, SimpError> {
    s.sort_unstable();
    if s.windows(2).any(|w| w[0] == w[1]) {
        return Err(SimpError::RepeatedVertex(s));
    }
    Ok(s)
}

fn intersect(a: &[usize], b: &[usize]) -> Simplex {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn label(s: &[usize]) -> String {
    s.iter().map(|v| v.to_string()).join(".")
}

// ====================================================================
// Simplicial complexes
// ====================================================================

#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    vertex_count: usize,
    by_dim: Vec<Vec<Simplex>>,
    lookup: HashMap<Simplex, usize>,
    cofacets: Vec<Vec<Vec<usize>>>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.vertex_count == other.vertex_count && self.by_dim == other.by_dim
    }
}

impl Eq for SimplicialComplex {}

impl SimplicialComplex {
    /// Downward closure of the given simplices.
    pub fn from_maximal(vertex_count: usize, maximal: &[Simplex]) -> Result<Self, SimpError> {
        let mut sets: Vec<BTreeSet<Simplex>> = Vec::new();
        for s in maximal {
            let s = normalize(s.clone())?;
            if let Some(&v) = s.iter().find(|&&v| v >= vertex_count) {
                return Err(SimpError::VertexOutOfRange { vertex: v, count: vertex_count });
            }
            if s.is_empty() {
                continue;
            }
            for size in 1..=s.len() {
                if sets.len() < size {
                    sets.resize_with(size, BTreeSet::new);
                }
                for face in s.iter().copied().combinations(size) {
                    sets[size - 1].insert(face);
                }
            }
        }
        let by_dim: Vec<Vec<Simplex>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        Ok(Self::from_sorted(vertex_count, by_dim))
    }

    fn from_sorted(vertex_count: usize, by_dim: Vec<Vec<Simplex>>) -> Self {
        let mut lookup = HashMap::new();
        for level in &by_dim {
            for (i, s) in level.iter().enumerate() {
                lookup.insert(s.clone(), i);
            }
        }
        let mut cofacets: Vec<Vec<Vec<usize>>> = by_dim.iter().map(|l| vec![Vec::new(); l.len()]).collect();
        for d in 1..by_dim.len() {
            for (j, s) in by_dim[d].iter().enumerate() {
                for skip in 0..s.len() {
                    let mut f = s.clone();
                    f.remove(skip);
                    cofacets[d - 1][lookup[&f]].push(j);
                }
            }
        }
        Self { vertex_count, by_dim, lookup, cofacets }
    }

    pub fn empty(vertex_count: usize) -> Self {
        Self::from_sorted(vertex_count, Vec::new())
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Dimension, `-1` when empty.
    pub fn dim(&self) -> i32 {
        self.by_dim.len() as i32 - 1
    }

    pub fn is_empty(&self) -> bool {
        self.by_dim.is_empty()
    }

    pub fn simplices(&self, d: usize) -> &[Simplex] {
        self.by_dim.get(d).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn count(&self, d: usize) -> usize {
        self.simplices(d).len()
    }

    pub fn simplex(&self, d: usize, i: usize) -> &Simplex {
        &self.by_dim[d][i]
    }

    pub fn index(&self, s: &[usize]) -> Option<usize> {
        self.lookup.get(s).copied()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        s.is_empty() || self.lookup.contains_key(s)
    }

    pub fn total_count(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    /// Indices of the `(d+1)`-simplices having simplex `(d, i)` as a facet.
    pub fn cofacets(&self, d: usize, i: usize) -> &[usize] {
        self.cofacets.get(d).map(|c| c[i].as_slice()).unwrap_or(&[])
    }

    /// Indices of the `(d-1)`-faces of simplex `(d, i)`.
    pub fn facets(&self, d: usize, i: usize) -> Vec<usize> {
        if d == 0 {
            return Vec::new();
        }
        let s = &self.by_dim[d][i];
        (0..s.len())
            .map(|skip| {
                let mut f = s.clone();
                f.remove(skip);
                self.lookup[&f]
            })
            .collect()
    }

    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        let mut out = Vec::new();
        for (d, level) in self.by_dim.iter().enumerate() {
            for (i, s) in level.iter().enumerate() {
                if self.cofacets(d, i).is_empty() {
                    out.push(s.clone());
                }
            }
        }
        out
    }

    /// Simplices of top dimension containing `s`.
    pub fn top_simplices_containing(&self, s: &[usize]) -> Vec<usize> {
        let Some(mut d) = s.len().checked_sub(1) else { return Vec::new() };
        let Some(i) = self.index(s) else { return Vec::new() };
        let top = self.dim().max(0) as usize;
        let mut frontier = vec![i];
        while d < top {
            let next: BTreeSet<usize> = frontier.iter().flat_map(|&j| self.cofacets(d, j).iter().copied()).collect();
            frontier = next.into_iter().collect();
            d += 1;
        }
        frontier
    }

    pub fn boundary_matrix(&self, d: usize) -> BitMatrix {
        let rows = if d == 0 { 0 } else { self.count(d - 1) };
        let mut m = BitMatrix::zeros(rows, self.count(d));
        if d > 0 {
            for j in 0..self.count(d) {
                for f in self.facets(d, j) {
                    m.set(f, j, true);
                }
            }
        }
        m
    }

    pub fn chain_complex(&self) -> ChainComplex {
        let member: Vec<Vec<bool>> = self.by_dim.iter().map(|l| vec![true; l.len()]).collect();
        self.sub_chain_complex(&member).0
    }

    /// Chain complex of a face-closed set of simplices, in degrees
    /// `0..=dim K`, with the chosen simplex indices per dimension.
    pub fn sub_chain_complex(&self, member: &[Vec<bool>]) -> (ChainComplex, Vec<Vec<usize>>) {
        let top = self.by_dim.len();
        if top == 0 {
            return (ChainComplex::zero(), Vec::new());
        }
        let chosen: Vec<Vec<usize>> =
            (0..top).map(|d| (0..self.count(d)).filter(|&i| member[d][i]).collect()).collect();
        let pos: Vec<HashMap<usize, usize>> =
            chosen.iter().map(|c| c.iter().enumerate().map(|(p, &i)| (i, p)).collect()).collect();
        let mut labels = Vec::new();
        let mut boundary = Vec::new();
        for d in 0..top {
            labels.push(chosen[d].iter().map(|&i| label(&self.by_dim[d][i])).collect());
            let rows = if d == 0 { 0 } else { chosen[d - 1].len() };
            let mut m = BitMatrix::zeros(rows, chosen[d].len());
            if d > 0 {
                for (c, &i) in chosen[d].iter().enumerate() {
                    for f in self.facets(d, i) {
                        m.set(pos[d - 1][&f], c, true);
                    }
                }
            }
            boundary.push(m);
        }
        (ChainComplex::new_unchecked(0, labels, boundary).expect("shapes"), chosen)
    }

    /// Complex generated by `ρ ∖ s` over the maximal simplices `ρ ⊇ s` of the
    /// given family.
    pub fn link_within(&self, s: &[usize], tops: &[Simplex]) -> SimplicialComplex {
        let faces: Vec<Simplex> = tops
            .iter()
            .filter(|t| s.iter().all(|v| t.binary_search(v).is_ok()))
            .map(|t| t.iter().copied().filter(|v| s.binary_search(v).is_err()).collect())
            .collect();
        SimplicialComplex::from_maximal(self.vertex_count, &faces).expect("faces of valid simplices")
    }

    pub fn homology_dims(&self) -> Vec<usize> {
        let h = self.chain_complex().homology_dims();
        (0..=self.dim().max(0)).map(|k| h.get(&k).copied().unwrap_or(0)).collect()
    }
}

/// True iff the complex has the Z₂ homology of the `d`-sphere (`d = -1`
/// means empty).
pub fn is_homology_sphere(c: &SimplicialComplex, d: i32) -> bool {
    if d < 0 {
        return c.is_empty();
    }
    if c.dim() != d {
        return false;
    }
    let h = c.chain_complex().homology_dims();
    (0..=d).all(|k| {
        let expected = if d == 0 && k == 0 {
            2
        } else if k == 0 || k == d {
            1
        } else {
            0
        };
        h.get(&k).copied().unwrap_or(0) == expected
    })
}

// ====================================================================
// Good compactification data
// ====================================================================

#[derive(Clone, Debug)]
pub struct GoodCompData {
    pub name: String,
    pub complex: SimplicialComplex,
    pub divisor_names: Vec<String>,
    divisor_maximal: Vec<Vec<Simplex>>,
    masks: Vec<Vec<StratumMask>>,
}

impl PartialEq for GoodCompData {
    fn eq(&self, other: &Self) -> bool {
        self.complex == other.complex && self.divisor_names == other.divisor_names && self.masks == other.masks
    }
}

impl GoodCompData {
    pub fn new(
        name: impl Into<String>,
        complex: SimplicialComplex,
        divisors: Vec<(String, Vec<Simplex>)>,
    ) -> Result<Self, SimpError> {
        if divisors.len() > MAX_DIVISORS {
            return Err(SimpError::TooManyDivisors(divisors.len()));
        }
        let mut used = vec![false; complex.vertex_count()];
        for s in complex.simplices(0) {
            used[s[0]] = true;
        }
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(SimpError::UnusedVertex(v));
        }
        let mut masks: Vec<Vec<StratumMask>> = (0..=complex.dim().max(-1))
            .map(|d| vec![0; complex.count(d as usize)])
            .collect();
        let mut names = Vec::new();
        let mut maximal = Vec::new();
        for (bit, (name, simplices)) in divisors.into_iter().enumerate() {
            if names.contains(&name) {
                return Err(SimpError::DuplicateName(name));
            }
            let mut norm = Vec::new();
            for s in simplices {
                let s = normalize(s)?;
                if !complex.contains(&s) {
                    return Err(SimpError::UnknownSimplex { divisor: name, simplex: s });
                }
                for size in 1..=s.len() {
                    for face in s.iter().copied().combinations(size) {
                        let i = complex.index(&face).expect("face of a simplex");
                        masks[size - 1][i] |= 1 << bit;
                    }
                }
                norm.push(s);
            }
            names.push(name);
            maximal.push(norm);
        }
        Ok(Self { name: name.into(), complex, divisor_names: names, divisor_maximal: maximal, masks })
    }

    /// Dimension `n` of the ambient complex.
    pub fn n(&self) -> usize {
        self.complex.dim().max(0) as usize
    }

    pub fn divisor_count(&self) -> usize {
        self.divisor_names.len()
    }

    pub fn divisor_maximal(&self, i: usize) -> &[Simplex] {
        &self.divisor_maximal[i]
    }

    /// `J(σ)` for simplex `(d, i)`.
    pub fn mask(&self, d: usize, i: usize) -> StratumMask {
        self.masks[d][i]
    }

    pub fn mask_of(&self, s: &[usize]) -> StratumMask {
        let i = self.complex.index(s).expect("simplex of the complex");
        self.masks[s.len() - 1][i]
    }

    pub fn in_divisor(&self, d: usize, i: usize) -> bool {
        self.masks[d][i] != 0
    }

    pub fn stratum_names(&self, mask: StratumMask) -> Vec<&str> {
        (0..self.divisor_count()).filter(|b| mask >> b & 1 == 1).map(|b| self.divisor_names[b].as_str()).collect()
    }

    /// Membership of `K_J`.
    pub fn stratum_member(&self, mask: StratumMask) -> Vec<Vec<bool>> {
        self.masks.iter().map(|l| l.iter().map(|&m| m & mask == mask).collect()).collect()
    }

    /// Every `J` (including the empty set) with `K_J` nonempty, ordered by
    /// `(|J|, J)`.
    pub fn strata(&self) -> Vec<StratumMask> {
        let mut set = BTreeSet::new();
        for level in &self.masks {
            for &m in level {
                let bits: Vec<usize> = (0..64).filter(|b| m >> b & 1 == 1).collect();
                for size in 0..=bits.len() {
                    for sub in bits.iter().combinations(size) {
                        set.insert(sub.into_iter().fold(0u64, |acc, &b| acc | 1 << b));
                    }
                }
            }
        }
        if self.complex.is_empty() {
            set.clear();
        }
        let mut v: Vec<StratumMask> = set.into_iter().collect();
        v.sort_by_key(|&m| (m.count_ones(), m));
        v
    }

    pub fn stratum_chain_complex(&self, mask: StratumMask) -> (ChainComplex, Vec<Vec<usize>>) {
        self.complex.sub_chain_complex(&self.stratum_member(mask))
    }

    /// Simplicial chains of `K` modulo chains of `|D|`.
    pub fn relative_chain_complex(&self) -> ChainComplex {
        let member: Vec<Vec<bool>> = self.masks.iter().map(|l| l.iter().map(|&m| m == 0).collect()).collect();
        // Simplices off D are closed under cofaces; quotient boundary drops D faces.
        let top = self.complex.by_dim.len();
        let chosen: Vec<Vec<usize>> =
            (0..top).map(|d| (0..self.complex.count(d)).filter(|&i| member[d][i]).collect()).collect();
        let pos: Vec<HashMap<usize, usize>> =
            chosen.iter().map(|c| c.iter().enumerate().map(|(p, &i)| (i, p)).collect()).collect();
        let mut labels = Vec::new();
        let mut boundary = Vec::new();
        for d in 0..top {
            labels.push(chosen[d].iter().map(|&i| label(self.complex.simplex(d, i))).collect());
            let rows = if d == 0 { 0 } else { chosen[d - 1].len() };
            let mut m = BitMatrix::zeros(rows, chosen[d].len());
            if d > 0 {
                for (c, &i) in chosen[d].iter().enumerate() {
                    for f in self.complex.facets(d, i) {
                        if let Some(&p) = pos[d - 1].get(&f) {
                            m.set(p, c, true);
                        }
                    }
                }
            }
            boundary.push(m);
        }
        if top == 0 {
            return ChainComplex::zero();
        }
        ChainComplex::new(0, labels, boundary).expect("relative complex")
    }

    /// Chains of the full subcomplex of the barycentric subdivision spanned
    /// by barycenters of simplices off `|D|`; a deformation retract of the
    /// complement.
    pub fn complement_retract_complex(&self) -> ChainComplex {
        let sd = barycentric_subdivide(self);
        let member: Vec<Vec<bool>> = (0..sd.data.complex.by_dim.len())
            .map(|d| {
                sd.data
                    .complex
                    .simplices(d)
                    .iter()
                    .map(|s| {
                        s.iter().all(|&v| {
                            let (od, oi) = sd.barycenter_of[v];
                            self.masks[od][oi] == 0
                        })
                    })
                    .collect()
            })
            .collect();
        sd.data.complex.sub_chain_complex(&member).0
    }

    /// Components of `|st(σ)| ∖ ∪_{i ∈ cut} |D_i|` as sorted lists of top simplex
    /// indices.
    pub fn star_components(&self, s: &[usize], cut: StratumMask) -> Vec<Vec<usize>> {
        let tops = self.complex.top_simplices_containing(s);
        let n = self.n();
        let mut parent: Vec<usize> = (0..tops.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for a in 0..tops.len() {
            for b in a + 1..tops.len() {
                let common = intersect(self.complex.simplex(n, tops[a]), self.complex.simplex(n, tops[b]));
                if self.mask_of(&common) & cut == 0 {
                    let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                    parent[ra] = rb;
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for a in 0..tops.len() {
            let r = find(&mut parent, a);
            groups.entry(r).or_default().push(tops[a]);
        }
        let mut out: Vec<Vec<usize>> = groups.into_values().collect();
        out.sort();
        out
    }

    pub fn all_divisors_mask(&self) -> StratumMask {
        if self.divisor_count() == 64 {
            u64::MAX
        } else {
            (1u64 << self.divisor_count()) - 1
        }
    }
}

// ====================================================================
// Validation
// ====================================================================

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub kind: String,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.issues.is_empty()
    }

    fn push(&mut self, kind: &str, detail: String) {
        self.issues.push(Issue { kind: kind.into(), detail });
    }
}

pub fn validate(g: &GoodCompData) -> ValidationReport {
    let mut rep = ValidationReport::default();
    let k = &g.complex;
    if k.is_empty() {
        rep.push("pure", "complex is empty".into());
        return rep;
    }
    let n = g.n();
    for (b, name) in g.divisor_names.iter().enumerate() {
        let verts: BTreeSet<usize> =
            k.simplices(0).iter().enumerate().filter(|(i, _)| g.mask(0, *i) >> b & 1 == 1).map(|(_, s)| s[0]).collect();
        for d in 1..=n {
            for (i, s) in k.simplices(d).iter().enumerate() {
                if g.mask(d, i) >> b & 1 == 0 && s.iter().all(|v| verts.contains(v)) {
                    rep.push("full", format!("divisor `{name}` is not a full subcomplex: misses {s:?}"));
                }
            }
        }
    }
    for mask in g.strata() {
        let names = g.stratum_names(mask).join(",");
        let target = n as i32 - mask.count_ones() as i32;
        let member = g.stratum_member(mask);
        let mut tops = Vec::new();
        let mut pure = true;
        for d in 0..=n {
            for (i, s) in k.simplices(d).iter().enumerate() {
                if !member[d][i] {
                    continue;
                }
                let maximal = k.cofacets(d, i).iter().all(|&c| !member[d + 1][c]);
                if maximal {
                    if d as i32 != target {
                        pure = false;
                        rep.push("pure", format!("stratum {{{names}}} has maximal simplex {s:?} of dimension {d}, expected {target}"));
                    } else {
                        tops.push(s.clone());
                    }
                }
            }
        }
        if !pure {
            continue;
        }
        for d in 0..=target.max(0) as usize {
            for (i, s) in k.simplices(d).iter().enumerate() {
                if !member[d][i] {
                    continue;
                }
                let link = k.link_within(s, &tops);
                if !is_homology_sphere(&link, target - d as i32 - 1) {
                    rep.push("link", format!("stratum {{{names}}}: link of {s:?} is not a Z2 homology {}-sphere", target - d as i32 - 1));
                }
            }
        }
    }
    rep
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NcFailure {
    pub simplex: Simplex,
    pub expected: usize,
    pub found: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NcReport {
    pub failures: Vec<NcFailure>,
}

impl NcReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that `|st(σ)| ∖ |D|` has `2^{|J(σ)|}` components for every `σ`.
pub fn nc_check(g: &GoodCompData) -> NcReport {
    let mut rep = NcReport::default();
    let all = g.all_divisors_mask();
    for d in 0..=g.n() {
        for (i, s) in g.complex.simplices(d).iter().enumerate() {
            let expected = 1usize << g.mask(d, i).count_ones();
            let found = g.star_components(s, all).len();
            if found != expected {
                rep.failures.push(NcFailure { simplex: s.clone(), expected, found });
            }
        }
    }
    rep
}

/// Validates, then runs the star count, subdividing up to `max_subdivisions`
/// times while it fails.
pub fn prepare(g: &GoodCompData, max_subdivisions: usize) -> Result<GoodCompData, SimpError> {
    let rep = validate(g);
    if !rep.is_valid() {
        return Err(SimpError::Invalid(rep.issues.iter().map(|i| i.detail.as_str()).join("; ")));
    }
    let mut current = g.clone();
    for round in 0..=max_subdivisions {
        let nc = nc_check(&current);
        if nc.passed() {
            return Ok(current);
        }
        if round == max_subdivisions {
            let f = &nc.failures[0];
            return Err(SimpError::Invalid(format!(
                "star of {:?} has {} components, expected {} ({} failures after {} subdivisions)",
                f.simplex,
                f.found,
                f.expected,
                nc.failures.len(),
                max_subdivisions
            )));
        }
        current = barycentric_subdivide(&current).data;
    }
    unreachable!()
}

// ====================================================================
// Barycentric subdivision
// ====================================================================

#[derive(Clone, Debug)]
pub struct Subdivision {
    pub data: GoodCompData,
    /// Vertex `v` of the subdivision is the barycenter of simplex
    /// `barycenter_of[v] = (dim, index)` of the original.
    pub barycenter_of: Vec<(usize, usize)>,
}

impl Subdivision {
    pub fn vertex_of(&self, d: usize, i: usize) -> usize {
        self.barycenter_of.iter().position(|&x| x == (d, i)).expect("simplex of the original")
    }
}

fn flags(top: &Simplex, id: &HashMap<Simplex, usize>) -> Vec<Simplex> {
    top.iter()
        .copied()
        .permutations(top.len())
        .map(|perm| {
            let mut flag: Vec<usize> = (1..=perm.len())
                .map(|len| {
                    let mut f = perm[..len].to_vec();
                    f.sort_unstable();
                    id[&f]
                })
                .collect();
            flag.sort_unstable();
            flag
        })
        .collect()
}

pub fn barycentric_subdivide(g: &GoodCompData) -> Subdivision {
    let k = &g.complex;
    let mut barycenter_of = Vec::new();
    let mut id = HashMap::new();
    for d in 0..k.by_dim.len() {
        for (i, s) in k.simplices(d).iter().enumerate() {
            id.insert(s.clone(), barycenter_of.len());
            barycenter_of.push((d, i));
        }
    }
    let maximal: Vec<Simplex> = k.maximal_simplices().iter().flat_map(|t| flags(t, &id)).collect();
    let complex = SimplicialComplex::from_maximal(barycenter_of.len(), &maximal).expect("flags are simplices");
    let divisors = g
        .divisor_names
        .iter()
        .enumerate()
        .map(|(b, name)| (name.clone(), g.divisor_maximal[b].iter().flat_map(|t| flags(t, &id)).collect()))
        .collect();
    let data = GoodCompData::new(format!("sd({})", g.name), complex, divisors).expect("subdivision of valid data");
    Subdivision { data, barycenter_of }
}

/// Chain map `C_*(K) → C_*(sd K)` sending a simplex to the sum of its flags.
pub fn subdivision_chain_map(g: &GoodCompData, sd: &Subdivision) -> ChainMap {
    let src = Arc::new(g.complex.chain_complex());
    let tgt = Arc::new(sd.data.complex.chain_complex());
    let mut id = HashMap::new();
    for (v, &(d, i)) in sd.barycenter_of.iter().enumerate() {
        id.insert(g.complex.simplex(d, i).clone(), v);
    }
    let mut mats = BTreeMap::new();
    for d in 0..=g.complex.dim().max(0) as usize {
        let mut m = BitMatrix::zeros(sd.data.complex.count(d), g.complex.count(d));
        for (j, s) in g.complex.simplices(d).iter().enumerate() {
            for f in flags(s, &id) {
                m.flip(sd.data.complex.index(&f).expect("flag"), j);
            }
        }
        mats.insert(d as i32, m);
    }
    ChainMap::new(src, tgt, mats).expect("shapes")
}

// ====================================================================
// Dual cells
// ====================================================================

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DualCell {
    pub stratum: StratumMask,
    pub dim: usize,
    pub simplex: usize,
}

#[derive(Clone, Debug)]
pub struct DualCellComplex {
    /// Basis of each degree `0..=n`.
    pub cells: Vec<Vec<DualCell>>,
    pub filtered: FilteredComplex,
    position: HashMap<DualCell, usize>,
}

impl DualCellComplex {
    pub fn degree_of(n: usize, cell: &DualCell) -> usize {
        n - cell.stratum.count_ones() as usize - cell.dim
    }

    pub fn position(&self, cell: &DualCell) -> Option<usize> {
        self.position.get(cell).copied()
    }

    pub fn complex(&self) -> &Arc<ChainComplex> {
        &self.filtered.complex
    }
}

/// Cells `σ*_J` for `σ ∈ K_J`, in degree `n - |J| - dim σ`, with `∂″` the
/// cofacets inside `K_J` and `∂′` the passage to `K_{J ∪ i}`; filtered by
/// `F̂_{-p} = ⊕_{|J| ≥ p}`.
pub fn dual_cell_complex(g: &GoodCompData) -> DualCellComplex {
    let n = g.n();
    let k = &g.complex;
    let mut cells: Vec<Vec<DualCell>> = vec![Vec::new(); n + 1];
    for mask in g.strata() {
        let member = g.stratum_member(mask);
        for d in 0..=n {
            for i in 0..k.count(d) {
                if member[d][i] {
                    let cell = DualCell { stratum: mask, dim: d, simplex: i };
                    cells[DualCellComplex::degree_of(n, &cell)].push(cell);
                }
            }
        }
    }
    for c in &mut cells {
        c.sort();
    }
    let mut position = HashMap::new();
    for level in &cells {
        for (p, c) in level.iter().enumerate() {
            position.insert(*c, p);
        }
    }
    let mut labels = Vec::new();
    let mut boundary = Vec::new();
    for deg in 0..=n {
        labels.push(
            cells[deg]
                .iter()
                .map(|c| format!("{{{}}}|{}", g.stratum_names(c.stratum).join(","), label(k.simplex(c.dim, c.simplex))))
                .collect(),
        );
        let rows = if deg == 0 { 0 } else { cells[deg - 1].len() };
        let mut m = BitMatrix::zeros(rows, cells[deg].len());
        if deg > 0 {
            for (col, c) in cells[deg].iter().enumerate() {
                for &cf in k.cofacets(c.dim, c.simplex) {
                    if g.mask(c.dim + 1, cf) & c.stratum == c.stratum {
                        let t = DualCell { stratum: c.stratum, dim: c.dim + 1, simplex: cf };
                        m.flip(position[&t], col);
                    }
                }
                let own = g.mask(c.dim, c.simplex);
                for b in 0..g.divisor_count() {
                    let bit = 1u64 << b;
                    if c.stratum & bit == 0 && own & bit != 0 {
                        let t = DualCell { stratum: c.stratum | bit, dim: c.dim, simplex: c.simplex };
                        m.flip(position[&t], col);
                    }
                }
            }
        }
        boundary.push(m);
    }
    let complex = Arc::new(ChainComplex::new(0, labels, boundary).expect("dual cell boundary squares to zero"));
    let index: BTreeMap<i32, Vec<i32>> = cells
        .iter()
        .enumerate()
        .map(|(deg, cs)| (deg as i32, cs.iter().map(|c| -(c.stratum.count_ones() as i32)).collect()))
        .collect();
    let filtered = FilteredComplex::from_basis_indices(complex, &index).expect("same complex");
    DualCellComplex { cells, filtered, position }
}

// ====================================================================
// Divisor complexity
// ====================================================================

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorComponent {
    pub divisor: String,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Complexity {
    pub complexity: usize,
    pub components: Vec<DivisorComponent>,
    /// Color class of each component.
    pub coloring: Vec<usize>,
}

/// Connected components of each divisor, as vertex sets.
pub fn divisor_components(g: &GoodCompData) -> Vec<DivisorComponent> {
    let mut out = Vec::new();
    for (b, name) in g.divisor_names.iter().enumerate() {
        let bit = 1u64 << b;
        let verts: Vec<usize> = (0..g.complex.count(0)).filter(|&i| g.mask(0, i) & bit != 0).collect();
        let mut comp: HashMap<usize, usize> = verts.iter().map(|&v| (v, v)).collect();
        fn root(c: &mut HashMap<usize, usize>, mut x: usize) -> usize {
            while c[&x] != x {
                x = c[&x];
            }
            x
        }
        for (i, e) in g.complex.simplices(1).iter().enumerate() {
            if g.mask(1, i) & bit != 0 {
                let (a, b) = (root(&mut comp, e[0]), root(&mut comp, e[1]));
                comp.insert(a, b);
            }
        }
        let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &v in &verts {
            let r = root(&mut comp, v);
            groups.entry(r).or_default().push(g.complex.simplex(0, v)[0]);
        }
        let mut gs: Vec<Vec<usize>> = groups.into_values().collect();
        gs.sort();
        out.extend(gs.into_iter().map(|vertices| DivisorComponent { divisor: name.clone(), vertices }));
    }
    out
}

/// Chromatic number of the component intersection graph, with a witness.
pub fn divisor_complexity(g: &GoodCompData) -> Result<Complexity, SimpError> {
    let components = divisor_components(g);
    let m = components.len();
    if m > MAX_COMPLEXITY_COMPONENTS {
        return Err(SimpError::TooManyComponents(m));
    }
    let adjacent = |a: usize, b: usize| {
        components[a].vertices.iter().any(|v| components[b].vertices.binary_search(v).is_ok())
    };
    let edges: Vec<Vec<bool>> = (0..m).map(|a| (0..m).map(|b| a != b && adjacent(a, b)).collect()).collect();
    fn color(i: usize, k: usize, edges: &[Vec<bool>], c: &mut Vec<usize>) -> bool {
        if i == edges.len() {
            return true;
        }
        for col in 0..k {
            if (0..i).all(|j| !edges[i][j] || c[j] != col) {
                c[i] = col;
                if color(i + 1, k, edges, c) {
                    return true;
                }
            }
        }
        false
    }
    for k in 0..=m {
        let mut c = vec![0; m];
        if color(0, k, &edges, &mut c) {
            return Ok(Complexity { complexity: k, components, coloring: c });
        }
    }
    unreachable!("m colors always suffice")
}

// ====================================================================
// Products
// ====================================================================

/// Staircase triangulation of `a × b` for ordered simplices.
fn staircase(a: &[usize], b: &[usize], b_count: usize) -> Vec<Simplex> {
    let (p, q) = (a.len() - 1, b.len() - 1);
    (0..p + q)
        .combinations(p)
        .map(|a_steps| {
            let (mut i, mut j) = (0, 0);
            let mut s = vec![a[0] * b_count + b[0]];
            for step in 0..p + q {
                if a_steps.contains(&step) {
                    i += 1;
                } else {
                    j += 1;
                }
                s.push(a[i] * b_count + b[j]);
            }
            s
        })
        .collect()
}

fn product_maximal(a: &[Simplex], b: &[Simplex], b_count: usize) -> Vec<Simplex> {
    a.iter().cartesian_product(b.iter()).flat_map(|(x, y)| staircase(x, y, b_count)).collect()
}

/// `|A| × |B|` with divisors `A_i × B` and `A × B_j`; vertex `(a, b)` is
/// numbered `a·|B| + b`.
pub fn product_fixture(a: &GoodCompData, b: &GoodCompData) -> Result<GoodCompData, SimpError> {
    let bc = b.complex.vertex_count();
    let a_max = a.complex.maximal_simplices();
    let b_max = b.complex.maximal_simplices();
    let complex = SimplicialComplex::from_maximal(a.complex.vertex_count() * bc, &product_maximal(&a_max, &b_max, bc))?;
    let mut divisors = Vec::new();
    for (i, name) in a.divisor_names.iter().enumerate() {
        divisors.push((name.clone(), product_maximal(&a.divisor_maximal[i], &b_max, bc)));
    }
    for (j, name) in b.divisor_names.iter().enumerate() {
        if a.divisor_names.contains(name) {
            return Err(SimpError::Product(format!("divisor name `{name}` appears in both factors")));
        }
        divisors.push((name.clone(), product_maximal(&a_max, &b.divisor_maximal[j], bc)));
    }
    let g = GoodCompData::new(format!("{}x{}", a.name, b.name), complex, divisors)?;
    let rep = validate(&g);
    if !rep.is_valid() {
        return Err(SimpError::Invalid(rep.issues.iter().map(|i| i.detail.as_str()).join("; ")));
    }
    Ok(g)
}

// ====================================================================
// Simplicial maps
// ====================================================================

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialMap {
    pub vertex_map: Vec<usize>,
}

impl SimplicialMap {
    pub fn identity(n: usize) -> Self {
        Self { vertex_map: (0..n).collect() }
    }

    pub fn image(&self, s: &[usize]) -> Simplex {
        let mut v: Vec<usize> = s.iter().map(|&x| self.vertex_map[x]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn check(&self, source: &SimplicialComplex, target: &SimplicialComplex) -> Result<(), SimpError> {
        if self.vertex_map.len() != source.vertex_count() {
            return Err(SimpError::Map(format!(
                "vertex map has {} entries for {} vertices",
                self.vertex_map.len(),
                source.vertex_count()
            )));
        }
        if let Some(&v) = self.vertex_map.iter().find(|&&v| v >= target.vertex_count()) {
            return Err(SimpError::Map(format!("image vertex {v} out of range")));
        }
        for s in source.maximal_simplices() {
            let im = self.image(&s);
            if !target.contains(&im) {
                return Err(SimpError::Map(format!("image of {s:?} is {im:?}, not a simplex of the target")));
            }
        }
        Ok(())
    }

    /// `f ∘ self`.
    pub fn then(&self, f: &SimplicialMap) -> SimplicialMap {
        SimplicialMap { vertex_map: self.vertex_map.iter().map(|&v| f.vertex_map[v]).collect() }
    }

    /// Induced map on simplicial chains; dimension-dropping simplices go to 0.
    pub fn chain_map(&self, source: &SimplicialComplex, target: &SimplicialComplex) -> ChainMap {
        let src = Arc::new(source.chain_complex());
        let tgt = Arc::new(target.chain_complex());
        let mut mats = BTreeMap::new();
        for d in 0..=source.dim().max(0) as usize {
            let mut m = BitMatrix::zeros(target.count(d), source.count(d));
            for (j, s) in source.simplices(d).iter().enumerate() {
                let im = self.image(s);
                if im.len() == s.len() {
                    m.set(target.index(&im).expect("checked map"), j, true);
                }
            }
            mats.insert(d as i32, m);
        }
        ChainMap::new(src, tgt, mats).expect("shapes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_square_has_two_triangles() {
        let t = staircase(&[0, 1], &[0, 1], 2);
        assert_eq!(t, vec![vec![0, 2, 3], vec![0, 1, 3]]);
    }
}
