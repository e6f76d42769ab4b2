//! The complex cut along its divisor: cells are pairs of a simplex and a
//! local component of the star complement. Carries the corner filtration by
//! orbit sums and the structure maps around it.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{ChainComplex, ChainError, ChainMap};
use crate::filt::{self, FiltError, FilteredComplex, Origin};
use crate::gf2::{BitMatrix, BitVector, QuotientBasis, Subspace};
use crate::simp::{self, DualCell, GoodCompData, SimpError, SimplicialMap, StratumMask, Subdivision};
use crate::torus::{AlgebraElement, TorusAlgebra};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CornerError {
    #[error(transparent)]
    Simp(#[from] SimpError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Filt(#[from] FiltError),
    #[error("star of {simplex:?} has {found} components, expected {expected}")]
    NormalCrossing { simplex: Vec<usize>, expected: usize, found: usize },
    #[error("index set is not contained in J of the simplex")]
    NotSubset,
    #[error("map rejected: {0}")]
    MapRejected(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutCell {
    pub dim: usize,
    pub simplex: usize,
    /// Top simplices of the star making up this local component.
    pub component: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct CutComplex {
    pub data: GoodCompData,
    pub cells: Vec<Vec<CutCell>>,
    /// Cell indices over each simplex.
    fibers: Vec<Vec<Vec<usize>>>,
    pub complex: Arc<ChainComplex>,
}

impl CutComplex {
    pub fn n(&self) -> usize {
        self.data.n()
    }

    pub fn fiber(&self, d: usize, i: usize) -> &[usize] {
        &self.fibers[d][i]
    }

    /// Fiber cell over `(d, i)` whose component contains top simplex `top`.
    pub fn cell_containing(&self, d: usize, i: usize, top: usize) -> Option<usize> {
        self.fibers[d][i].iter().copied().find(|&c| self.cells[d][c].component.binary_search(&top).is_ok())
    }

    /// `J(σ)` of the simplex under a cell.
    pub fn cell_mask(&self, d: usize, c: usize) -> StratumMask {
        self.data.mask(d, self.cells[d][c].simplex)
    }
}

pub fn build_cut_complex(g: &GoodCompData) -> Result<CutComplex, CornerError> {
    let nc = simp::nc_check(g);
    if let Some(f) = nc.failures.first() {
        return Err(CornerError::NormalCrossing { simplex: f.simplex.clone(), expected: f.expected, found: f.found });
    }
    let n = g.n();
    let all = g.all_divisors_mask();
    let k = &g.complex;
    let mut cells: Vec<Vec<CutCell>> = vec![Vec::new(); n + 1];
    let mut fibers: Vec<Vec<Vec<usize>>> = (0..=n).map(|d| vec![Vec::new(); k.count(d)]).collect();
    for d in 0..=n {
        for (i, s) in k.simplices(d).iter().enumerate() {
            for component in g.star_components(s, all) {
                fibers[d][i].push(cells[d].len());
                cells[d].push(CutCell { dim: d, simplex: i, component });
            }
        }
    }
    let mut labels = Vec::new();
    let mut boundary = Vec::new();
    for d in 0..=n {
        labels.push(
            cells[d]
                .iter()
                .map(|c| format!("{}/{}", k.simplex(d, c.simplex).iter().join("."), c.component.iter().join(",")))
                .collect(),
        );
        let rows = if d == 0 { 0 } else { cells[d - 1].len() };
        let mut m = BitMatrix::zeros(rows, cells[d].len());
        if d > 0 {
            for (col, c) in cells[d].iter().enumerate() {
                let top = c.component[0];
                for f in k.facets(d, c.simplex) {
                    let row = fibers[d - 1][f]
                        .iter()
                        .copied()
                        .find(|&x| cells[d - 1][x].component.binary_search(&top).is_ok())
                        .expect("components of a face star are coarser");
                    m.flip(row, col);
                }
            }
        }
        boundary.push(m);
    }
    let complex = Arc::new(ChainComplex::new(0, labels, boundary)?);
    Ok(CutComplex { data: g.clone(), cells, fibers, complex })
}

/// Partition of the fiber over `(d, i)` into `G(J)`-orbits, detected by the
/// coarser cut that ignores the divisors in `J`.
pub fn orbit_partition(x: &CutComplex, d: usize, i: usize, j: StratumMask) -> Result<Vec<Vec<usize>>, CornerError> {
    let own = x.data.mask(d, i);
    if j & own != j {
        return Err(CornerError::NotSubset);
    }
    let s = x.data.complex.simplex(d, i);
    let coarse = x.data.star_components(s, x.data.all_divisors_mask() & !j);
    let mut out: Vec<Vec<usize>> = coarse
        .iter()
        .map(|comp| {
            x.fiber(d, i).iter().copied().filter(|&c| comp.binary_search(&x.cells[d][c].component[0]).is_ok()).collect()
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Subsets of a mask with the given number of bits.
pub fn submasks_of_size(mask: StratumMask, size: usize) -> Vec<StratumMask> {
    let bits: Vec<usize> = (0..64).filter(|b| mask >> b & 1 == 1).collect();
    bits.into_iter().combinations(size).map(|c| c.into_iter().fold(0, |acc, b| acc | 1 << b)).collect()
}

fn indicator(len: usize, support: &[usize]) -> BitVector {
    BitVector::from_support(len, support.iter().copied())
}

#[derive(Clone, Debug)]
pub struct CornerFiltration {
    pub cut: Arc<CutComplex>,
    pub filtered: FilteredComplex,
}

impl CornerFiltration {
    /// `F^p C_k`.
    pub fn level(&self, k: usize, p: usize) -> &Subspace {
        self.filtered.level(k as i32, -(p as i32))
    }
}

/// `F^p` spanned by `G(J)`-orbit sums over `K_J`, `|J| = p`, stored as
/// `F̂_{-p}`.
pub fn corner_filtration(x: Arc<CutComplex>) -> Result<CornerFiltration, CornerError> {
    let n = x.n() as i32;
    let xc = x.clone();
    let filtered = FilteredComplex::from_fn(x.complex.clone(), -n, 0, |k, idx| {
        let p = (-idx) as usize;
        let d = k as usize;
        let len = xc.cells[d].len();
        let mut vecs = Vec::new();
        for i in 0..xc.data.complex.count(d) {
            let own = xc.data.mask(d, i);
            if (own.count_ones() as usize) < p {
                continue;
            }
            for j in submasks_of_size(own, p) {
                for orbit in orbit_partition(&xc, d, i, j).expect("subset") {
                    vecs.push(indicator(len, &orbit));
                }
            }
        }
        Subspace::span_owned(len, vecs)
    })?
    .with_origin(Origin::Corner { n: n as usize });
    Ok(CornerFiltration { cut: x, filtered })
}

pub fn corner_complex(g: &GoodCompData) -> Result<CornerFiltration, CornerError> {
    corner_filtration(Arc::new(build_cut_complex(g)?))
}

/// Fiber over `(d, i)` identified with `Z₂^{J(σ)}`: bit `t` of a cell is set
/// when the cell sits on the other side of the `t`-th divisor of `J(σ)` from
/// the first cell.
pub fn fiber_coordinates(x: &CutComplex, d: usize, i: usize) -> Vec<usize> {
    let own = x.data.mask(d, i);
    let s = x.data.complex.simplex(d, i);
    let fiber = x.fiber(d, i);
    let base = x.cells[d][fiber[0]].component[0];
    let bits: Vec<usize> = (0..64).filter(|b| own >> b & 1 == 1).collect();
    let halves: Vec<Vec<Vec<usize>>> = bits.iter().map(|&b| x.data.star_components(s, 1 << b)).collect();
    fiber
        .iter()
        .map(|&c| {
            let top = x.cells[d][c].component[0];
            let mut g = 0usize;
            for (t, parts) in halves.iter().enumerate() {
                let same = parts.iter().any(|p| p.binary_search(&base).is_ok() && p.binary_search(&top).is_ok());
                if !same {
                    g |= 1 << t;
                }
            }
            g
        })
        .collect()
}

/// Simplices whose fiber filtration differs from `𝓘^p` under the torsor
/// identification, as `(dim, simplex, p)`.
pub fn local_model_mismatches(cf: &CornerFiltration) -> Vec<(usize, usize, usize)> {
    let x = &cf.cut;
    let mut algebras: HashMap<usize, TorusAlgebra> = HashMap::new();
    let mut out = Vec::new();
    for d in 0..=x.n() {
        for i in 0..x.data.complex.count(d) {
            let rank = x.data.mask(d, i).count_ones() as usize;
            let alg = algebras.entry(rank).or_insert_with(|| TorusAlgebra::new(rank).expect("small rank"));
            let coords = fiber_coordinates(x, d, i);
            let fiber = x.fiber(d, i);
            if coords.iter().copied().sorted().collect::<Vec<_>>() != (0..1usize << rank).collect::<Vec<_>>() {
                out.push((d, i, 0));
                continue;
            }
            for p in 0..=rank + 1 {
                let level = cf.level(d, p);
                // Restrict F^p to the fiber and move to group coordinates.
                let restricted: Vec<BitVector> = level
                    .basis()
                    .iter()
                    .filter(|v| v.ones().all(|c| x.cells[d][c].simplex == i))
                    .filter(|v| !v.is_zero())
                    .map(|v| {
                        AlgebraElement::from_support(
                            rank,
                            v.ones().map(|c| coords[fiber.iter().position(|&f| f == c).expect("fiber")]),
                        )
                        .support()
                        .clone()
                    })
                    .collect();
                if Subspace::span_owned(1 << rank, restricted) != *alg.ideal_power(p) {
                    out.push((d, i, p));
                }
            }
        }
    }
    out
}

// ====================================================================
// Projection to the compactification
// ====================================================================

pub fn pi_pushforward(x: &CutComplex) -> ChainMap {
    let tgt = Arc::new(x.data.complex.chain_complex());
    let mut mats = BTreeMap::new();
    for d in 0..=x.n() {
        let mut m = BitMatrix::zeros(x.data.complex.count(d), x.cells[d].len());
        for (c, cell) in x.cells[d].iter().enumerate() {
            m.set(cell.simplex, c, true);
        }
        mats.insert(d as i32, m);
    }
    ChainMap::new(x.complex.clone(), tgt, mats).expect("shapes")
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactnessReport {
    pub chain_map: bool,
    pub surjective_failures: Vec<usize>,
    pub kernel_failures: Vec<usize>,
}

impl ExactnessReport {
    pub fn passed(&self) -> bool {
        self.chain_map && self.surjective_failures.is_empty() && self.kernel_failures.is_empty()
    }
}

/// `π_*` is a surjective chain map with kernel exactly `F¹`.
pub fn pi_pushforward_exactness(cf: &CornerFiltration) -> ExactnessReport {
    let x = &cf.cut;
    let pi = pi_pushforward(x);
    let mut rep = ExactnessReport { chain_map: pi.check().is_ok(), ..Default::default() };
    for d in 0..=x.n() {
        let rki = crate::gf2::rank_kernel_image(&pi.matrix(d as i32));
        if rki.rank != x.data.complex.count(d) {
            rep.surjective_failures.push(d);
        }
        if rki.kernel != *cf.level(d, 1) {
            rep.kernel_failures.push(d);
        }
    }
    rep
}

// ====================================================================
// Graded pieces and ψ
// ====================================================================

/// `⊕_{|J|=p} C_*(K_J)` with the basis cells `(J, σ)` in each degree.
#[derive(Clone, Debug)]
pub struct StratumSum {
    pub complex: Arc<ChainComplex>,
    pub basis: Vec<Vec<(StratumMask, usize)>>,
}

pub fn stratum_sum(g: &GoodCompData, p: usize) -> StratumSum {
    let n = g.n();
    let strata: Vec<StratumMask> = g.strata().into_iter().filter(|m| m.count_ones() as usize == p).collect();
    let mut basis: Vec<Vec<(StratumMask, usize)>> = vec![Vec::new(); n + 1];
    let mut members = Vec::new();
    for &j in &strata {
        let member = g.stratum_member(j);
        for d in 0..=n {
            for i in 0..g.complex.count(d) {
                if member[d][i] {
                    basis[d].push((j, i));
                }
            }
        }
        members.push(member);
    }
    let pos: Vec<HashMap<(StratumMask, usize), usize>> =
        basis.iter().map(|b| b.iter().enumerate().map(|(p, &x)| (x, p)).collect()).collect();
    let mut labels = Vec::new();
    let mut boundary = Vec::new();
    for d in 0..=n {
        labels.push(
            basis[d]
                .iter()
                .map(|&(j, i)| format!("{{{}}}|{}", g.stratum_names(j).join(","), g.complex.simplex(d, i).iter().join(".")))
                .collect(),
        );
        let rows = if d == 0 { 0 } else { basis[d - 1].len() };
        let mut m = BitMatrix::zeros(rows, basis[d].len());
        if d > 0 {
            for (col, &(j, i)) in basis[d].iter().enumerate() {
                for f in g.complex.facets(d, i) {
                    m.flip(pos[d - 1][&(j, f)], col);
                }
            }
        }
        boundary.push(m);
    }
    StratumSum { complex: Arc::new(ChainComplex::new(0, labels, boundary).expect("sum of simplicial complexes")), basis }
}

/// Orbit sum of the `G(J)`-orbit of fiber cell `cell` over `(d, i)`.
pub fn orbit_sum_through(x: &CutComplex, d: usize, i: usize, j: StratumMask, cell: usize) -> BitVector {
    let orbit = orbit_partition(x, d, i, j).expect("J ⊆ J(σ)").into_iter().find(|o| o.contains(&cell)).expect("partition");
    indicator(x.cells[d].len(), &orbit)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiReport {
    pub p: usize,
    pub dims: Vec<(usize, usize, usize)>,
    pub bijective: bool,
    pub chain_map: bool,
    pub section_independent: bool,
}

impl PsiReport {
    pub fn passed(&self) -> bool {
        self.bijective && self.chain_map && self.section_independent
    }
}

/// Matrix of `ψ_p : ⊕_{|J|=p} C_k(K_J) → F^p C_k / F^{p+1} C_k` in degree `k`,
/// using the first fiber cell as section.
pub fn psi_matrix(cf: &CornerFiltration, sum: &StratumSum, p: usize, k: usize) -> (BitMatrix, QuotientBasis) {
    let x = &cf.cut;
    let q = QuotientBasis::of(cf.level(k, p), cf.level(k, p + 1));
    let cols: Vec<BitVector> = sum.basis[k]
        .iter()
        .map(|&(j, i)| {
            let v = orbit_sum_through(x, k, i, j, x.fiber(k, i)[0]);
            q.coordinates(&v).expect("orbit sum lies in F^p")
        })
        .collect();
    (BitMatrix::from_columns(q.dim(), &cols).expect("shape"), q)
}

/// Checks that `ψ_p` is a well-defined chain isomorphism onto `F^p/F^{p+1}`.
pub fn graded_iso_psi(cf: &CornerFiltration, p: usize) -> PsiReport {
    let x = &cf.cut;
    let g = &x.data;
    let sum = stratum_sum(g, p);
    let n = x.n();
    let mut rep = PsiReport { p, bijective: true, chain_map: true, section_independent: true, ..Default::default() };
    let mut mats = Vec::new();
    let mut quots = Vec::new();
    for k in 0..=n {
        let (m, q) = psi_matrix(cf, &sum, p, k);
        rep.dims.push((k, sum.complex.dim(k as i32), q.dim()));
        if m.rows() != m.cols() || m.rank() != m.cols() {
            rep.bijective = false;
        }
        for &(j, i) in &sum.basis[k] {
            let first = orbit_sum_through(x, k, i, j, x.fiber(k, i)[0]);
            for &c in x.fiber(k, i) {
                let other = orbit_sum_through(x, k, i, j, c);
                if !cf.level(k, p + 1).contains(&first.xor(&other)) {
                    rep.section_independent = false;
                }
            }
        }
        mats.push(m);
        quots.push(q);
    }
    // ∂ψ = ψ∂ on the quotient.
    for k in 1..=n {
        let d_cut = x.complex.boundary(k as i32);
        let d_sum = sum.complex.boundary(k as i32);
        for col in 0..sum.basis[k].len() {
            let (j, i) = sum.basis[k][col];
            let lifted = orbit_sum_through(x, k, i, j, x.fiber(k, i)[0]);
            let lhs = quots[k - 1].coordinates(&d_cut.mul_vec(&lifted)).expect("F^p is a subcomplex");
            let rhs = mats[k - 1].mul_vec(&d_sum.column(col));
            if lhs != rhs {
                rep.chain_map = false;
            }
        }
    }
    rep
}

// ====================================================================
// Cellular pullback from dual cells
// ====================================================================

#[derive(Clone, Debug)]
pub struct CellularPullback {
    pub dual: simp::DualCellComplex,
    pub subdivision: Subdivision,
    pub corner: CornerFiltration,
    pub map: ChainMap,
}

/// `φ(σ*_J)` is the sum of all cells of the cut subdivision lying over flags
/// `σ = σ_0 < … < σ_m` with `σ_m` maximal in `K_J`.
pub fn cellular_pullback_phi(g: &GoodCompData) -> Result<CellularPullback, CornerError> {
    let dual = simp::dual_cell_complex(g);
    let subdivision = simp::barycentric_subdivide(g);
    let corner = corner_complex(&subdivision.data)?;
    let x = corner.cut.clone();
    let n = g.n();
    let bary: HashMap<(usize, usize), usize> =
        subdivision.barycenter_of.iter().enumerate().map(|(v, &di)| (di, v)).collect();
    let mut mats = BTreeMap::new();
    for deg in 0..=n {
        let mut m = BitMatrix::zeros(x.cells[deg].len(), dual.cells[deg].len());
        for (col, cell) in dual.cells[deg].iter().enumerate() {
            for flag in maximal_flags(g, cell) {
                let mut verts: Vec<usize> = flag.iter().map(|di| bary[di]).collect();
                verts.sort_unstable();
                let si = subdivision.data.complex.index(&verts).expect("flag is a simplex of the subdivision");
                for &c in x.fiber(deg, si) {
                    m.flip(c, col);
                }
            }
        }
        mats.insert(deg as i32, m);
    }
    let map = ChainMap::checked(dual.complex().clone(), x.complex.clone(), mats)?;
    Ok(CellularPullback { dual, subdivision, corner, map })
}

/// Flags `σ = σ_0 < … < σ_m` in `K_J` with `σ_m` of dimension `n - |J|`.
fn maximal_flags(g: &GoodCompData, cell: &DualCell) -> Vec<Vec<(usize, usize)>> {
    let top = g.n() - cell.stratum.count_ones() as usize;
    let mut out = Vec::new();
    let mut stack = vec![vec![(cell.dim, cell.simplex)]];
    while let Some(flag) = stack.pop() {
        let (d, i) = *flag.last().expect("nonempty");
        if d == top {
            out.push(flag);
            continue;
        }
        for &c in g.complex.cofacets(d, i) {
            if g.mask(d + 1, c) & cell.stratum == cell.stratum {
                let mut next = flag.clone();
                next.push((d + 1, c));
                stack.push(next);
            }
        }
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PullbackReport {
    pub chain_map: bool,
    pub filtered: bool,
    pub graded_failures: Vec<i32>,
}

impl PullbackReport {
    pub fn passed(&self) -> bool {
        self.chain_map && self.filtered && self.graded_failures.is_empty()
    }
}

pub fn pullback_report(phi: &CellularPullback) -> PullbackReport {
    let chain_map = phi.map.check().is_ok();
    match filt::graded_quasi_iso_failures(&phi.map, &phi.dual.filtered, &phi.corner.filtered) {
        Ok(bad) => PullbackReport { chain_map, filtered: true, graded_failures: bad },
        Err(_) => PullbackReport { chain_map, filtered: false, graded_failures: Vec::new() },
    }
}

// ====================================================================
// Functoriality
// ====================================================================

/// `f′(σ, c) = (f(σ), component containing f(c))`; zero when `f` drops the
/// dimension of `σ`.
pub fn induced_map(f: &SimplicialMap, source: &CutComplex, target: &CutComplex) -> Result<ChainMap, CornerError> {
    let (sg, tg) = (&source.data, &target.data);
    f.check(&sg.complex, &tg.complex)?;
    for d in 0..=source.n() {
        for (i, s) in sg.complex.simplices(d).iter().enumerate() {
            let im = f.image(s);
            let (sm, tm) = (sg.mask(d, i) != 0, tg.mask_of(&im) != 0);
            if !sm && tm {
                return Err(CornerError::MapRejected(format!("{s:?} lies off the divisor but its image {im:?} meets it")));
            }
            if sm && !tm {
                return Err(CornerError::MapRejected(format!("{s:?} lies in the divisor but its image {im:?} does not")));
            }
        }
    }
    let top_s = source.n();
    let mut mats = BTreeMap::new();
    for d in 0..=source.n() {
        let rows = target.cells.get(d).map_or(0, Vec::len);
        let mut m = BitMatrix::zeros(rows, source.cells[d].len());
        for (col, cell) in source.cells[d].iter().enumerate() {
            let s = sg.complex.simplex(d, cell.simplex);
            let im = f.image(s);
            if im.len() != s.len() {
                continue;
            }
            let ti = tg.complex.index(&im).expect("checked map");
            let carrier = f.image(sg.complex.simplex(top_s, cell.component[0]));
            let tops = tg.complex.top_simplices_containing(&carrier);
            let Some(&t) = tops.first() else {
                return Err(CornerError::MapRejected(format!("no top simplex of the target contains {carrier:?}")));
            };
            let row = target
                .cell_containing(d, ti, t)
                .ok_or_else(|| CornerError::MapRejected(format!("image component of {s:?} is undefined")))?;
            m.flip(row, col);
        }
        mats.insert(d as i32, m);
    }
    Ok(ChainMap::checked(source.complex.clone(), target.complex.clone(), mats)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn submasks() {
        assert_eq!(submasks_of_size(0b101, 1), vec![0b1, 0b100]);
        assert_eq!(submasks_of_size(0b101, 0), vec![0]);
    }
}
