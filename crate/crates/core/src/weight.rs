//! Weight complexes of good compactifications, their assembly over cubical
//! hyperresolutions, and the checks built on them.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cechgysin::{self, CechError, ClosedManifold};
use crate::chain::{ChainError, ChainMap};
use crate::corner::{self, CornerError, CutComplex};
use crate::filt::{self, FiltError, FilteredComplex, FilteredCube, Origin, SpectralSequence, WeightTable};
use crate::gf2::{rank_kernel_image, BitMatrix, BitVector};
use crate::simp::{self, GoodCompData, SimplicialMap};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WeightError {
    #[error(transparent)]
    Corner(#[from] CornerError),
    #[error(transparent)]
    Filt(#[from] FiltError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Cech(#[from] CechError),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeightSource {
    Smooth { name: String },
    Assembled { nodes: Vec<(u32, String)> },
}

#[derive(Clone, Debug)]
pub struct WeightComplex {
    pub filtered: FilteredComplex,
    pub source: WeightSource,
    /// Dimension bound `n` for the filtration.
    pub n: usize,
    pub cut: Option<Arc<CutComplex>>,
}

impl WeightComplex {
    pub fn table(&self) -> WeightTable {
        filt::homology_filtration(&self.filtered)
    }

    pub fn table_with_pages(&self) -> WeightTable {
        filt::homology_filtration_with_pages(&self.filtered)
    }
}

/// Décalage of the corner filtration of `g`.
pub fn weight_complex(g: &GoodCompData) -> Result<WeightComplex, WeightError> {
    let cf = corner::corner_complex(g)?;
    Ok(WeightComplex {
        filtered: filt::decalage(&cf.filtered),
        source: WeightSource::Smooth { name: g.name.clone() },
        n: g.n(),
        cut: Some(cf.cut),
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    /// Degrees with `𝒲_{-n-1} C_k ≠ 0`.
    pub lower_violations: Vec<i32>,
    /// Degrees where the top of the filtration falls short of `C_k`, with the
    /// first index at which it is reached.
    pub upper_violations: Vec<(i32, i32)>,
    /// `(k, p)` on homology outside the expected window.
    pub homology_violations: Vec<(i32, i32)>,
    /// Nonzero spectral sequence terms outside the support triangle, `r ≥ 1`.
    pub support_violations: Vec<(usize, i32, i32)>,
}

impl BoundsReport {
    pub fn passed(&self) -> bool {
        self.lower_violations.is_empty()
            && self.upper_violations.is_empty()
            && self.homology_violations.is_empty()
            && self.support_violations.is_empty()
    }
}

fn first_full(fc: &FilteredComplex, k: i32) -> i32 {
    let (_, hi) = fc.index_range();
    let mut p = hi + 1;
    while p > i32::MIN / 2 && fc.level(k, p - 1).is_full() {
        p -= 1;
    }
    p
}

/// Bounds of a smooth weight complex: `𝒲_{-n-1} C_k = 0`, `𝒲_{-k+1} C_k =
/// C_k` at chain level, `𝒲_{-k} H_k = H_k` on homology, and the
/// weight spectral sequence lies in its triangle from `E¹` on.
pub fn smooth_bounds(wc: &WeightComplex) -> BoundsReport {
    let fc = &wc.filtered;
    let n = wc.n as i32;
    let mut rep = BoundsReport::default();
    for k in fc.degrees() {
        if !fc.level(k, -n - 1).is_zero() {
            rep.lower_violations.push(k);
        }
        let full = first_full(fc, k);
        if full > -k + 1 {
            rep.upper_violations.push((k, full));
        }
    }
    let table = wc.table();
    for (&k, _) in &table.dims {
        if table.dim(k, -k) != table.homology_dim(k) {
            rep.homology_violations.push((k, -k));
        }
        if table.dim(k, -n - 1) != 0 {
            rep.homology_violations.push((k, -n - 1));
        }
    }
    let ss = filt::spectral_sequence(fc);
    rep.support_violations = filt::support_violations(&ss, Origin::Weight { n: wc.n });
    rep
}

/// Bounds of an assembled weight complex: `0 = 𝒲_{-n-1} ⊆ … ⊆ 𝒲_0 = C_k`,
/// at chain level and on homology.
pub fn singular_bounds(wc: &WeightComplex) -> BoundsReport {
    let fc = &wc.filtered;
    let n = wc.n as i32;
    let mut rep = BoundsReport::default();
    for k in fc.degrees() {
        if !fc.level(k, -n - 1).is_zero() {
            rep.lower_violations.push(k);
        }
        let full = first_full(fc, k);
        if full > 0 {
            rep.upper_violations.push((k, full));
        }
    }
    let table = wc.table();
    for &k in table.dims.keys() {
        if table.dim(k, 0) != table.homology_dim(k) {
            rep.homology_violations.push((k, 0));
        }
        if table.dim(k, -n - 1) != 0 {
            rep.homology_violations.push((k, -n - 1));
        }
    }
    rep
}

/// Décalage page identity `E^r(Dec)_{p,q} = Ê^{r+1}_{2p+q,-p}` for `r ≥ 1`;
/// returns `(r, p, q)` where dims or differential ranks differ.
pub fn decalage_page_mismatches(base: &SpectralSequence, dec: &SpectralSequence) -> Vec<(usize, i32, i32)> {
    let mut out = Vec::new();
    let last = dec.pages.len().max(base.pages.len());
    for r in 1..last {
        let dp = dec.page(r.min(dec.pages.len() - 1));
        let bp = base.page((r + 1).min(base.pages.len() - 1));
        let mut keys: Vec<(i32, i32)> = dp.entries.keys().copied().collect();
        keys.extend(bp.entries.keys().map(|&(bp_, bq)| (-bq, bp_ + 2 * bq)));
        keys.sort_unstable();
        keys.dedup();
        for (p, q) in keys {
            let a = dp.get(p, q);
            let b = bp.get(2 * p + q, -p);
            if a != b {
                out.push((r, p, q));
            }
        }
    }
    out
}

// ====================================================================
// Hyperresolutions
// ====================================================================

#[derive(Clone, Debug)]
pub struct HyperresolutionArrow {
    pub source: u32,
    pub target: u32,
    pub map: SimplicialMap,
}

/// Cube of good compactifications indexed by subset masks, with maps of
/// pairs `S′ → S′ ∖ {i}`.
#[derive(Clone, Debug, Default)]
pub struct HyperresolutionInput {
    pub nodes: BTreeMap<u32, GoodCompData>,
    pub arrows: Vec<HyperresolutionArrow>,
}

impl HyperresolutionInput {
    pub fn single(g: GoodCompData) -> Self {
        Self { nodes: [(1u32, g)].into_iter().collect(), arrows: Vec::new() }
    }

    /// Node validity, arrow shapes, simplicial maps and commuting squares.
    pub fn validate(&self) -> Result<(), WeightError> {
        for (m, g) in &self.nodes {
            let rep = simp::validate(g);
            if !rep.is_valid() {
                return Err(WeightError::Invalid(format!("node {m:#b} ({}) is not a valid compactification", g.name)));
            }
            if !simp::nc_check(g).passed() {
                return Err(WeightError::Invalid(format!("node {m:#b} ({}) fails the normal crossing check", g.name)));
            }
        }
        let mut maps = BTreeMap::new();
        for a in &self.arrows {
            let (Some(s), Some(t)) = (self.nodes.get(&a.source), self.nodes.get(&a.target)) else {
                return Err(WeightError::Invalid(format!("arrow {:#b} -> {:#b} references a missing node", a.source, a.target)));
            };
            if a.source & a.target != a.target || (a.source ^ a.target).count_ones() != 1 {
                return Err(WeightError::Invalid(format!("arrow {:#b} -> {:#b} does not drop one index", a.source, a.target)));
            }
            a.map.check(&s.complex, &t.complex).map_err(|e| WeightError::Invalid(e.to_string()))?;
            if maps.insert((a.source, a.target), a.map.clone()).is_some() {
                return Err(WeightError::Invalid(format!("duplicate arrow {:#b} -> {:#b}", a.source, a.target)));
            }
        }
        // Two paths S → S∖i → S∖{i,j} and S → S∖j → S∖{i,j} agree.
        for (&(s, m1), f1) in &maps {
            for (&(s2, m2), f2) in &maps {
                if s2 != s || m1 >= m2 {
                    continue;
                }
                let t = m1 & m2;
                if let (Some(g1), Some(g2)) = (maps.get(&(m1, t)), maps.get(&(m2, t))) {
                    if f1.then(g1) != f2.then(g2) {
                        return Err(WeightError::Invalid(format!("square at {s:#b} -> {t:#b} does not commute")));
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Assembly {
    pub weight: WeightComplex,
    pub node_complexes: BTreeMap<u32, WeightComplex>,
    pub arrow_maps: BTreeMap<(u32, u32), ChainMap>,
}

/// Filtered total complex of the nodewise weight complexes.
pub fn assemble(h: &HyperresolutionInput) -> Result<Assembly, WeightError> {
    h.validate()?;
    let mut node_complexes = BTreeMap::new();
    for (&m, g) in &h.nodes {
        node_complexes.insert(m, weight_complex(g)?);
    }
    let mut arrow_maps = BTreeMap::new();
    for a in &h.arrows {
        let s = node_complexes[&a.source].cut.as_ref().expect("smooth node");
        let t = node_complexes[&a.target].cut.as_ref().expect("smooth node");
        arrow_maps.insert((a.source, a.target), corner::induced_map(&a.map, s, t)?);
    }
    let cube = FilteredCube {
        nodes: node_complexes.iter().map(|(&m, w)| (m, w.filtered.clone())).collect(),
        arrows: arrow_maps.clone(),
    };
    let filtered = filt::filtered_total_complex(&cube)?;
    let n = h.nodes.values().map(GoodCompData::n).max().unwrap_or(0);
    let weight = WeightComplex {
        filtered,
        source: WeightSource::Assembled { nodes: h.nodes.iter().map(|(&m, g)| (m, g.name.clone())).collect() },
        n,
        cut: None,
    };
    Ok(Assembly { weight, node_complexes, arrow_maps })
}

/// `assemble` of a one-node cube has the node's filtration, level by level.
pub fn single_node_matches(g: &GoodCompData) -> Result<bool, WeightError> {
    let a = assemble(&HyperresolutionInput::single(g.clone()))?;
    let w = weight_complex(g)?;
    let (lo, hi) = w.filtered.index_range();
    Ok(w.filtered.degrees().all(|k| {
        (lo - 1..=hi + 1).all(|p| a.weight.filtered.level(k, p) == w.filtered.level(k, p))
    }))
}

// ====================================================================
// Kernel characterization
// ====================================================================

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelEntry {
    pub k: i32,
    pub kernel_dim: usize,
    pub weight_dim: usize,
    pub equal: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelReport {
    pub entries: Vec<KernelEntry>,
}

impl KernelReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.equal)
    }
}

/// `ker[H_k(X) → H_k(X̄)] = 𝒲_{-k-1} H_k(X)` as subspaces, with the map
/// computed as `π_*` on the cut complex.
pub fn kernel_characterization(g: &GoodCompData) -> Result<KernelReport, WeightError> {
    let wc = weight_complex(g)?;
    let table = wc.table();
    let cut = wc.cut.as_ref().expect("smooth");
    let pi = corner::pi_pushforward(cut);
    let hk = Arc::new(g.complex.chain_complex().homology());
    let mut entries = Vec::new();
    for k in wc.filtered.degrees() {
        let m = pi.on_homology(k, &table.homology, &hk);
        let kernel = rank_kernel_image(&m).kernel;
        let weight = table.subspace(k, -k - 1);
        entries.push(KernelEntry { k, kernel_dim: kernel.dim(), weight_dim: weight.dim(), equal: kernel == weight });
    }
    Ok(KernelReport { entries })
}

// ====================================================================
// Blowup squares from homology matrices
// ====================================================================

/// Homology of `E → M̃`, `E → C`, `M̃ → M`, `C → M` with pushforwards and
/// Gysin maps, all keyed by source degree:
/// `q^* : H_k(C) → H_{k+m-1}(E)`, `s^* : H_k(M̃) → H_{k-1}(E)`,
/// `p^* : H_k(M) → H_k(M̃)`, `r^* : H_k(M) → H_{k-m}(C)`.
#[derive(Clone, Debug, Default)]
pub struct BlowupSquareData {
    pub codim: usize,
    pub dim_e: BTreeMap<i32, usize>,
    pub dim_c: BTreeMap<i32, usize>,
    pub dim_mt: BTreeMap<i32, usize>,
    pub dim_m: BTreeMap<i32, usize>,
    pub q_push: BTreeMap<i32, BitMatrix>,
    pub s_push: BTreeMap<i32, BitMatrix>,
    pub p_push: BTreeMap<i32, BitMatrix>,
    pub r_push: BTreeMap<i32, BitMatrix>,
    pub q_gysin: BTreeMap<i32, BitMatrix>,
    pub s_gysin: BTreeMap<i32, BitMatrix>,
    pub p_gysin: BTreeMap<i32, BitMatrix>,
    pub r_gysin: BTreeMap<i32, BitMatrix>,
}

fn dim_of(d: &BTreeMap<i32, usize>, k: i32) -> usize {
    d.get(&k).copied().unwrap_or(0)
}

fn mat(m: &BTreeMap<i32, BitMatrix>, k: i32, rows: usize, cols: usize) -> Result<BitMatrix, WeightError> {
    match m.get(&k) {
        Some(x) if (x.rows(), x.cols()) == (rows, cols) => Ok(x.clone()),
        Some(x) => Err(WeightError::Invalid(format!(
            "matrix in degree {k} is {}x{}, expected {rows}x{cols}",
            x.rows(),
            x.cols()
        ))),
        None => Ok(BitMatrix::zeros(rows, cols)),
    }
}

impl BlowupSquareData {
    fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        let hi = [&self.dim_e, &self.dim_c, &self.dim_mt, &self.dim_m]
            .iter()
            .filter_map(|d| d.keys().next_back().copied())
            .max()
            .unwrap_or(0);
        0..=hi + 1
    }

    /// Builds the data from simplicial maps of closed manifolds; Gysin maps
    /// come from cap-product Poincaré duality.
    #[allow(clippy::too_many_arguments)]
    pub fn from_maps(
        e: &ClosedManifold,
        c: &ClosedManifold,
        mt: &ClosedManifold,
        m: &ClosedManifold,
        q: &SimplicialMap,
        s: &SimplicialMap,
        p: &SimplicialMap,
        r: &SimplicialMap,
    ) -> Result<Self, WeightError> {
        let codim = (m.dim() - c.dim()).max(0) as usize;
        let dims = |x: &ClosedManifold| -> BTreeMap<i32, usize> { (0..=x.dim()).map(|k| (k, x.homology.dim(k))).collect() };
        let mut d = BlowupSquareData {
            codim,
            dim_e: dims(e),
            dim_c: dims(c),
            dim_mt: dims(mt),
            dim_m: dims(m),
            ..Default::default()
        };
        let top = m.dim().max(mt.dim());
        for k in 0..=top {
            d.q_push.insert(k, cechgysin::homology_pushforward(q, e, c, k));
            d.s_push.insert(k, cechgysin::homology_pushforward(s, e, mt, k));
            d.p_push.insert(k, cechgysin::homology_pushforward(p, mt, m, k));
            d.r_push.insert(k, cechgysin::homology_pushforward(r, c, m, k));
            d.q_gysin.insert(k, cechgysin::poincare_gysin(q, e, c, k));
            d.s_gysin.insert(k, cechgysin::poincare_gysin(s, e, mt, k));
            d.p_gysin.insert(k, cechgysin::poincare_gysin(p, mt, m, k));
            d.r_gysin.insert(k, cechgysin::poincare_gysin(r, c, m, k));
        }
        Ok(d)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupDegreeReport {
    pub k: i32,
    /// `(dim H_k(E), dim H_k(C), dim H_k(M̃), dim H_k(M))`.
    pub dims: (usize, usize, usize, usize),
    pub commutes: bool,
    pub exact: bool,
    pub q_surjective: bool,
    pub kernel_iso: bool,
    pub degree_one: bool,
    pub split_m_tilde: bool,
    pub split_e: bool,
    pub gysin_commutes: bool,
    pub q_tilde_unique: bool,
    pub q_tilde_section: bool,
    pub gysin_square_commutes: bool,
    pub gysin_square_acyclic: bool,
    /// Matrix of `q̃_* : H_{k-1}(E) → H_{k-m}(C)`, dense rows.
    pub q_tilde: Vec<Vec<u8>>,
}

impl BlowupDegreeReport {
    pub fn passed(&self) -> bool {
        self.commutes
            && self.exact
            && self.q_surjective
            && self.kernel_iso
            && self.degree_one
            && self.split_m_tilde
            && self.split_e
            && self.gysin_commutes
            && self.q_tilde_unique
            && self.q_tilde_section
            && self.gysin_square_commutes
            && self.gysin_square_acyclic
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupSquareReport {
    pub degrees: Vec<BlowupDegreeReport>,
}

impl BlowupSquareReport {
    pub fn passed(&self) -> bool {
        self.degrees.iter().all(BlowupDegreeReport::passed)
    }
}

fn stack_rows(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    let rows: Vec<BitVector> = a.row_vectors().into_iter().chain(b.row_vectors()).cloned().collect();
    BitMatrix::from_rows(a.cols(), rows).expect("same width")
}

fn stack_cols(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    let cols: Vec<BitVector> = a.columns().into_iter().chain(b.columns()).collect();
    BitMatrix::from_columns(a.rows(), &cols).expect("same height")
}

/// Exactness of `A →f B →g C` at `B`, with `f` injective and `g` surjective.
fn short_exact(f: &BitMatrix, g: &BitMatrix) -> bool {
    let rf = rank_kernel_image(f);
    let rg = rank_kernel_image(g);
    rf.kernel.is_zero() && rg.rank == g.rows() && rf.image == rg.kernel
}

pub fn blowup_square_checks(b: &BlowupSquareData) -> Result<BlowupSquareReport, WeightError> {
    if b.codim == 0 {
        return Err(WeightError::Precondition("the center must have smaller dimension than M".into()));
    }
    let m = b.codim as i32;
    let mut report = BlowupSquareReport::default();
    for k in b.degrees() {
        let (e, c, mt, mm) = (dim_of(&b.dim_e, k), dim_of(&b.dim_c, k), dim_of(&b.dim_mt, k), dim_of(&b.dim_m, k));
        let q = mat(&b.q_push, k, c, e)?;
        let s = mat(&b.s_push, k, mt, e)?;
        let p = mat(&b.p_push, k, mm, mt)?;
        let r = mat(&b.r_push, k, mm, c)?;
        let p_up = mat(&b.p_gysin, k, mt, mm)?;
        let mut d = BlowupDegreeReport { k, dims: (e, c, mt, mm), ..Default::default() };
        d.commutes = r.mul(&q).expect("shape") == p.mul(&s).expect("shape");
        d.exact = short_exact(&stack_rows(&q, &s), &stack_cols(&r, &p));
        d.q_surjective = q.rank() == c;
        let ker_q = rank_kernel_image(&q).kernel;
        let ker_p = rank_kernel_image(&p).kernel;
        let s_ker = ker_q.image(&s).expect("shape");
        d.kernel_iso = s_ker == ker_p && s_ker.dim() == ker_q.dim();
        d.degree_one = p.mul(&p_up).expect("shape") == BitMatrix::identity(mm);
        let im_p_up = rank_kernel_image(&p_up).image;
        d.split_m_tilde = ker_p.intersection(&im_p_up).expect("ambient").is_zero() && ker_p.dim() + im_p_up.dim() == mt;

        // Gysin square in degree k: H_k(M̃) → H_{k-1}(E), H_k(M) → H_{k-m}(C).
        let e1 = dim_of(&b.dim_e, k - 1);
        let cm = dim_of(&b.dim_c, k - m);
        let q_up = mat(&b.q_gysin, k - m, e1, cm)?;
        let s_up = mat(&b.s_gysin, k, e1, mt)?;
        let r_up = mat(&b.r_gysin, k, cm, mm)?;
        d.gysin_commutes = s_up.mul(&p_up).expect("shape") == q_up.mul(&r_up).expect("shape");
        let im_q_up = rank_kernel_image(&q_up).image;
        let s_ker_p = ker_p.image(&s_up).expect("shape");
        d.split_e = im_q_up.intersection(&s_ker_p).expect("ambient").is_zero()
            && im_q_up.dim() + s_ker_p.dim() == e1
            && q_up.rank() == cm;
        // α = q^*β + s^*γ with γ ∈ ker p_*; the block matrix must be invertible.
        let block = stack_cols(&q_up, &BitMatrix::from_columns(e1, &s_ker_p.basis().to_vec()).expect("shape"));
        d.q_tilde_unique = block.rows() == block.cols() && block.rank() == e1;
        if d.q_tilde_unique {
            let inv = cechgysin::invert(&block).expect("invertible");
            // q̃ keeps the first cm coordinates.
            let rows: Vec<BitVector> = (0..cm).map(|i| inv.row(i).clone()).collect();
            let q_tilde = BitMatrix::from_rows(e1, rows).expect("shape");
            d.q_tilde_section = q_tilde.mul(&q_up).expect("shape") == BitMatrix::identity(cm);
            d.gysin_square_commutes = q_tilde.mul(&s_up).expect("shape") == r_up.mul(&p).expect("shape");
            d.gysin_square_acyclic = short_exact(&stack_rows(&s_up, &p), &stack_cols(&q_tilde, &r_up));
            d.q_tilde = q_tilde.to_dense();
        }
        report.degrees.push(d);
    }
    Ok(report)
}

// ====================================================================
// Blowup theorems on triangulated pairs
// ====================================================================

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransverseReport {
    pub total_homology: BTreeMap<i32, usize>,
    /// Indices `p` whose graded piece of the simple complex is not acyclic.
    pub graded_failures: Vec<i32>,
}

impl TransverseReport {
    pub fn passed(&self) -> bool {
        self.total_homology.values().all(|&d| d == 0) && self.graded_failures.is_empty()
    }
}

/// Square of pairs `(Ỹ, Z̃) → (W̃, X̃)`, `(Ỹ, Z̃) → (Y, Z)`, `(W̃, X̃) → (W, X)`,
/// `(Y, Z) → (W, X)`.
#[derive(Clone, Debug)]
pub struct BlowupSquarePairs {
    pub exceptional: GoodCompData,
    pub blown_up: GoodCompData,
    pub center: GoodCompData,
    pub base: GoodCompData,
    pub inclusion_up: SimplicialMap,
    pub projection: SimplicialMap,
    pub blowdown: SimplicialMap,
    pub inclusion: SimplicialMap,
}

impl BlowupSquarePairs {
    /// Nodes `3 = Ỹ`, `1 = W̃`, `2 = Y`, `0 = W`.
    pub fn hyperresolution(&self) -> HyperresolutionInput {
        let nodes = [(3u32, self.exceptional.clone()), (1, self.blown_up.clone()), (2, self.center.clone()), (0, self.base.clone())]
            .into_iter()
            .collect();
        let arrows = vec![
            HyperresolutionArrow { source: 3, target: 1, map: self.inclusion_up.clone() },
            HyperresolutionArrow { source: 3, target: 2, map: self.projection.clone() },
            HyperresolutionArrow { source: 1, target: 0, map: self.blowdown.clone() },
            HyperresolutionArrow { source: 2, target: 0, map: self.inclusion.clone() },
        ];
        HyperresolutionInput { nodes, arrows }
    }
}

/// The simple filtered complex of the square of weight complexes is acyclic
/// and so is each of its graded pieces.
pub fn transverse_blowup_check(sq: &BlowupSquarePairs) -> Result<TransverseReport, WeightError> {
    let a = assemble(&sq.hyperresolution())?;
    let fc = &a.weight.filtered;
    let total_homology = fc.complex.homology_dims();
    let (lo, hi) = fc.index_range();
    let graded_failures = (lo..=hi + 1).filter(|&p| !filt::graded_piece(fc, p).complex.is_acyclic()).collect();
    Ok(TransverseReport { total_homology, graded_failures })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContainedReport {
    pub filtered: bool,
    pub graded_failures: Vec<i32>,
    pub same_tables: bool,
}

impl ContainedReport {
    pub fn passed(&self) -> bool {
        self.filtered && self.graded_failures.is_empty() && self.same_tables
    }
}

/// `b′_* : 𝒲C(X̃′) → 𝒲C(X′)` is a filtered quasi-isomorphism.
pub fn contained_blowup_check(blown_up: &GoodCompData, base: &GoodCompData, blowdown: &SimplicialMap) -> Result<ContainedReport, WeightError> {
    blowdown.check(&blown_up.complex, &base.complex).map_err(|e| WeightError::Invalid(e.to_string()))?;
    let wt = weight_complex(blown_up)?;
    let w = weight_complex(base)?;
    let f = corner::induced_map(blowdown, wt.cut.as_ref().expect("smooth"), w.cut.as_ref().expect("smooth"))?;
    let same_tables = wt.table().same_dims(&w.table());
    Ok(match filt::graded_quasi_iso_failures(&f, &wt.filtered, &w.filtered) {
        Ok(bad) => ContainedReport { filtered: true, graded_failures: bad, same_tables },
        Err(_) => ContainedReport { filtered: false, graded_failures: Vec::new(), same_tables },
    })
}

// ====================================================================
// Independence of the compactification
// ====================================================================

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndependenceReport {
    pub equal: bool,
    pub first: BTreeMap<i32, Vec<(i32, usize)>>,
    pub second: BTreeMap<i32, Vec<(i32, usize)>>,
}

pub fn independence_check(g1: &GoodCompData, g2: &GoodCompData) -> Result<IndependenceReport, WeightError> {
    let t1 = weight_complex(g1)?.table();
    let t2 = weight_complex(g2)?.table();
    let n = g1.n().max(g2.n()) as i32;
    Ok(IndependenceReport { equal: t1.same_dims(&t2), first: t1.rows(-n - 1, 0), second: t2.rows(-n - 1, 0) })
}

/// Subspace equality of two filtrations on the same homology, for tests that
/// compare weight tables built along different routes.
pub fn same_subspaces(a: &WeightTable, b: &WeightTable, k: i32, plo: i32, phi: i32) -> bool {
    (plo..=phi).all(|p| a.subspace(k, p) == b.subspace(k, p))
}
