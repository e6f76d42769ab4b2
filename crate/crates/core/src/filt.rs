//! Increasing filtrations on chain complexes, their spectral sequences, the
//! Deligne shift, induced filtrations on homology and filtered diagrams.
//!
//! A decreasing filtration `F^p` is stored as the increasing filtration
//! `F̂_{-p}`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{ChainComplex, ChainError, ChainMap, CubeDiagram, Homology};
use crate::gf2::{BitMatrix, BitVector, QuotientBasis, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FiltError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error("map does not preserve the filtration at p = {p}, degree {k}{context}")]
    NotFiltered { p: i32, k: i32, context: String },
    #[error("filtration level at p = {p}, degree {k} has ambient {found}, expected {expected}")]
    Ambient { p: i32, k: i32, expected: usize, found: usize },
}

/// Geometric origin of a filtered complex; selects the support triangle
/// checked on its spectral sequence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Origin {
    Plain,
    Corner { n: usize },
    Weight { n: usize },
}

#[derive(Clone, Debug)]
pub struct FilteredComplex {
    pub complex: Arc<ChainComplex>,
    pub origin: Origin,
    lo: i32,
    hi: i32,
    levels: BTreeMap<i32, Vec<Subspace>>,
    zero: BTreeMap<i32, Subspace>,
    full: BTreeMap<i32, Subspace>,
}

impl FilteredComplex {
    /// Levels `F̂_p C_k` for `lo ≤ p ≤ hi` from a closure; below `lo` the
    /// filtration is zero and above `hi` it is everything.
    pub fn from_fn(
        complex: Arc<ChainComplex>,
        lo: i32,
        hi: i32,
        mut level: impl FnMut(i32, i32) -> Subspace,
    ) -> Result<Self, FiltError> {
        let mut levels = BTreeMap::new();
        let mut zero = BTreeMap::new();
        let mut full = BTreeMap::new();
        for k in complex.degrees() {
            let d = complex.dim(k);
            let mut v = Vec::new();
            for p in lo..=hi {
                let s = level(k, p);
                if s.ambient() != d {
                    return Err(FiltError::Ambient { p, k, expected: d, found: s.ambient() });
                }
                v.push(s);
            }
            levels.insert(k, v);
            zero.insert(k, Subspace::zero(d));
            full.insert(k, Subspace::full(d));
        }
        Ok(Self { complex, origin: Origin::Plain, lo, hi, levels, zero, full })
    }

    /// Filtration in which basis vector `i` of degree `k` enters at index
    /// `index[k][i]`.
    pub fn from_basis_indices(complex: Arc<ChainComplex>, index: &BTreeMap<i32, Vec<i32>>) -> Result<Self, FiltError> {
        let all: Vec<i32> = index.values().flatten().copied().collect();
        let lo = all.iter().copied().min().unwrap_or(0);
        let hi = all.iter().copied().max().unwrap_or(0);
        let c = complex.clone();
        Self::from_fn(complex, lo, hi, |k, p| {
            let d = c.dim(k);
            let idx = index.get(&k).map(Vec::as_slice).unwrap_or(&[]);
            Subspace::span_owned(d, (0..d).filter(|&i| idx[i] <= p).map(|i| BitVector::singleton(d, i)).collect())
        })
    }

    pub fn with_origin(mut self, origin: Origin) -> Self {
        self.origin = origin;
        self
    }

    pub fn index_range(&self) -> (i32, i32) {
        (self.lo, self.hi)
    }

    /// `F̂_p C_k`.
    pub fn level(&self, k: i32, p: i32) -> &Subspace {
        static EMPTY: std::sync::OnceLock<Subspace> = std::sync::OnceLock::new();
        let Some(v) = self.levels.get(&k) else {
            return EMPTY.get_or_init(|| Subspace::zero(0));
        };
        if p < self.lo {
            &self.zero[&k]
        } else if p > self.hi {
            &self.full[&k]
        } else {
            &v[(p - self.lo) as usize]
        }
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.complex.degrees()
    }

    /// `{x ∈ F̂_p C_k | ∂x ∈ F̂_{p-r} C_{k-1}}`.
    pub fn z_space(&self, r: i32, p: i32, k: i32) -> Subspace {
        self.level(k, p).preimage(&self.complex.boundary(k), self.level(k - 1, p - r)).expect("shape")
    }

    /// Subcomplex `F̂_p C` as a chain complex on the same labels, together
    /// with the inclusion data (the chosen basis of each level).
    pub fn subcomplex_homology_image(&self, p: i32, homology: &Homology) -> BTreeMap<i32, Subspace> {
        self.degrees()
            .map(|k| {
                let cyc = homology.degree(k).map(|d| d.cycles.clone()).unwrap_or_else(|| Subspace::zero(0));
                let inter = cyc.intersection(self.level(k, p)).expect("ambient");
                (k, homology.classes_span(k, inter.basis()))
            })
            .collect()
    }
}

// ====================================================================
// Validation
// ====================================================================

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ViolationKind {
    NotNested,
    NotBoundaryStable,
    NotExhaustive,
    CornerBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub p: i32,
    pub k: i32,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationReport {
    pub violations: Vec<Violation>,
}

impl FiltrationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_filtration(fc: &FilteredComplex) -> FiltrationReport {
    let mut violations = Vec::new();
    let (lo, hi) = fc.index_range();
    for k in fc.degrees() {
        for p in lo..=hi {
            if !fc.level(k, p).contains_subspace(fc.level(k, p - 1)) {
                violations.push(Violation { kind: ViolationKind::NotNested, p, k });
            }
            let image = fc.level(k, p).image(&fc.complex.boundary(k)).expect("shape");
            if !fc.level(k - 1, p).contains_subspace(&image) {
                violations.push(Violation { kind: ViolationKind::NotBoundaryStable, p, k });
            }
        }
        if !fc.level(k, hi).is_full() {
            violations.push(Violation { kind: ViolationKind::NotExhaustive, p: hi, k });
        }
        if let Origin::Corner { n } = fc.origin {
            // F^{n-k+1} C_k = 0, i.e. F̂_{k-n-1} C_k = 0.
            let p = k - n as i32 - 1;
            if !fc.level(k, p).is_zero() {
                violations.push(Violation { kind: ViolationKind::CornerBound, p, k });
            }
        }
    }
    FiltrationReport { violations }
}

// ====================================================================
// Spectral sequence
// ====================================================================

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PageEntry {
    pub dim: usize,
    /// Rank of the differential leaving this bidegree.
    pub d_rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Page {
    pub r: usize,
    pub entries: BTreeMap<(i32, i32), PageEntry>,
}

impl Page {
    pub fn get(&self, p: i32, q: i32) -> PageEntry {
        self.entries.get(&(p, q)).copied().unwrap_or(PageEntry { dim: 0, d_rank: 0 })
    }

    pub fn has_zero_differential(&self) -> bool {
        self.entries.values().all(|e| e.d_rank == 0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectralSequence {
    pub pages: Vec<Page>,
    /// First page from which every differential vanishes.
    pub stable_page: usize,
}

impl SpectralSequence {
    pub fn page(&self, r: usize) -> &Page {
        self.pages.get(r).unwrap_or_else(|| self.pages.last().expect("at least one page"))
    }

    pub fn infinity(&self) -> &Page {
        self.pages.last().expect("at least one page")
    }

    /// `Σ_{p+q=k} dim E^∞_{p,q}`.
    pub fn abutment_dims(&self) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        for (&(p, q), e) in &self.infinity().entries {
            *out.entry(p + q).or_insert(0) += e.dim;
        }
        out
    }
}

struct PageCalc<'a> {
    fc: &'a FilteredComplex,
    z: BTreeMap<(i32, i32, i32), Subspace>,
}

impl<'a> PageCalc<'a> {
    fn z(&mut self, r: i32, p: i32, k: i32) -> Subspace {
        if let Some(s) = self.z.get(&(r, p, k)) {
            return s.clone();
        }
        let s = if r < 0 { self.fc.level(k, p).clone() } else { self.fc.z_space(r, p, k) };
        self.z.insert((r, p, k), s.clone());
        s
    }

    /// `Z^{r-1}_{p-1} + ∂ Z^{r-1}_{p+r-1}` in degree `k`.
    fn denominator(&mut self, r: i32, p: i32, k: i32) -> Subspace {
        let a = self.z(r - 1, p - 1, k);
        let b = self.z(r - 1, p + r - 1, k + 1).image(&self.fc.complex.boundary(k + 1)).expect("shape");
        a.sum(&b).expect("ambient")
    }
}

pub fn spectral_sequence(fc: &FilteredComplex) -> SpectralSequence {
    let (lo, hi) = fc.index_range();
    let (plo, phi) = (lo, hi + 1);
    let last = (phi - plo + 1).max(1) as usize;
    let mut calc = PageCalc { fc, z: BTreeMap::new() };
    let mut pages = Vec::new();
    for r in 0..=last {
        let ri = r as i32;
        let mut entries = BTreeMap::new();
        for k in fc.degrees() {
            for p in plo..=phi {
                let z = calc.z(ri, p, k);
                let den = calc.denominator(ri, p, k);
                let dim = z.dim() - den.dim();
                let d_rank = if dim == 0 {
                    0
                } else {
                    let target_den = calc.denominator(ri, p - ri, k - 1);
                    let img = z.image(&fc.complex.boundary(k)).expect("shape");
                    img.sum(&target_den).expect("ambient").dim() - target_den.dim()
                };
                if dim > 0 {
                    entries.insert((p, k - p), PageEntry { dim, d_rank });
                }
            }
        }
        pages.push(Page { r, entries });
    }
    let mut stable_page = pages.len() - 1;
    while stable_page > 0 && pages[stable_page - 1].has_zero_differential() {
        stable_page -= 1;
    }
    SpectralSequence { pages, stable_page }
}

/// Matrix of `d^r : E^r_{p,q} → E^r_{p-r,q+r-1}` in representative bases of
/// the two subquotients.
pub fn differential_matrix(fc: &FilteredComplex, r: usize, p: i32, q: i32) -> BitMatrix {
    let ri = r as i32;
    let k = p + q;
    let mut calc = PageCalc { fc, z: BTreeMap::new() };
    let src = QuotientBasis::of(&calc.z(ri, p, k), &calc.denominator(ri, p, k));
    let tz = calc.z(ri, p - ri, k - 1);
    let tgt = QuotientBasis::of(&tz, &calc.denominator(ri, p - ri, k - 1));
    let d = fc.complex.boundary(k);
    let cols: Vec<BitVector> = src
        .reps()
        .iter()
        .map(|x| tgt.coordinates(&d.mul_vec(x)).expect("boundary of Z^r lands in Z^r"))
        .collect();
    BitMatrix::from_columns(tgt.dim(), &cols).expect("shape")
}

/// Bidegrees with a nonzero entry outside the support triangle of the
/// complex's origin, for pages `r ≥ first_page`.
pub fn support_violations(ss: &SpectralSequence, origin: Origin) -> Vec<(usize, i32, i32)> {
    let (n, first, inside): (i32, usize, fn(i32, i32, i32) -> bool) = match origin {
        Origin::Plain => return Vec::new(),
        // Triangle (0,0), (0,n), (-n,n).
        Origin::Corner { n } => (n as i32, 0, |n, p, q| p <= 0 && p >= -n && q >= -p && q <= n),
        // Triangle (0,0), (-n,2n), (-n,n).
        Origin::Weight { n } => (n as i32, 1, |n, p, q| p <= 0 && p >= -n && q >= -p && q <= -2 * p),
    };
    let mut out = Vec::new();
    for page in ss.pages.iter().skip(first) {
        for (&(p, q), e) in &page.entries {
            if e.dim > 0 && !inside(n, p, q) {
                out.push((page.r, p, q));
            }
        }
    }
    out
}

// ====================================================================
// Graded pieces
// ====================================================================

/// The complex `F̂_p / F̂_{p-1}` in representative bases.
#[derive(Clone, Debug)]
pub struct GradedPiece {
    pub p: i32,
    pub complex: ChainComplex,
    pub bases: BTreeMap<i32, QuotientBasis>,
}

pub fn graded_piece(fc: &FilteredComplex, p: i32) -> GradedPiece {
    let c = &fc.complex;
    let bases: BTreeMap<i32, QuotientBasis> =
        fc.degrees().map(|k| (k, QuotientBasis::of(fc.level(k, p), fc.level(k, p - 1)))).collect();
    let mut labels = Vec::new();
    let mut boundary = Vec::new();
    for k in fc.degrees() {
        let b = &bases[&k];
        labels.push((0..b.dim()).map(|i| format!("gr{p}_{k}_{i}")).collect());
        if k == c.lo() {
            boundary.push(BitMatrix::zeros(0, b.dim()));
        } else {
            let below = &bases[&(k - 1)];
            let d = c.boundary(k);
            let cols: Vec<BitVector> = b
                .reps()
                .iter()
                .map(|x| below.coordinates(&d.mul_vec(x)).expect("filtration is boundary-stable"))
                .collect();
            boundary.push(BitMatrix::from_columns(below.dim(), &cols).expect("shape"));
        }
    }
    let complex = ChainComplex::new(c.lo(), labels, boundary).expect("graded piece is a complex");
    GradedPiece { p, complex, bases }
}

// ====================================================================
// Deligne shift
// ====================================================================

/// `(Dec F̂)_p C_k = {x ∈ F̂_{p+k} C_k | ∂x ∈ F̂_{p+k-1} C_{k-1}}`.
pub fn decalage(fc: &FilteredComplex) -> FilteredComplex {
    let (lo, hi) = fc.index_range();
    let (klo, khi) = (fc.complex.lo(), fc.complex.hi());
    let (dlo, dhi) = if khi < klo { (0, 0) } else { (lo - khi, hi + 1 - klo) };
    let origin = match fc.origin {
        Origin::Corner { n } => Origin::Weight { n },
        _ => Origin::Plain,
    };
    FilteredComplex::from_fn(fc.complex.clone(), dlo, dhi, |k, p| fc.z_space(1, p + k, k))
        .expect("same complex")
        .with_origin(origin)
}

// ====================================================================
// Filtration on homology
// ====================================================================

#[derive(Clone, Debug)]
pub struct WeightTable {
    /// `dims[k][p] = dim 𝒲_p H_k`, over the full index window.
    pub dims: BTreeMap<i32, BTreeMap<i32, usize>>,
    /// `𝒲_p H_k` in coordinates of the homology representative basis.
    pub subspaces: BTreeMap<(i32, i32), Subspace>,
    pub homology: Arc<Homology>,
    pub spectral_sequence: Option<SpectralSequence>,
}

impl WeightTable {
    pub fn dim(&self, k: i32, p: i32) -> usize {
        let Some(row) = self.dims.get(&k) else { return 0 };
        match row.range(..=p).next_back() {
            Some((_, &d)) => d,
            None => 0,
        }
    }

    pub fn subspace(&self, k: i32, p: i32) -> Subspace {
        let h = self.homology.dim(k);
        let (lo, hi) = self.window(k);
        if p < lo {
            Subspace::zero(h)
        } else if p > hi {
            Subspace::full(h)
        } else {
            self.subspaces[&(k, p)].clone()
        }
    }

    fn window(&self, k: i32) -> (i32, i32) {
        let row = &self.dims[&k];
        (*row.keys().next().unwrap(), *row.keys().next_back().unwrap())
    }

    pub fn homology_dim(&self, k: i32) -> usize {
        self.homology.dim(k)
    }

    /// Same dims in every degree over the union of index windows.
    pub fn same_dims(&self, other: &WeightTable) -> bool {
        let degrees: std::collections::BTreeSet<i32> = self.dims.keys().chain(other.dims.keys()).copied().collect();
        degrees.into_iter().all(|k| {
            let ps: std::collections::BTreeSet<i32> = self
                .dims
                .get(&k)
                .into_iter()
                .chain(other.dims.get(&k))
                .flat_map(|r| r.keys().copied())
                .collect();
            self.homology_dim(k) == other.homology_dim(k) && ps.into_iter().all(|p| self.dim(k, p) == other.dim(k, p))
        })
    }

    /// `k → [(p, dim)]` restricted to `p ∈ [plo, phi]`.
    pub fn rows(&self, plo: i32, phi: i32) -> BTreeMap<i32, Vec<(i32, usize)>> {
        self.dims.keys().map(|&k| (k, (plo..=phi).map(|p| (p, self.dim(k, p))).collect())).collect()
    }
}

/// `𝒲_p H_k = image of H_k(F̂_p) → H_k(C)`.
pub fn homology_filtration(fc: &FilteredComplex) -> WeightTable {
    let homology = Arc::new(fc.complex.homology());
    let (lo, hi) = fc.index_range();
    let mut dims = BTreeMap::new();
    let mut subspaces = BTreeMap::new();
    for k in fc.degrees() {
        let cyc = homology.degree(k).expect("degree in range").cycles.clone();
        let mut row = BTreeMap::new();
        for p in lo - 1..=hi + 1 {
            let inter = cyc.intersection(fc.level(k, p)).expect("ambient");
            let s = homology.classes_span(k, inter.basis());
            row.insert(p, s.dim());
            subspaces.insert((k, p), s);
        }
        dims.insert(k, row);
    }
    WeightTable { dims, subspaces, homology, spectral_sequence: None }
}

/// Homology filtration together with its spectral sequence.
pub fn homology_filtration_with_pages(fc: &FilteredComplex) -> WeightTable {
    let mut t = homology_filtration(fc);
    t.spectral_sequence = Some(spectral_sequence(fc));
    t
}

/// Checks that `E^∞` graded dims equal the successive quotients of the
/// homology filtration; returns the offending `(k, p)` pairs.
pub fn abutment_mismatches(table: &WeightTable, ss: &SpectralSequence) -> Vec<(i32, i32)> {
    let mut out = Vec::new();
    let inf = ss.infinity();
    for (&k, row) in &table.dims {
        let (lo, hi) = (*row.keys().next().unwrap(), *row.keys().next_back().unwrap());
        for p in lo..=hi {
            let graded = table.dim(k, p) - table.dim(k, p - 1);
            if graded != inf.get(p, k - p).dim {
                out.push((k, p));
            }
        }
    }
    out
}

// ====================================================================
// Filtered maps and diagrams
// ====================================================================

/// Checks `f(F̂_p A_k) ⊆ F̂_p B_k` for all `p`, `k`.
pub fn check_filtered_map(f: &ChainMap, a: &FilteredComplex, b: &FilteredComplex) -> Result<(), FiltError> {
    let (alo, ahi) = a.index_range();
    let (blo, bhi) = b.index_range();
    for k in a.degrees() {
        let m = f.matrix(k);
        for p in alo.min(blo) - 1..=ahi.max(bhi) + 1 {
            let img = a.level(k, p).image(&m).expect("shape");
            if !b.level(k, p).contains_subspace(&img) {
                return Err(FiltError::NotFiltered { p, k, context: String::new() });
            }
        }
    }
    Ok(())
}

/// Map induced on `F̂_p / F̂_{p-1}`.
pub fn graded_map(f: &ChainMap, ga: &GradedPiece, gb: &GradedPiece) -> ChainMap {
    let mut matrices = BTreeMap::new();
    for k in ga.complex.degrees() {
        let m = f.matrix(k);
        let tb = gb.bases.get(&k);
        let cols: Vec<BitVector> = ga.bases[&k]
            .reps()
            .iter()
            .map(|x| {
                let y = m.mul_vec(x);
                match tb {
                    Some(tb) => tb.coordinates(&y).expect("filtered map"),
                    None => BitVector::zeros(0),
                }
            })
            .collect();
        matrices.insert(k, BitMatrix::from_columns(gb.complex.dim(k), &cols).expect("shape"));
    }
    ChainMap::new(Arc::new(ga.complex.clone()), Arc::new(gb.complex.clone()), matrices).expect("shape")
}

/// True iff every graded piece map is a quasi-isomorphism.
pub fn is_filtered_quasi_iso(f: &ChainMap, a: &FilteredComplex, b: &FilteredComplex) -> Result<bool, FiltError> {
    Ok(graded_quasi_iso_failures(f, a, b)?.is_empty())
}

/// Indices `p` whose graded map is not a quasi-isomorphism.
pub fn graded_quasi_iso_failures(f: &ChainMap, a: &FilteredComplex, b: &FilteredComplex) -> Result<Vec<i32>, FiltError> {
    check_filtered_map(f, a, b)?;
    let (alo, ahi) = a.index_range();
    let (blo, bhi) = b.index_range();
    let mut bad = Vec::new();
    for p in alo.min(blo)..=ahi.max(bhi) + 1 {
        let ga = graded_piece(a, p);
        let gb = graded_piece(b, p);
        let g = graded_map(f, &ga, &gb);
        if !g.is_quasi_iso() {
            bad.push(p);
        }
    }
    Ok(bad)
}

/// Cube of filtered complexes with filtration-preserving arrows.
#[derive(Clone, Debug, Default)]
pub struct FilteredCube {
    pub nodes: BTreeMap<u32, FilteredComplex>,
    pub arrows: BTreeMap<(u32, u32), ChainMap>,
}

/// Total complex with `F̂_p (Tot)_k = ⊕_S F̂_p C_{k - shift(S)}(S)`.
pub fn filtered_total_complex(cube: &FilteredCube) -> Result<FilteredComplex, FiltError> {
    for (&(s, t), f) in &cube.arrows {
        check_filtered_map(f, &cube.nodes[&s], &cube.nodes[&t]).map_err(|e| match e {
            FiltError::NotFiltered { p, k, .. } => {
                FiltError::NotFiltered { p, k, context: format!(" (arrow {s:#b} -> {t:#b})") }
            }
            other => other,
        })?;
    }
    let diagram = CubeDiagram {
        nodes: cube.nodes.iter().map(|(&m, fc)| (m, fc.complex.clone())).collect(),
        arrows: cube.arrows.clone(),
    };
    let total = Arc::new(diagram.total_complex()?);
    let lo = cube.nodes.values().map(|fc| fc.index_range().0).min().unwrap_or(0);
    let hi = cube.nodes.values().map(|fc| fc.index_range().1).max().unwrap_or(0);
    let origin = match cube.nodes.values().next().map(|f| f.origin) {
        Some(o) if cube.nodes.values().all(|f| f.origin == o) => o,
        _ => Origin::Plain,
    };
    let t = total.clone();
    let fc = FilteredComplex::from_fn(total, lo, hi, |k, p| {
        let mut vecs = Vec::new();
        for (m, l, off) in diagram.block_layout(k) {
            for b in cube.nodes[&m].level(l, p).basis() {
                vecs.push(BitVector::from_support(t.dim(k), b.ones().map(|i| i + off)));
            }
        }
        Subspace::span_owned(t.dim(k), vecs)
    })?;
    Ok(fc.with_origin(match origin {
        Origin::Weight { .. } => Origin::Plain,
        o => o,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_differential_pages_are_graded_pieces() {
        let c = Arc::new(ChainComplex::from_dims(0, &[3], vec![BitMatrix::zeros(0, 3)]).unwrap());
        let idx: BTreeMap<i32, Vec<i32>> = [(0, vec![-1, 0, 0])].into_iter().collect();
        let fc = FilteredComplex::from_basis_indices(c, &idx).unwrap();
        let ss = spectral_sequence(&fc);
        assert_eq!(ss.page(1).get(-1, 1).dim, 1);
        assert_eq!(ss.infinity().get(0, 0).dim, 2);
        assert_eq!(ss.stable_page, 0);
    }
}
