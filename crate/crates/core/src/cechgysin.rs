//! Čech complexes of the divisor strata, the Gysin complex, Borel–Moore
//! duality and weighted pushforwards of Gysin complexes.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chain::{ChainComplex, ChainError, ChainMap, Homology};
use crate::corner::{self, CornerError, CornerFiltration, StratumSum};
use crate::filt::{self, FilteredComplex, SpectralSequence, WeightTable};
use crate::gf2::{BitMatrix, BitVector, QuotientBasis, Subspace};
use crate::simp::{self, GoodCompData, SimplicialComplex, SimplicialMap, StratumMask};
use crate::torus::{self, TorusAlgebra, TorusHom};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CechError {
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Corner(#[from] CornerError),
    #[error("intersection pairing is singular in degree {0}")]
    SingularPairing(i32),
    #[error("exponent matrix is {found:?}, expected {expected:?}")]
    Shape { expected: (usize, usize), found: (usize, usize) },
    #[error("Poincaré duality map is not invertible in degree {0}")]
    NotClosedManifold(i32),
    #[error("map error: {0}")]
    Map(String),
}

/// Basis element `(J, σ)` with `σ ∈ K_J`.
pub type StratumCell = (StratumMask, usize, usize);

#[derive(Clone, Debug)]
pub struct CechComplex {
    pub n: usize,
    /// Basis cells per degree of `filtered.complex`.
    pub cells: Vec<Vec<StratumCell>>,
    pub filtered: FilteredComplex,
    pub cohomological: bool,
}

impl CechComplex {
    pub fn position(&self, degree: usize, cell: &StratumCell) -> Option<usize> {
        self.cells.get(degree)?.iter().position(|c| c == cell)
    }
}

fn positions(cells: &[Vec<StratumCell>]) -> Vec<HashMap<StratumCell, usize>> {
    cells.iter().map(|cs| cs.iter().enumerate().map(|(i, &c)| (c, i)).collect()).collect()
}

fn cell_label(g: &GoodCompData, c: &StratumCell) -> String {
    format!("{{{}}}|{}", g.stratum_names(c.0).join(","), g.complex.simplex(c.1, c.2).iter().join("."))
}

/// Cohomological Čech complex `⊕_{|J|=p} C^q(K_J)` regraded so that
/// `(J, σ)` sits in degree `n - |J| - dim σ` with the differential lowering
/// degree, filtered by `F̂_{-p} = ⊕_{|J| ≥ p}`; and the homological one,
/// `⊕_{|J|=p} C_q(K_J)` in degree `|J| + dim σ`, filtered by `⊕_{|J| ≤ p}`.
pub fn cech_complexes(g: &GoodCompData) -> (CechComplex, CechComplex) {
    let n = g.n();
    let strata = g.strata();
    let mut chosen: BTreeMap<StratumMask, Vec<Vec<usize>>> = BTreeMap::new();
    let mut stratum_boundaries: BTreeMap<StratumMask, ChainComplex> = BTreeMap::new();
    for &j in &strata {
        let (cc, ch) = g.stratum_chain_complex(j);
        chosen.insert(j, ch);
        stratum_boundaries.insert(j, cc);
    }
    let mut co_cells: Vec<Vec<StratumCell>> = vec![Vec::new(); n + 1];
    let mut ho_cells: Vec<Vec<StratumCell>> = vec![Vec::new(); n + 1];
    for (&j, ch) in &chosen {
        let p = j.count_ones() as usize;
        for (d, list) in ch.iter().enumerate() {
            for &i in list {
                co_cells[n - p - d].push((j, d, i));
                ho_cells[p + d].push((j, d, i));
            }
        }
    }
    for c in co_cells.iter_mut().chain(ho_cells.iter_mut()) {
        c.sort();
    }
    let co_pos = positions(&co_cells);
    let ho_pos = positions(&ho_cells);
    // Column of (J, σ) in the J-th stratum complex.
    let local: HashMap<StratumCell, usize> = chosen
        .iter()
        .flat_map(|(&j, ch)| ch.iter().enumerate().flat_map(move |(d, l)| l.iter().enumerate().map(move |(c, &i)| ((j, d, i), c))))
        .collect();

    let mut co_boundary = Vec::new();
    let mut ho_boundary = Vec::new();
    for deg in 0..=n {
        // Cohomological: δ″ = transposed stratum boundary, δ′ = restriction.
        let rows = if deg == 0 { 0 } else { co_cells[deg - 1].len() };
        let mut m = BitMatrix::zeros(rows, co_cells[deg].len());
        if deg > 0 {
            for (col, &(j, d, i)) in co_cells[deg].iter().enumerate() {
                let cc = &stratum_boundaries[&j];
                let up = cc.boundary(d as i32 + 1);
                let me = local[&(j, d, i)];
                for (c, &cof) in chosen[&j].get(d + 1).map(Vec::as_slice).unwrap_or(&[]).iter().enumerate() {
                    if up.get(me, c) {
                        m.flip(co_pos[deg - 1][&(j, d + 1, cof)], col);
                    }
                }
                for b in 0..g.divisor_count() {
                    let bit = 1u64 << b;
                    if j & bit == 0 {
                        if let Some(&row) = co_pos[deg - 1].get(&(j | bit, d, i)) {
                            m.flip(row, col);
                        }
                    }
                }
            }
        }
        co_boundary.push(m);
        // Homological: ∂″ = stratum boundary, ∂′ = inclusion into K_{J∖i}.
        let rows = if deg == 0 { 0 } else { ho_cells[deg - 1].len() };
        let mut m = BitMatrix::zeros(rows, ho_cells[deg].len());
        if deg > 0 {
            for (col, &(j, d, i)) in ho_cells[deg].iter().enumerate() {
                if d > 0 {
                    let down = stratum_boundaries[&j].boundary(d as i32);
                    let me = local[&(j, d, i)];
                    for (c, &face) in chosen[&j][d - 1].iter().enumerate() {
                        if down.get(c, me) {
                            m.flip(ho_pos[deg - 1][&(j, d - 1, face)], col);
                        }
                    }
                }
                for b in 0..g.divisor_count() {
                    let bit = 1u64 << b;
                    if j & bit != 0 {
                        m.flip(ho_pos[deg - 1][&(j & !bit, d, i)], col);
                    }
                }
            }
        }
        ho_boundary.push(m);
    }
    let co_labels = co_cells.iter().map(|cs| cs.iter().map(|c| cell_label(g, c)).collect()).collect();
    let ho_labels = ho_cells.iter().map(|cs| cs.iter().map(|c| cell_label(g, c)).collect()).collect();
    let co = Arc::new(ChainComplex::new(0, co_labels, co_boundary).expect("Čech differential squares to zero"));
    let ho = Arc::new(ChainComplex::new(0, ho_labels, ho_boundary).expect("Čech boundary squares to zero"));
    let co_index: BTreeMap<i32, Vec<i32>> = co_cells
        .iter()
        .enumerate()
        .map(|(deg, cs)| (deg as i32, cs.iter().map(|c| -(c.0.count_ones() as i32)).collect()))
        .collect();
    let ho_index: BTreeMap<i32, Vec<i32>> = ho_cells
        .iter()
        .enumerate()
        .map(|(deg, cs)| (deg as i32, cs.iter().map(|c| c.0.count_ones() as i32).collect()))
        .collect();
    let co_f = FilteredComplex::from_basis_indices(co, &co_index).expect("same complex");
    let ho_f = FilteredComplex::from_basis_indices(ho, &ho_index).expect("same complex");
    (
        CechComplex { n, cells: co_cells, filtered: co_f, cohomological: true },
        CechComplex { n, cells: ho_cells, filtered: ho_f, cohomological: false },
    )
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CechReport {
    /// Total homology of the cohomological complex, by regraded degree.
    pub total_dims: BTreeMap<i32, usize>,
    /// `H_{n-t}(X̄, D)` for each regraded degree `t`.
    pub relative_dims: BTreeMap<i32, usize>,
    /// `H_t(X)` from the complement.
    pub complement_dims: BTreeMap<i32, usize>,
    /// `σ ↦ σ*_J` is a filtered chain isomorphism onto the dual cell complex.
    pub dual_cell_iso: bool,
    /// The homological complex is the transpose of the cohomological one.
    pub transpose_dual: bool,
}

impl CechReport {
    pub fn passed(&self) -> bool {
        self.total_dims == self.relative_dims && self.total_dims == self.complement_dims && self.dual_cell_iso && self.transpose_dual
    }
}

pub fn cech_report(g: &GoodCompData) -> CechReport {
    let n = g.n() as i32;
    let (co, ho) = cech_complexes(g);
    let total_dims = co.filtered.complex.homology_dims();
    let rel = g.relative_chain_complex().homology_dims();
    let relative_dims = (0..=n).map(|t| (t, rel.get(&(n - t)).copied().unwrap_or(0))).collect();
    let comp = g.complement_retract_complex().homology_dims();
    let complement_dims = (0..=n).map(|t| (t, comp.get(&t).copied().unwrap_or(0))).collect();

    let dual = simp::dual_cell_complex(g);
    let mut mats = BTreeMap::new();
    let mut inverse = BTreeMap::new();
    let mut bijective = true;
    for deg in 0..=g.n() {
        let rows = dual.cells[deg].len();
        let cols = co.cells[deg].len();
        bijective &= rows == cols;
        let mut m = BitMatrix::zeros(rows, cols);
        for (c, &(j, d, i)) in co.cells[deg].iter().enumerate() {
            match dual.position(&simp::DualCell { stratum: j, dim: d, simplex: i }) {
                Some(r) => m.set(r, c, true),
                None => bijective = false,
            }
        }
        bijective &= m.rank() == rows.max(cols);
        inverse.insert(deg as i32, m.transpose());
        mats.insert(deg as i32, m);
    }
    let dual_cell_iso = bijective
        && match (
            ChainMap::checked(co.filtered.complex.clone(), dual.complex().clone(), mats),
            ChainMap::checked(dual.complex().clone(), co.filtered.complex.clone(), inverse),
        ) {
            (Ok(f), Ok(h)) => {
                filt::check_filtered_map(&f, &co.filtered, &dual.filtered).is_ok()
                    && filt::check_filtered_map(&h, &dual.filtered, &co.filtered).is_ok()
            }
            _ => false,
        };

    let transpose_dual = (0..=g.n()).all(|m| {
        let t = g.n() - m;
        co.cells[t] == ho.cells[m]
            && (m == 0 || ho.filtered.complex.boundary(m as i32).into_owned() == co.filtered.complex.boundary(t as i32 + 1).transpose())
    });
    CechReport { total_dims, relative_dims, complement_dims, dual_cell_iso, transpose_dual }
}

// ====================================================================
// Gysin complex
// ====================================================================

/// `G_p = ⊕_{|J|=p} H_*(D_J)` read off the dual cell filtration: the term
/// `(p, k)` is `E¹_{-p, k+p}` and the differential is `d¹`.
#[derive(Clone, Debug)]
pub struct GysinComplex {
    pub n: usize,
    /// `(p, k) → dim ⊕_{|J|=p} H_k(D_J)`.
    pub dims: BTreeMap<(usize, i32), usize>,
    /// `(p, k) → [(J, dim H_k(K_J))]` from simplicial homology of each stratum.
    pub strata: BTreeMap<(usize, i32), Vec<(StratumMask, usize)>>,
    /// `(p, k) → matrix G_{p,k} → G_{p+1,k-1}`.
    pub differentials: BTreeMap<(usize, i32), BitMatrix>,
}

impl GysinComplex {
    pub fn dim(&self, p: usize, k: i32) -> usize {
        self.dims.get(&(p, k)).copied().unwrap_or(0)
    }

    pub fn rank(&self, p: usize, k: i32) -> usize {
        self.differentials.get(&(p, k)).map_or(0, BitMatrix::rank)
    }

    pub fn squares_to_zero(&self) -> bool {
        self.differentials.iter().all(|(&(p, k), d)| match self.differentials.get(&(p + 1, k - 1)) {
            Some(next) => next.mul(d).expect("consecutive Gysin maps").is_zero(),
            None => true,
        })
    }

    /// `(p, k) → dim` of the homology of the Gysin complex.
    pub fn homology_dims(&self) -> BTreeMap<(usize, i32), usize> {
        self.dims
            .keys()
            .map(|&(p, k)| {
                let into = if p == 0 { 0 } else { self.rank(p - 1, k + 1) };
                ((p, k), self.dim(p, k) - self.rank(p, k) - into)
            })
            .collect()
    }

    /// Stratum dims summing to a different total than the dual cell term.
    pub fn stratum_mismatches(&self) -> Vec<(usize, i32)> {
        self.dims
            .iter()
            .filter(|(key, &d)| self.strata.get(key).map_or(0, |v| v.iter().map(|x| x.1).sum::<usize>()) != d)
            .map(|(&key, _)| key)
            .collect()
    }

    /// Bidegrees `(p̂, q)` where `E¹`/`d¹` of `ss` differ from this complex
    /// (dims or ranks), using `E¹_{p̂,q} = G_{-p̂, p̂+q}`.
    pub fn page_mismatches(&self, ss: &SpectralSequence) -> Vec<(i32, i32)> {
        let page = ss.page(1.min(ss.pages.len() - 1));
        let mut out = Vec::new();
        for p in 0..=self.n {
            for k in 0..=(self.n - p) as i32 {
                let (ph, q) = (-(p as i32), k + p as i32);
                let e = page.get(ph, q);
                if e.dim != self.dim(p, k) || e.d_rank != self.rank(p, k) {
                    out.push((ph, q));
                }
            }
        }
        for (&(ph, q), e) in &page.entries {
            if e.dim > 0 && (ph > 0 || -ph > self.n as i32) {
                out.push((ph, q));
            }
        }
        out
    }

    /// Bidegrees where `E²` of `ss` differs from the homology of this complex.
    pub fn second_page_mismatches(&self, ss: &SpectralSequence) -> Vec<(i32, i32)> {
        let page = ss.page(2.min(ss.pages.len() - 1));
        self.homology_dims()
            .into_iter()
            .filter(|&((p, k), d)| page.get(-(p as i32), k + p as i32).dim != d)
            .map(|((p, k), _)| (-(p as i32), k + p as i32))
            .collect()
    }
}

pub fn gysin_complex(g: &GoodCompData) -> GysinComplex {
    let n = g.n();
    let dual = simp::dual_cell_complex(g);
    let ss = filt::spectral_sequence(&dual.filtered);
    let page = ss.page(1.min(ss.pages.len() - 1));
    let mut dims = BTreeMap::new();
    let mut differentials = BTreeMap::new();
    let mut strata: BTreeMap<(usize, i32), Vec<(StratumMask, usize)>> = BTreeMap::new();
    for p in 0..=n {
        for k in 0..=(n - p) as i32 {
            let (ph, q) = (-(p as i32), k + p as i32);
            dims.insert((p, k), page.get(ph, q).dim);
            differentials.insert((p, k), filt::differential_matrix(&dual.filtered, 1, ph, q));
        }
    }
    for j in g.strata() {
        let p = j.count_ones() as usize;
        let h = g.stratum_chain_complex(j).0.homology_dims();
        for k in 0..=(n - p) as i32 {
            strata.entry((p, k)).or_default().push((j, h.get(&k).copied().unwrap_or(0)));
        }
    }
    GysinComplex { n, dims, strata, differentials }
}

// ====================================================================
// Gysin maps in simplicial bases
// ====================================================================

/// `⊕_{|J|=p} H_*(K_J)` in simplicial homology bases with the Gysin
/// differential transported from `d¹` of the corner filtration through
/// `ψ_p`.
#[derive(Clone, Debug)]
pub struct SimplicialGysin {
    pub corner: CornerFiltration,
    pub sums: Vec<StratumSum>,
    pub homology: Vec<Homology>,
    /// `(p, k) → H_k(S_p) → H_{k-1}(S_{p+1})`.
    pub differentials: BTreeMap<(usize, i32), BitMatrix>,
}

impl SimplicialGysin {
    pub fn new(g: &GoodCompData) -> Result<Self, CechError> {
        Self::from_corner(corner::corner_complex(g)?)
    }

    pub fn from_corner(corner: CornerFiltration) -> Result<Self, CechError> {
        let g = corner.cut.data.clone();
        let n = g.n();
        let sums: Vec<StratumSum> = (0..=n + 1).map(|p| corner::stratum_sum(&g, p)).collect();
        let homology: Vec<Homology> = sums.iter().map(|s| s.complex.homology()).collect();
        let mut sg = SimplicialGysin { corner, sums, homology, differentials: BTreeMap::new() };
        for p in 0..=n {
            for k in 0..=n as i32 {
                let cols: Vec<BitVector> = sg.homology[p]
                    .representatives(k)
                    .iter()
                    .map(|z| {
                        let lifted = sg.lift(p, k, z);
                        let bd = sg.corner.cut.complex.boundary(k).mul_vec(&lifted);
                        let w = sg.descend(p + 1, k - 1, &bd).expect("d¹ lands one filtration step down");
                        sg.homology[p + 1].class_of(k - 1, &w).expect("d¹ of a class is a cycle")
                    })
                    .collect();
                let m = BitMatrix::from_columns(sg.homology[p + 1].dim(k - 1), &cols).expect("shape");
                sg.differentials.insert((p, k), m);
            }
        }
        Ok(sg)
    }

    /// `ψ_p` of a chain of `S_p`, using the first fiber cell as section.
    pub fn lift(&self, p: usize, k: i32, chain: &BitVector) -> BitVector {
        let x = &self.corner.cut;
        let d = k as usize;
        let mut out = BitVector::zeros(x.cells[d].len());
        for b in chain.ones() {
            let (j, i) = self.sums[p].basis[d][b];
            out.xor_assign(&corner::orbit_sum_through(x, d, i, j, x.fiber(d, i)[0]));
        }
        out
    }

    /// `ψ_p⁻¹` of an element of `F^p C_k(X′)` modulo `F^{p+1}`.
    pub fn descend(&self, p: usize, k: i32, v: &BitVector) -> Option<BitVector> {
        if k < 0 || p >= self.sums.len() {
            return v.is_zero().then(|| BitVector::zeros(0));
        }
        let d = k as usize;
        let basis = &self.sums[p].basis[d];
        let reps: Vec<BitVector> =
            (0..basis.len()).map(|b| self.lift(p, k, &BitVector::singleton(basis.len(), b))).collect();
        if !self.corner.level(d, p).contains(v) {
            return None;
        }
        QuotientBasis::new(self.corner.level(d, p + 1), reps).coordinates(v)
    }

    pub fn rank(&self, p: usize, k: i32) -> usize {
        self.differentials.get(&(p, k)).map_or(0, BitMatrix::rank)
    }
}

// ====================================================================
// Borel–Moore duality
// ====================================================================

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualityEntry {
    pub k: i32,
    pub p: i32,
    pub weight_dim: usize,
    pub bm_weight_dim: usize,
    pub homology_dim: usize,
    pub annihilator_equal: bool,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct DualityReport {
    pub n: usize,
    pub entries: Vec<DualityEntry>,
    /// `k → (p, dim 𝒲_p H^{BM}_k)`.
    pub bm_table: BTreeMap<i32, Vec<(i32, usize)>>,
}

impl DualityReport {
    pub fn passed(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.annihilator_equal && e.weight_dim + e.bm_weight_dim == e.homology_dim)
    }

    pub fn failures(&self) -> Vec<(i32, i32)> {
        self.entries
            .iter()
            .filter(|e| !(e.annihilator_equal && e.weight_dim + e.bm_weight_dim == e.homology_dim))
            .map(|e| (e.k, e.p))
            .collect()
    }
}

/// Borel–Moore weight table: décalage of the homological Čech complex.
pub fn borel_moore_weights(g: &GoodCompData) -> WeightTable {
    let (_, ho) = cech_complexes(g);
    filt::homology_filtration(&filt::decalage(&ho.filtered))
}

/// Checks `𝒲_p H_k = Ann(𝒲_{-p-n-1} H^{BM}_{n-k})` under the pairing of dual
/// cells with Čech cells, where `𝒲` on `H_k` comes from the corner complex of
/// the subdivision through `φ`.
pub fn duality_report(g: &GoodCompData) -> Result<DualityReport, CechError> {
    let n = g.n() as i32;
    let phi = corner::cellular_pullback_phi(g)?;
    let corner_weights = filt::homology_filtration(&filt::decalage(&phi.corner.filtered));
    let h_dual = phi.dual.complex().homology();
    let (_, ho) = cech_complexes(g);
    let bm = filt::homology_filtration(&filt::decalage(&ho.filtered));
    let mut entries = Vec::new();
    for k in 0..=n {
        let phi_k = phi.map.on_homology(k, &h_dual, &corner_weights.homology);
        let hk = h_dual.dim(k);
        let m = n - k;
        // ⟨σ*_J, τ_J⟩ = 1 exactly when the cells agree.
        let dual_cells = &phi.dual.cells[k as usize];
        let ho_pos: HashMap<StratumCell, usize> =
            ho.cells[m as usize].iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let bm_reps = bm.homology.representatives(m);
        let rows: Vec<BitVector> = h_dual
            .representatives(k)
            .iter()
            .map(|a| {
                BitVector::from_bools(
                    &bm_reps
                        .iter()
                        .map(|b| {
                            a.ones().filter(|&i| {
                                let c = dual_cells[i];
                                b.get(ho_pos[&(c.stratum, c.dim, c.simplex)])
                            })
                            .count()
                                % 2
                                == 1
                        })
                        .collect::<Vec<_>>(),
                )
            })
            .collect();
        let pairing = BitMatrix::from_rows(bm_reps.len(), rows).expect("shape");
        if pairing.rows() != pairing.cols() || pairing.rank() != hk {
            return Err(CechError::SingularPairing(k));
        }
        for p in -2 * n - 2..=1 {
            let weight = Subspace::full(hk).preimage(&phi_k, &corner_weights.subspace(k, p)).expect("shape");
            let bm_sub = bm.subspace(m, -p - n - 1);
            let ann = bm_sub.annihilator(&pairing).expect("shape");
            entries.push(DualityEntry {
                k,
                p,
                weight_dim: weight.dim(),
                bm_weight_dim: bm_sub.dim(),
                homology_dim: hk,
                annihilator_equal: ann == weight,
            });
        }
    }
    let bm_table = bm.rows(-n - 1, n);
    Ok(DualityReport { n: g.n(), entries, bm_table })
}

// ====================================================================
// Weighted pushforward
// ====================================================================

/// Exponents `a_ij`; rows are source divisors, columns target divisors.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PushforwardSpec {
    pub exponents: Vec<Vec<u32>>,
}

impl PushforwardSpec {
    pub fn identity(n: usize) -> Self {
        Self { exponents: (0..n).map(|i| (0..n).map(|j| u32::from(i == j)).collect()).collect() }
    }

    /// The torus homomorphism `g ↦ (Π_i g_i^{a_ij})_j` as a matrix acting on
    /// exponent vectors.
    pub fn torus_hom(&self, source: usize, target: usize) -> TorusHom {
        let mut m = BitMatrix::zeros(target, source);
        for i in 0..source {
            for j in 0..target {
                m.set(j, i, self.exponents[i][j] % 2 == 1);
            }
        }
        TorusHom::new(m)
    }
}

fn subset_mask(s: &[usize]) -> StratumMask {
    s.iter().fold(0, |acc, &b| acc | 1 << b)
}

/// `a_IJ` for all `|I| = |J| = p`, from the graded torus matrix.
pub fn weight_coefficients(spec: &PushforwardSpec, source: usize, target: usize, p: usize) -> HashMap<(StratumMask, StratumMask), bool> {
    let gm = torus::graded_matrix(&spec.torus_hom(source, target), p);
    let rows = TorusAlgebra::coordinate_sets(target, p);
    let cols = TorusAlgebra::coordinate_sets(source, p);
    let mut out = HashMap::new();
    for (r, jset) in rows.iter().enumerate() {
        for (c, iset) in cols.iter().enumerate() {
            out.insert((subset_mask(iset), subset_mask(jset)), gm.get(r, c));
        }
    }
    out
}

/// Vertex sets of the connected components of `K_I`.
fn stratum_components(g: &GoodCompData, mask: StratumMask) -> Vec<Vec<usize>> {
    let member = g.stratum_member(mask);
    let mut parent: Vec<usize> = (0..g.complex.vertex_count()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (i, e) in g.complex.simplices(1).iter().enumerate() {
        if member[1][i] {
            let (a, b) = (find(&mut parent, e[0]), find(&mut parent, e[1]));
            parent[a] = b;
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, s) in g.complex.simplices(0).iter().enumerate() {
        if member[0][i] {
            let r = find(&mut parent, s[0]);
            groups.entry(r).or_default().push(s[0]);
        }
    }
    groups.into_values().collect()
}

#[derive(Clone, Debug)]
pub struct GysinMorphism {
    pub source: SimplicialGysin,
    pub target: SimplicialGysin,
    /// Chain-level maps `S_p → S′_p`.
    pub chain_maps: Vec<ChainMap>,
    /// `(p, k) →` induced map on homology.
    pub maps: BTreeMap<(usize, i32), BitMatrix>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PushforwardReport {
    /// `(p, k)` where the morphism fails to commute with the Gysin maps.
    pub chain_map_failures: Vec<(usize, i32)>,
    /// Stratum pairs where a nonzero `a_ij` or `a_IJ` contradicts the incidence.
    pub inconsistencies: Vec<String>,
    /// Both conditions of the homology-pushforward criterion hold.
    pub pushforward_hypotheses: bool,
    /// `(p, k)` where the morphism differs from the plain homology pushforward
    /// (only computed under the hypotheses).
    pub pushforward_mismatches: Vec<(usize, i32)>,
    /// `(p, k)` where the corner-level map on `Ê¹` disagrees.
    pub corner_mismatches: Vec<(usize, i32)>,
}

impl PushforwardReport {
    pub fn passed(&self) -> bool {
        self.chain_map_failures.is_empty()
            && self.inconsistencies.is_empty()
            && self.pushforward_mismatches.is_empty()
            && self.corner_mismatches.is_empty()
    }
}

/// For the component of `K_I` on `verts`: whether every simplex lands in
/// `K′_J`, whether some does, and the top dimension of those that do.
fn maps_into(
    f: &SimplicialMap,
    src: &GoodCompData,
    i_mask: StratumMask,
    verts: &[usize],
    tgt: &GoodCompData,
    j: StratumMask,
) -> (bool, bool, i32) {
    let (mut all, mut any, mut top) = (true, false, -1);
    for d in 0..=src.n() {
        for (i, s) in src.complex.simplices(d).iter().enumerate() {
            if src.mask(d, i) & i_mask != i_mask || verts.binary_search(&s[0]).is_err() {
                continue;
            }
            let im = f.image(s);
            let inside = tgt.mask_of(&im) & j == j;
            if inside {
                any = true;
                top = top.max(d as i32);
            } else {
                all = false;
            }
        }
    }
    (all, any, top)
}

/// Builds `f_p|D_I⁰ = ⊕_J a_IJ (f_IJ⁰)_*` and checks it against both Gysin
/// differentials, the incidence constraints on the exponents, the
/// homology-pushforward criterion and the corner map `f′`.
pub fn weighted_pushforward(
    f: &SimplicialMap,
    source: &GoodCompData,
    target: &GoodCompData,
    spec: &PushforwardSpec,
) -> Result<(GysinMorphism, PushforwardReport), CechError> {
    let (ns, nt) = (source.divisor_count(), target.divisor_count());
    let found = (spec.exponents.len(), spec.exponents.first().map_or(nt, Vec::len));
    if found != (ns, nt) || spec.exponents.iter().any(|r| r.len() != nt) {
        return Err(CechError::Shape { expected: (ns, nt), found });
    }
    f.check(&source.complex, &target.complex).map_err(|e| CechError::Map(e.to_string()))?;
    let src = SimplicialGysin::new(source)?;
    let tgt = SimplicialGysin::new(target)?;
    let n = source.n();
    let mut report = PushforwardReport { pushforward_hypotheses: true, ..Default::default() };

    // Exponent a_ij must vanish when D_i misses f⁻¹(E_j).
    for i in 0..ns {
        for j in 0..nt {
            if spec.exponents[i][j] != 0 {
                let meets = source.divisor_maximal(i).iter().any(|s| {
                    (1..=s.len()).any(|size| {
                        s.iter().copied().combinations(size).any(|face| target.mask_of(&f.image(&face)) >> j & 1 == 1)
                    })
                });
                if !meets {
                    report.inconsistencies.push(format!(
                        "a[{}][{}] = {} but {} misses the preimage of {}",
                        source.divisor_names[i], target.divisor_names[j], spec.exponents[i][j], source.divisor_names[i], target.divisor_names[j]
                    ));
                }
            }
        }
    }

    let mut chain_maps = Vec::new();
    let mut plain_maps = Vec::new();
    for p in 0..=n {
        let coeff = weight_coefficients(spec, ns, nt, p);
        let ss = &src.sums[p];
        let ts = &tgt.sums[p];
        let t_pos: Vec<HashMap<(StratumMask, usize), usize>> =
            ts.basis.iter().map(|b| b.iter().enumerate().map(|(q, &x)| (x, q)).collect()).collect();
        let mut weighted: BTreeMap<i32, BitMatrix> = BTreeMap::new();
        let mut plain: BTreeMap<i32, BitMatrix> = BTreeMap::new();
        for d in 0..=n {
            weighted.insert(d as i32, BitMatrix::zeros(ts.complex.dim(d as i32), ss.complex.dim(d as i32)));
            plain.insert(d as i32, BitMatrix::zeros(ts.complex.dim(d as i32), ss.complex.dim(d as i32)));
        }
        let i_strata: Vec<StratumMask> = source.strata().into_iter().filter(|m| m.count_ones() as usize == p).collect();
        let j_strata: Vec<StratumMask> = target.strata().into_iter().filter(|m| m.count_ones() as usize == p).collect();
        for &im in &i_strata {
            let dim_i = (n - p) as i32;
            for comp in stratum_components(source, im) {
                for &jm in &j_strata {
                    let a = coeff.get(&(im, jm)).copied().unwrap_or(false);
                    let (all, any, top) = maps_into(f, source, im, &comp, target, jm);
                    if !(all && a || top < dim_i) {
                        report.pushforward_hypotheses = false;
                    }
                    if a && any && !all {
                        report.inconsistencies.push(format!(
                            "a_IJ = 1 for I = {{{}}}, J = {{{}}} but a component of D_I meets f⁻¹(E_J) without lying in it",
                            source.stratum_names(im).join(","),
                            target.stratum_names(jm).join(",")
                        ));
                    }
                    if !all {
                        continue;
                    }
                    for d in 0..=n {
                        for (col, &(bj, i)) in ss.basis[d].iter().enumerate() {
                            if bj != im || !comp.binary_search(&source.complex.simplex(d, i)[0]).is_ok() {
                                continue;
                            }
                            let image = f.image(source.complex.simplex(d, i));
                            if image.len() != d + 1 {
                                continue;
                            }
                            let ti = target.complex.index(&image).expect("checked map");
                            let row = t_pos[d][&(jm, ti)];
                            plain.get_mut(&(d as i32)).unwrap().flip(row, col);
                            if a {
                                weighted.get_mut(&(d as i32)).unwrap().flip(row, col);
                            }
                        }
                    }
                }
            }
        }
        chain_maps.push(ChainMap::checked(ss.complex.clone(), ts.complex.clone(), weighted)?);
        plain_maps.push(ChainMap::checked(ss.complex.clone(), ts.complex.clone(), plain)?);
    }

    let mut maps = BTreeMap::new();
    for p in 0..=n {
        for k in 0..=n as i32 {
            maps.insert((p, k), chain_maps[p].on_homology(k, &src.homology[p], &tgt.homology[p]));
        }
    }
    for p in 0..n {
        for k in 1..=n as i32 {
            let lhs = tgt.differentials.get(&(p, k)).cloned().unwrap_or_else(|| BitMatrix::zeros(0, 0));
            let lhs = lhs.mul(&maps[&(p, k)]).expect("shape");
            let rhs = maps[&(p + 1, k - 1)].mul(&src.differentials[&(p, k)]).expect("shape");
            if lhs != rhs {
                report.chain_map_failures.push((p, k));
            }
        }
    }
    if report.pushforward_hypotheses {
        for p in 0..=n {
            for k in 0..=n as i32 {
                if plain_maps[p].on_homology(k, &src.homology[p], &tgt.homology[p]) != maps[&(p, k)] {
                    report.pushforward_mismatches.push((p, k));
                }
            }
        }
    }
    // Ê¹-level map of f′.
    match corner::induced_map(f, &src.corner.cut, &tgt.corner.cut) {
        Ok(fp) => {
            for p in 0..=n {
                for k in 0..=n as i32 {
                    let m = fp.matrix(k);
                    let ok = src.homology[p].representatives(k).iter().enumerate().all(|(c, z)| {
                        let y = m.mul_vec(&src.lift(p, k, z));
                        match tgt.descend(p, k, &y) {
                            Some(w) => tgt.homology[p].class_of(k, &w).as_ref() == Some(&maps[&(p, k)].column(c)),
                            None => false,
                        }
                    });
                    if !ok {
                        report.corner_mismatches.push((p, k));
                    }
                }
            }
        }
        Err(e) => report.inconsistencies.push(format!("corner map rejected: {e}")),
    }
    Ok((GysinMorphism { source: src, target: tgt, chain_maps, maps }, report))
}

// ====================================================================
// Gysin maps of closed manifolds by Poincaré duality
// ====================================================================

/// `z ↦ z ∩ φ` summed over the top simplices: `φ([v_0..v_j])·[v_j..v_m]`.
fn cap_with_fundamental(k: &SimplicialComplex, j: usize, cochain: &BitVector) -> BitVector {
    let m = k.dim() as usize;
    let mut out = BitVector::zeros(k.count(m - j));
    for top in k.simplices(m) {
        let front = &top[..=j];
        if cochain.get(k.index(front).expect("face")) {
            out.flip(k.index(&top[j..]).expect("face"));
        }
    }
    out
}

/// Matrix inverse over Z₂, if square and invertible.
pub fn invert(m: &BitMatrix) -> Option<BitMatrix> {
    if m.rows() != m.cols() || m.rank() != m.rows() {
        return None;
    }
    let qb = QuotientBasis::new(&Subspace::zero(m.rows()), m.columns());
    let cols: Vec<BitVector> =
        (0..m.rows()).map(|i| qb.coordinates(&BitVector::singleton(m.rows(), i)).expect("invertible")).collect();
    Some(BitMatrix::from_columns(m.cols(), &cols).expect("shape"))
}

/// Homology and Poincaré duality data of a closed Z₂-manifold triangulation.
pub struct ClosedManifold {
    pub complex: SimplicialComplex,
    pub homology: Homology,
    pub cohomology: Homology,
    /// `j → H^j → H_{m-j}`, inverted.
    dual_inverse: BTreeMap<i32, BitMatrix>,
}

impl ClosedManifold {
    pub fn new(complex: SimplicialComplex) -> Result<Self, CechError> {
        let cc = complex.chain_complex();
        let homology = cc.homology();
        let cohomology = cc.dualize().homology();
        let m = complex.dim();
        let mut dual_inverse = BTreeMap::new();
        for j in 0..=m {
            let cols: Vec<BitVector> = cohomology
                .representatives(-j)
                .iter()
                .map(|phi| homology.class_of(m - j, &cap_with_fundamental(&complex, j as usize, phi)))
                .collect::<Option<_>>()
                .ok_or(CechError::NotClosedManifold(j))?;
            let pd = BitMatrix::from_columns(homology.dim(m - j), &cols).expect("shape");
            dual_inverse.insert(j, invert(&pd).ok_or(CechError::NotClosedManifold(j))?);
        }
        Ok(Self { complex, homology, cohomology, dual_inverse })
    }

    pub fn dim(&self) -> i32 {
        self.complex.dim()
    }
}

/// `f_*` on homology in degree `k`.
pub fn homology_pushforward(f: &SimplicialMap, x: &ClosedManifold, y: &ClosedManifold, k: i32) -> BitMatrix {
    f.chain_map(&x.complex, &y.complex).on_homology(k, &x.homology, &y.homology)
}

/// `f^! = PD_X ∘ f^* ∘ PD_Y⁻¹ : H_k(Y) → H_{k + dim X - dim Y}(X)`.
pub fn poincare_gysin(f: &SimplicialMap, x: &ClosedManifold, y: &ClosedManifold, k: i32) -> BitMatrix {
    let (mx, my) = (x.dim(), y.dim());
    let j = my - k;
    let out_deg = k + mx - my;
    let rows = if out_deg >= 0 { x.homology.dim(out_deg) } else { 0 };
    if j < 0 || j > mx || out_deg < 0 || y.homology.dim(k) == 0 {
        return BitMatrix::zeros(rows, y.homology.dim(k));
    }
    let chain = f.chain_map(&x.complex, &y.complex);
    let pull = chain.matrix(j).transpose();
    let inv = &y.dual_inverse[&j];
    let cols: Vec<BitVector> = (0..y.homology.dim(k))
        .map(|c| {
            let coords = inv.column(c);
            let mut cocycle = BitVector::zeros(y.complex.count(j as usize));
            for i in coords.ones() {
                cocycle.xor_assign(&y.cohomology.representatives(-j)[i]);
            }
            let pulled = pull.mul_vec(&cocycle);
            x.homology
                .class_of(out_deg, &cap_with_fundamental(&x.complex, j as usize, &pulled))
                .expect("cap of a cocycle")
        })
        .collect();
    BitMatrix::from_columns(rows, &cols).expect("shape")
}
