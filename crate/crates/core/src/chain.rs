//! Bounded chain complexes over Z₂, chain maps, cubical diagrams and their
//! total complexes.

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::gf2::{BitMatrix, BitVector, QuotientBasis, Subspace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChainError {
    #[error("boundary in degree {degree} has shape {found:?}, expected {expected:?}")]
    Shape { degree: i32, expected: (usize, usize), found: (usize, usize) },
    #[error("boundary squares to a nonzero map in degree {degree}")]
    BoundarySquare { degree: i32 },
    #[error("chain map does not commute with boundaries in degree {degree}")]
    NotChainMap { degree: i32 },
    #[error("chain map in degree {degree} has shape {found:?}, expected {expected:?}")]
    MapShape { degree: i32, expected: (usize, usize), found: (usize, usize) },
    #[error("cube diagram: {0}")]
    Cube(String),
}

/// A bounded complex `C_lo ← … ← C_hi` with labelled bases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainComplex {
    lo: i32,
    labels: Vec<Vec<String>>,
    boundary: Vec<BitMatrix>,
}

impl ChainComplex {
    /// `labels[i]` and `boundary[i]` describe degree `lo + i`; `boundary[i]`
    /// maps degree `lo + i` to degree `lo + i - 1`.
    pub fn new(lo: i32, labels: Vec<Vec<String>>, boundary: Vec<BitMatrix>) -> Result<Self, ChainError> {
        let c = Self::new_unchecked(lo, labels, boundary)?;
        c.check_square_zero()?;
        Ok(c)
    }

    /// Shape-checked construction without the `∂∂ = 0` test.
    pub fn new_unchecked(lo: i32, labels: Vec<Vec<String>>, boundary: Vec<BitMatrix>) -> Result<Self, ChainError> {
        assert_eq!(labels.len(), boundary.len(), "labels and boundaries must cover the same degrees");
        for (i, m) in boundary.iter().enumerate() {
            let below = if i == 0 { 0 } else { labels[i - 1].len() };
            let expected = (below, labels[i].len());
            if (m.rows(), m.cols()) != expected {
                return Err(ChainError::Shape { degree: lo + i as i32, expected, found: (m.rows(), m.cols()) });
            }
        }
        Ok(Self { lo, labels, boundary })
    }

    pub fn zero() -> Self {
        Self { lo: 0, labels: Vec::new(), boundary: Vec::new() }
    }

    /// Builds from dimensions with generated labels.
    pub fn from_dims(lo: i32, dims: &[usize], boundary: Vec<BitMatrix>) -> Result<Self, ChainError> {
        let labels = dims.iter().map(|&d| (0..d).map(|i| format!("e{i}")).collect()).collect();
        Self::new(lo, labels, boundary)
    }

    pub fn lo(&self) -> i32 {
        self.lo
    }

    /// Highest stored degree (`lo - 1` when empty).
    pub fn hi(&self) -> i32 {
        self.lo + self.labels.len() as i32 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi()
    }

    fn idx(&self, k: i32) -> Option<usize> {
        (k >= self.lo && k <= self.hi()).then(|| (k - self.lo) as usize)
    }

    pub fn dim(&self, k: i32) -> usize {
        self.idx(k).map_or(0, |i| self.labels[i].len())
    }

    pub fn labels(&self, k: i32) -> &[String] {
        self.idx(k).map_or(&[], |i| &self.labels[i])
    }

    /// `∂_k : C_k → C_{k-1}`.
    pub fn boundary(&self, k: i32) -> Cow<'_, BitMatrix> {
        match self.idx(k) {
            Some(i) => Cow::Borrowed(&self.boundary[i]),
            None => Cow::Owned(BitMatrix::zeros(self.dim(k - 1), self.dim(k))),
        }
    }

    pub fn total_dim(&self) -> usize {
        self.labels.iter().map(Vec::len).sum()
    }

    pub fn check_square_zero(&self) -> Result<(), ChainError> {
        for k in self.lo + 1..=self.hi() {
            let comp = self.boundary(k - 1).mul(&self.boundary(k)).expect("shapes checked");
            if !comp.is_zero() {
                return Err(ChainError::BoundarySquare { degree: k });
            }
        }
        Ok(())
    }

    pub fn cycles(&self, k: i32) -> Subspace {
        Subspace::full(self.dim(k)).preimage(&self.boundary(k), &Subspace::zero(self.dim(k - 1))).expect("shape")
    }

    pub fn boundaries(&self, k: i32) -> Subspace {
        Subspace::full(self.dim(k + 1)).image(&self.boundary(k + 1)).expect("shape")
    }

    pub fn homology(&self) -> Homology {
        let degrees = self
            .degrees()
            .map(|k| {
                let cycles = self.cycles(k);
                let boundaries = self.boundaries(k);
                let basis = QuotientBasis::of(&cycles, &boundaries);
                HomologyDegree { cycles, boundaries, basis }
            })
            .collect();
        Homology { lo: self.lo, degrees }
    }

    pub fn homology_dims(&self) -> BTreeMap<i32, usize> {
        self.degrees()
            .map(|k| {
                let z = self.dim(k) - self.boundary(k).rank();
                let b = self.boundary(k + 1).rank();
                (k, z - b)
            })
            .collect()
    }

    pub fn is_acyclic(&self) -> bool {
        self.homology_dims().values().all(|&d| d == 0)
    }

    /// Cochain complex regraded as a chain complex: degree `-k` holds the
    /// dual of `C_k` and the boundary is the transposed coboundary.
    pub fn dualize(&self) -> ChainComplex {
        if self.labels.is_empty() {
            return ChainComplex::zero();
        }
        let hi = self.hi();
        let mut labels = Vec::new();
        let mut boundary = Vec::new();
        for d in -hi..=-self.lo {
            let k = -d;
            labels.push(self.labels(k).iter().map(|l| format!("{l}*")).collect());
            // (C^∨)_{-k} → (C^∨)_{-k-1} is ∂_{k+1}ᵀ.
            if d == -hi {
                boundary.push(BitMatrix::zeros(0, self.dim(k)));
            } else {
                boundary.push(self.boundary(k + 1).transpose());
            }
        }
        ChainComplex::new_unchecked(-hi, labels, boundary).expect("dual shapes")
    }

    /// Restriction to the degree window `[lo, hi]` (zero outside).
    pub fn with_range(&self, lo: i32, hi: i32) -> ChainComplex {
        let labels: Vec<Vec<String>> = (lo..=hi).map(|k| self.labels(k).to_vec()).collect();
        let boundary = (lo..=hi)
            .map(|k| if k == lo { BitMatrix::zeros(0, self.dim(k)) } else { self.boundary(k).into_owned() })
            .collect();
        ChainComplex::new_unchecked(lo, labels, boundary).expect("window shapes")
    }
}

#[derive(Clone, Debug)]
pub struct HomologyDegree {
    pub cycles: Subspace,
    pub boundaries: Subspace,
    /// Representatives: cycles completing a basis of the boundaries.
    pub basis: QuotientBasis,
}

#[derive(Clone, Debug)]
pub struct Homology {
    lo: i32,
    degrees: Vec<HomologyDegree>,
}

impl Homology {
    pub fn degree(&self, k: i32) -> Option<&HomologyDegree> {
        if k < self.lo {
            return None;
        }
        self.degrees.get((k - self.lo) as usize)
    }

    pub fn dim(&self, k: i32) -> usize {
        self.degree(k).map_or(0, |d| d.basis.dim())
    }

    pub fn representatives(&self, k: i32) -> &[BitVector] {
        self.degree(k).map_or(&[], |d| d.basis.reps())
    }

    /// Coordinates of the class of a cycle in the representative basis.
    pub fn class_of(&self, k: i32, cycle: &BitVector) -> Option<BitVector> {
        match self.degree(k) {
            Some(d) if d.cycles.contains(cycle) => d.basis.coordinates(cycle),
            Some(_) => None,
            None => cycle.is_zero().then(|| BitVector::zeros(0)),
        }
    }

    /// Subspace of `H_k` spanned by the classes of the given cycles.
    pub fn classes_span(&self, k: i32, cycles: &[BitVector]) -> Subspace {
        let coords: Vec<BitVector> =
            cycles.iter().map(|c| self.class_of(k, c).expect("vector is not a cycle")).collect();
        Subspace::span_owned(self.dim(k), coords)
    }
}

// ====================================================================
// Chain maps
// ====================================================================

#[derive(Clone, Debug)]
pub struct ChainMap {
    pub source: Arc<ChainComplex>,
    pub target: Arc<ChainComplex>,
    matrices: BTreeMap<i32, BitMatrix>,
}

impl ChainMap {
    /// Unchecked construction; missing degrees are zero maps.
    pub fn new(
        source: Arc<ChainComplex>,
        target: Arc<ChainComplex>,
        matrices: BTreeMap<i32, BitMatrix>,
    ) -> Result<Self, ChainError> {
        for (&k, m) in &matrices {
            let expected = (target.dim(k), source.dim(k));
            if (m.rows(), m.cols()) != expected {
                return Err(ChainError::MapShape { degree: k, expected, found: (m.rows(), m.cols()) });
            }
        }
        Ok(Self { source, target, matrices })
    }

    pub fn checked(
        source: Arc<ChainComplex>,
        target: Arc<ChainComplex>,
        matrices: BTreeMap<i32, BitMatrix>,
    ) -> Result<Self, ChainError> {
        let f = Self::new(source, target, matrices)?;
        f.check()?;
        Ok(f)
    }

    pub fn identity(c: Arc<ChainComplex>) -> Self {
        let matrices = c.degrees().map(|k| (k, BitMatrix::identity(c.dim(k)))).collect();
        Self { source: c.clone(), target: c, matrices }
    }

    pub fn matrix(&self, k: i32) -> Cow<'_, BitMatrix> {
        match self.matrices.get(&k) {
            Some(m) => Cow::Borrowed(m),
            None => Cow::Owned(BitMatrix::zeros(self.target.dim(k), self.source.dim(k))),
        }
    }

    fn degree_span(&self) -> (i32, i32) {
        (self.source.lo().min(self.target.lo()), self.source.hi().max(self.target.hi()))
    }

    /// `f_{k-1} ∂_k = ∂_k f_k` in every degree.
    pub fn check(&self) -> Result<(), ChainError> {
        let (lo, hi) = self.degree_span();
        for k in lo..=hi + 1 {
            let left = self.matrix(k - 1).mul(&self.source.boundary(k)).expect("shape");
            let right = self.target.boundary(k).mul(&self.matrix(k)).expect("shape");
            if left != right {
                return Err(ChainError::NotChainMap { degree: k });
            }
        }
        Ok(())
    }

    pub fn compose(&self, first: &ChainMap) -> ChainMap {
        let (lo, hi) = (first.source.lo().min(self.target.lo()), first.source.hi().max(self.target.hi()));
        let matrices = (lo..=hi).map(|k| (k, self.matrix(k).mul(&first.matrix(k)).expect("shape"))).collect();
        ChainMap { source: first.source.clone(), target: self.target.clone(), matrices }
    }

    pub fn mapping_cone(&self) -> ChainComplex {
        let mut nodes = BTreeMap::new();
        nodes.insert(0u32, self.target.clone());
        nodes.insert(1u32, self.source.clone());
        let mut arrows = BTreeMap::new();
        arrows.insert((1u32, 0u32), self.clone());
        CubeDiagram { nodes, arrows }.total_complex().expect("cone of a chain map")
    }

    /// Induced map on homology in the representative bases.
    pub fn on_homology(&self, k: i32, hs: &Homology, ht: &Homology) -> BitMatrix {
        let m = self.matrix(k);
        let cols: Vec<BitVector> = hs
            .representatives(k)
            .iter()
            .map(|z| ht.class_of(k, &m.mul_vec(z)).expect("image of a cycle is a cycle"))
            .collect();
        BitMatrix::from_columns(ht.dim(k), &cols).expect("shape")
    }

    pub fn is_quasi_iso(&self) -> bool {
        self.mapping_cone().is_acyclic()
    }
}

// ====================================================================
// Cubical diagrams
// ====================================================================

/// Nodes indexed by subsets (bitmasks) of a finite index set; an arrow goes
/// from every node `S′` to every node `S = S′ ∖ {i}` present in the diagram.
/// Node `S` sits in total-complex shift `|S| - min |S|`.
#[derive(Clone, Debug, Default)]
pub struct CubeDiagram {
    pub nodes: BTreeMap<u32, Arc<ChainComplex>>,
    pub arrows: BTreeMap<(u32, u32), ChainMap>,
}

impl CubeDiagram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn base_cardinality(&self) -> u32 {
        self.nodes.keys().map(|m| m.count_ones()).min().unwrap_or(0)
    }

    pub fn shift(&self, mask: u32) -> i32 {
        (mask.count_ones() - self.base_cardinality()) as i32
    }

    /// Nodes in total-complex block order.
    pub fn ordered_nodes(&self) -> Vec<u32> {
        let mut v: Vec<u32> = self.nodes.keys().copied().collect();
        v.sort_by_key(|&m| (m.count_ones(), m));
        v
    }

    pub fn validate(&self) -> Result<(), ChainError> {
        for (&(s, t), f) in &self.arrows {
            if !self.nodes.contains_key(&s) || !self.nodes.contains_key(&t) {
                return Err(ChainError::Cube(format!("arrow {s:#b}->{t:#b} has a missing endpoint")));
            }
            if t & !s != 0 || (s & !t).count_ones() != 1 {
                return Err(ChainError::Cube(format!("arrow {s:#b}->{t:#b} is not a codimension-one inclusion")));
            }
            if !same(&f.source, &self.nodes[&s]) || !same(&f.target, &self.nodes[&t]) {
                return Err(ChainError::Cube(format!("arrow {s:#b}->{t:#b} has mismatched endpoints")));
            }
            f.check()?;
        }
        for &s in self.nodes.keys() {
            for i in 0..32 {
                let t = s & !(1 << i);
                if s & (1 << i) != 0 && self.nodes.contains_key(&t) && !self.arrows.contains_key(&(s, t)) {
                    return Err(ChainError::Cube(format!("missing arrow {s:#b}->{t:#b}")));
                }
            }
        }
        // Every square of arrows commutes.
        for &s in self.nodes.keys() {
            let bits: Vec<u32> = (0..32).filter(|i| s & (1 << i) != 0).collect();
            for (a, &i) in bits.iter().enumerate() {
                for &j in &bits[a + 1..] {
                    let (si, sj, sij) = (s & !(1 << i), s & !(1 << j), s & !(1 << i) & !(1 << j));
                    if !self.nodes.contains_key(&sij) {
                        continue;
                    }
                    let paths = [(si, (s, si), (si, sij)), (sj, (s, sj), (sj, sij))];
                    let comps: Vec<Option<ChainMap>> = paths
                        .iter()
                        .map(|(mid, e1, e2)| {
                            self.nodes.contains_key(mid).then(|| self.arrows[e2].compose(&self.arrows[e1]))
                        })
                        .collect();
                    if let (Some(x), Some(y)) = (&comps[0], &comps[1]) {
                        let (lo, hi) = (x.source.lo(), x.source.hi());
                        if (lo..=hi).any(|k| x.matrix(k) != y.matrix(k)) {
                            return Err(ChainError::Cube(format!("square at {s:#b} over {sij:#b} does not commute")));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Block offsets of each node inside total degree `k`.
    pub fn block_layout(&self, k: i32) -> Vec<(u32, i32, usize)> {
        let mut off = 0;
        let mut out = Vec::new();
        for m in self.ordered_nodes() {
            let l = k - self.shift(m);
            out.push((m, l, off));
            off += self.nodes[&m].dim(l);
        }
        out
    }

    pub fn total_degree_range(&self) -> (i32, i32) {
        let lo = self.nodes.iter().map(|(&m, c)| c.lo() + self.shift(m)).min().unwrap_or(0);
        let hi = self.nodes.iter().map(|(&m, c)| c.hi() + self.shift(m)).max().unwrap_or(-1);
        (lo, hi)
    }

    /// Total complex: degree `k` is `⊕_S C_{k - shift(S)}(S)`, differential is
    /// the internal boundary plus the sum of all arrows.
    pub fn total_complex(&self) -> Result<ChainComplex, ChainError> {
        self.validate()?;
        let (lo, hi) = self.total_degree_range();
        if hi < lo {
            return Ok(ChainComplex::zero());
        }
        let mut labels = Vec::new();
        let mut boundary = Vec::new();
        for k in lo..=hi {
            let layout = self.block_layout(k);
            let mut lab = Vec::new();
            for &(m, l, _) in &layout {
                lab.extend(self.nodes[&m].labels(l).iter().map(|s| format!("{m}:{s}")));
            }
            let below = self.block_layout(k - 1);
            let rows: usize = below.iter().map(|&(m, l, _)| self.nodes[&m].dim(l)).sum();
            let mut d = BitMatrix::zeros(if k == lo { 0 } else { rows }, lab.len());
            if k > lo {
                let offset_of = |m: u32| below.iter().find(|b| b.0 == m).map(|b| b.2).unwrap();
                for &(m, l, col_off) in &layout {
                    let node = &self.nodes[&m];
                    let inner = node.boundary(l);
                    let row_off = offset_of(m);
                    for i in 0..inner.rows() {
                        for j in inner.row(i).ones() {
                            d.flip(row_off + i, col_off + j);
                        }
                    }
                    for ((s, t), f) in self.arrows.range((m, 0)..=(m, u32::MAX)) {
                        debug_assert_eq!(*s, m);
                        let fm = f.matrix(l);
                        let row_off = offset_of(*t);
                        for i in 0..fm.rows() {
                            for j in fm.row(i).ones() {
                                d.flip(row_off + i, col_off + j);
                            }
                        }
                    }
                }
            }
            labels.push(lab);
            boundary.push(d);
        }
        ChainComplex::new(lo, labels, boundary)
    }
}

fn same(a: &Arc<ChainComplex>, b: &Arc<ChainComplex>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle() -> ChainComplex {
        let d1 = BitMatrix::from_dense(3, 3, &[vec![1, 0, 1], vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        ChainComplex::from_dims(0, &[3, 3], vec![BitMatrix::zeros(0, 3), d1]).unwrap()
    }

    #[test]
    fn circle_homology() {
        let dims = circle().homology_dims();
        assert_eq!(dims[&0], 1);
        assert_eq!(dims[&1], 1);
    }

    #[test]
    fn cone_of_identity_is_acyclic() {
        let c = Arc::new(circle());
        assert!(ChainMap::identity(c).mapping_cone().is_acyclic());
    }
}
