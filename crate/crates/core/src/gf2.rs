//! Bit-packed linear algebra over the two-element field.
//!
//! Vectors are packed 64 coordinates per word. Subspaces are always kept in
//! fully reduced echelon form (pivot = lowest set coordinate), so two
//! subspaces are equal exactly when their stored bases are equal.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

// ====================================================================
// BitVector
// ====================================================================

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    #[must_use]
    pub fn zeros(len: usize) -> Self {
        Self { len, words: vec![0; len.div_ceil(64)] }
    }

    #[must_use]
    pub fn singleton(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    #[must_use]
    pub fn from_support(len: usize, support: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in support {
            v.flip(i);
        }
        v
    }

    #[must_use]
    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_support(bits.len(), bits.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i & 63);
        if value {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i >> 6] ^= 1u64 << (i & 63);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitVector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    #[must_use]
    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Parity of the coordinatewise product.
    pub fn dot(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(&other.words) {
            acc ^= (a & b).count_ones() & 1;
        }
        acc == 1
    }

    /// Lowest set coordinate.
    pub fn pivot(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * 64 + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * 64 + t)
                }
            })
        })
    }

    /// Concatenation `self ++ other`.
    #[must_use]
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Coordinates `range` as a new vector.
    #[must_use]
    pub fn slice(&self, start: usize, end: usize) -> BitVector {
        BitVector::from_support(end - start, self.ones().filter(|&i| i >= start && i < end).map(|i| i - start))
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "[{s}]")
    }
}

// ====================================================================
// BitMatrix
// ====================================================================

/// Row-major matrix; `rows[i]` has length `cols`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVector>,
}

impl BitMatrix {
    #[must_use]
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![BitVector::zeros(cols); rows] }
    }

    #[must_use]
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self, Gf2Error> {
        for r in &rows {
            if r.len() != cols {
                return Err(Gf2Error::DimensionMismatch { expected: cols, found: r.len() });
            }
        }
        Ok(Self { rows: rows.len(), cols, data: rows })
    }

    /// Matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[BitVector]) -> Result<Self, Gf2Error> {
        let mut m = Self::zeros(rows, columns.len());
        for (j, c) in columns.iter().enumerate() {
            if c.len() != rows {
                return Err(Gf2Error::DimensionMismatch { expected: rows, found: c.len() });
            }
            for i in c.ones() {
                m.set(i, j, true);
            }
        }
        Ok(m)
    }

    pub fn from_dense(rows: usize, cols: usize, entries: &[Vec<u8>]) -> Result<Self, Gf2Error> {
        if entries.len() != rows {
            return Err(Gf2Error::DimensionMismatch { expected: rows, found: entries.len() });
        }
        let mut m = Self::zeros(rows, cols);
        for (i, row) in entries.iter().enumerate() {
            if row.len() != cols {
                return Err(Gf2Error::DimensionMismatch { expected: cols, found: row.len() });
            }
            for (j, &e) in row.iter().enumerate() {
                m.set(i, j, e % 2 == 1);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.data[i].set(j, value);
    }

    #[inline]
    pub fn flip(&mut self, i: usize, j: usize) {
        self.data[i].flip(j);
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.data[i]
    }

    pub fn row_vectors(&self) -> &[BitVector] {
        &self.data
    }

    pub fn column(&self, j: usize) -> BitVector {
        BitVector::from_support(self.rows, (0..self.rows).filter(|&i| self.get(i, j)))
    }

    pub fn columns(&self) -> Vec<BitVector> {
        self.transpose().data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BitVector::is_zero)
    }

    #[must_use]
    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for (i, r) in self.data.iter().enumerate() {
            for j in r.ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    /// `self * x` for a column vector `x`.
    pub fn mul_vec(&self, x: &BitVector) -> BitVector {
        assert_eq!(x.len(), self.cols, "matrix-vector dimension mismatch");
        BitVector::from_support(self.rows, (0..self.rows).filter(|&i| self.data[i].dot(x)))
    }

    /// `self * other`.
    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.cols != other.rows {
            return Err(Gf2Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for (i, r) in self.data.iter().enumerate() {
            let mut acc = BitVector::zeros(other.cols);
            for k in r.ones() {
                acc.xor_assign(&other.data[k]);
            }
            out.data[i] = acc;
        }
        Ok(out)
    }

    pub fn add(&self, other: &BitMatrix) -> Result<BitMatrix, Gf2Error> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Gf2Error::DimensionMismatch { expected: self.rows * self.cols, found: other.rows * other.cols });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.xor(b)).collect();
        Ok(BitMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn rank(&self) -> usize {
        let mut e = Eliminator::new(self.cols, 0);
        for r in &self.data {
            e.insert(r.clone(), BitVector::zeros(0));
        }
        e.rank()
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.data.iter().map(|r| (0..self.cols).map(|j| u8::from(r.get(j))).collect()).collect()
    }
}

// ====================================================================
// Incremental elimination with tag tracking
// ====================================================================

/// Incremental Gaussian elimination. Each stored row carries a tag vector
/// recording which inserted inputs it is a combination of.
#[derive(Clone, Debug)]
pub struct Eliminator {
    len: usize,
    tag_len: usize,
    pivot_row: Vec<usize>,
    rows: Vec<(BitVector, BitVector)>,
}

const NO_ROW: usize = usize::MAX;

impl Eliminator {
    pub fn new(len: usize, tag_len: usize) -> Self {
        Self { len, tag_len, pivot_row: vec![NO_ROW; len], rows: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `(v, tag)` against the stored rows. On return either `v` is
    /// zero or its pivot is not yet used.
    pub fn reduce(&self, v: &mut BitVector, tag: &mut BitVector) {
        while let Some(p) = v.pivot() {
            let r = self.pivot_row[p];
            if r == NO_ROW {
                return;
            }
            v.xor_assign(&self.rows[r].0);
            if self.tag_len > 0 {
                tag.xor_assign(&self.rows[r].1);
            }
        }
    }

    /// Inserts a vector. Returns `None` if it became a new row, or the
    /// reduced tag if the vector was dependent (a relation among inputs).
    pub fn insert(&mut self, mut v: BitVector, mut tag: BitVector) -> Option<BitVector> {
        debug_assert_eq!(v.len(), self.len);
        self.reduce(&mut v, &mut tag);
        match v.pivot() {
            None => Some(tag),
            Some(p) => {
                self.pivot_row[p] = self.rows.len();
                self.rows.push((v, tag));
                None
            }
        }
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        let mut v = v.clone();
        let mut t = BitVector::zeros(self.tag_len);
        self.reduce(&mut v, &mut t);
        v.is_zero()
    }

    /// Tag of a combination of stored rows equal to `v`, if `v` is in the span.
    pub fn express(&self, v: &BitVector) -> Option<BitVector> {
        let mut v = v.clone();
        let mut t = BitVector::zeros(self.tag_len);
        self.reduce(&mut v, &mut t);
        v.is_zero().then_some(t)
    }

    pub fn into_rows(self) -> Vec<(BitVector, BitVector)> {
        self.rows
    }
}

// ====================================================================
// Subspace
// ====================================================================

/// A linear subspace of `Z_2^ambient`, stored in reduced echelon form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<BitVector>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(ambient {}, dim {}) {:?}", self.ambient, self.basis.len(), self.basis)
    }
}

fn canonicalize(ambient: usize, mut rows: Vec<BitVector>) -> Vec<BitVector> {
    debug_assert!(rows.iter().all(|r| r.len() == ambient));
    rows.sort_by_key(|r| r.pivot());
    // Clear every non-pivot occurrence of each pivot, processing from the
    // highest pivot down so that cleared bits are not reintroduced.
    for i in (0..rows.len()).rev() {
        let p = rows[i].pivot().unwrap();
        let pr = rows[i].clone();
        for (j, r) in rows.iter_mut().enumerate() {
            if j != i && r.get(p) {
                r.xor_assign(&pr);
            }
        }
    }
    rows
}

impl Subspace {
    #[must_use]
    pub fn zero(ambient: usize) -> Self {
        Self { ambient, basis: Vec::new() }
    }

    #[must_use]
    pub fn full(ambient: usize) -> Self {
        Self { ambient, basis: (0..ambient).map(|i| BitVector::singleton(ambient, i)).collect() }
    }

    /// Span of arbitrary vectors of length `ambient`.
    pub fn span<'a>(ambient: usize, vectors: impl IntoIterator<Item = &'a BitVector>) -> Self {
        let mut e = Eliminator::new(ambient, 0);
        for v in vectors {
            assert_eq!(v.len(), ambient, "vector length does not match ambient dimension");
            e.insert(v.clone(), BitVector::zeros(0));
        }
        Self::from_eliminator(e)
    }

    pub fn span_owned(ambient: usize, vectors: Vec<BitVector>) -> Self {
        let mut e = Eliminator::new(ambient, 0);
        for v in vectors {
            assert_eq!(v.len(), ambient, "vector length does not match ambient dimension");
            e.insert(v, BitVector::zeros(0));
        }
        Self::from_eliminator(e)
    }

    fn from_eliminator(e: Eliminator) -> Self {
        let ambient = e.len;
        let rows = e.into_rows().into_iter().map(|(v, _)| v).collect();
        Self { ambient, basis: canonicalize(ambient, rows) }
    }

    #[inline]
    pub fn ambient(&self) -> usize {
        self.ambient
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BitVector] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    /// Residue of `v` modulo this subspace (canonical coset representative).
    pub fn reduce(&self, v: &BitVector) -> BitVector {
        let mut v = v.clone();
        for b in &self.basis {
            if v.get(b.pivot().unwrap()) {
                v.xor_assign(b);
            }
        }
        v
    }

    pub fn contains(&self, v: &BitVector) -> bool {
        self.reduce(v).is_zero()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    fn check_ambient(&self, other: &Subspace) -> Result<(), Gf2Error> {
        if self.ambient != other.ambient {
            return Err(Gf2Error::DimensionMismatch { expected: self.ambient, found: other.ambient });
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace, Gf2Error> {
        self.check_ambient(other)?;
        Ok(Subspace::span(self.ambient, self.basis.iter().chain(&other.basis)))
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace, Gf2Error> {
        self.check_ambient(other)?;
        let residues: Vec<BitVector> = self.basis.iter().map(|b| other.reduce(b)).collect();
        let combos = kernel_of_vectors(self.ambient, &residues);
        Ok(Subspace::span_owned(self.ambient, combos.iter().map(|c| combine(&self.basis, c, self.ambient)).collect()))
    }

    /// Vectors of `self` completing a basis of `other ∩ self` to a basis of
    /// `self`; they represent `self / (self ∩ other)` and equally
    /// `(self + other) / other`.
    pub fn quotient_reps(&self, other: &Subspace) -> Result<Vec<BitVector>, Gf2Error> {
        self.check_ambient(other)?;
        let mut e = Eliminator::new(self.ambient, 0);
        for b in &other.basis {
            e.insert(b.clone(), BitVector::zeros(0));
        }
        let mut reps = Vec::new();
        for b in &self.basis {
            if e.insert(b.clone(), BitVector::zeros(0)).is_none() {
                reps.push(b.clone());
            }
        }
        Ok(reps)
    }

    /// Image of this subspace under `m`.
    pub fn image(&self, m: &BitMatrix) -> Result<Subspace, Gf2Error> {
        if m.cols() != self.ambient {
            return Err(Gf2Error::DimensionMismatch { expected: self.ambient, found: m.cols() });
        }
        Ok(Subspace::span_owned(m.rows(), self.basis.iter().map(|b| m.mul_vec(b)).collect()))
    }

    /// `{x ∈ self | m x ∈ target}`.
    pub fn preimage(&self, m: &BitMatrix, target: &Subspace) -> Result<Subspace, Gf2Error> {
        if m.cols() != self.ambient {
            return Err(Gf2Error::DimensionMismatch { expected: self.ambient, found: m.cols() });
        }
        if m.rows() != target.ambient {
            return Err(Gf2Error::DimensionMismatch { expected: m.rows(), found: target.ambient });
        }
        let residues: Vec<BitVector> = self.basis.iter().map(|b| target.reduce(&m.mul_vec(b))).collect();
        let combos = kernel_of_vectors(m.rows(), &residues);
        Ok(Subspace::span_owned(self.ambient, combos.iter().map(|c| combine(&self.basis, c, self.ambient)).collect()))
    }

    /// `{α | αᵀ P β = 0 for all β ∈ self}`; `self` lives in the column space
    /// of `pairing`, the result in its row space.
    pub fn annihilator(&self, pairing: &BitMatrix) -> Result<Subspace, Gf2Error> {
        if pairing.cols() != self.ambient {
            return Err(Gf2Error::DimensionMismatch { expected: pairing.cols(), found: self.ambient });
        }
        // α must be orthogonal to every P β.
        let constraints: Vec<BitVector> = self.basis.iter().map(|b| pairing.mul_vec(b)).collect();
        let m = BitMatrix::from_rows(pairing.rows(), constraints)?;
        Ok(rank_kernel_image(&m).kernel)
    }
}

/// Coefficient vectors `c` with `Σ c_i v_i = 0`, a basis of all relations.
pub fn kernel_of_vectors(len: usize, vectors: &[BitVector]) -> Vec<BitVector> {
    let n = vectors.len();
    let mut e = Eliminator::new(len, n);
    let mut out = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        if let Some(tag) = e.insert(v.clone(), BitVector::singleton(n, i)) {
            out.push(tag);
        }
    }
    out
}

/// `Σ c_i basis_i`.
pub fn combine(basis: &[BitVector], coeffs: &BitVector, len: usize) -> BitVector {
    let mut out = BitVector::zeros(len);
    for i in coeffs.ones() {
        out.xor_assign(&basis[i]);
    }
    out
}

// ====================================================================
// Rank / kernel / image
// ====================================================================

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankKernelImage {
    pub rank: usize,
    pub kernel: Subspace,
    pub image: Subspace,
}

pub fn rank_kernel_image(m: &BitMatrix) -> RankKernelImage {
    let columns = m.columns();
    let kernel = Subspace::span_owned(m.cols(), kernel_of_vectors(m.rows(), &columns));
    let image = Subspace::span_owned(m.rows(), columns);
    RankKernelImage { rank: image.dim(), kernel, image }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubspaceAlgebra {
    pub sum: Subspace,
    pub intersection: Subspace,
    pub quotient_reps: Vec<BitVector>,
}

pub fn subspace_algebra(u: &Subspace, v: &Subspace) -> Result<SubspaceAlgebra, Gf2Error> {
    Ok(SubspaceAlgebra { sum: u.sum(v)?, intersection: u.intersection(v)?, quotient_reps: u.quotient_reps(v)? })
}

// ====================================================================
// Quotient coordinates
// ====================================================================

/// A chosen basis of `M / N` given by representatives, with coordinate
/// extraction for vectors of `M`.
#[derive(Clone, Debug)]
pub struct QuotientBasis {
    ambient: usize,
    reps: Vec<BitVector>,
    elim: Eliminator,
}

impl QuotientBasis {
    /// `reps` must be independent modulo `denominator`.
    pub fn new(denominator: &Subspace, reps: Vec<BitVector>) -> Self {
        let ambient = denominator.ambient();
        let n = reps.len();
        let mut elim = Eliminator::new(ambient, n);
        for b in denominator.basis() {
            elim.insert(b.clone(), BitVector::zeros(n));
        }
        for (i, r) in reps.iter().enumerate() {
            let dependent = elim.insert(r.clone(), BitVector::singleton(n, i));
            assert!(dependent.is_none(), "quotient representatives are dependent");
        }
        Self { ambient, reps, elim }
    }

    /// Basis of `numerator / denominator` chosen from the numerator basis.
    pub fn of(numerator: &Subspace, denominator: &Subspace) -> Self {
        let reps = numerator.quotient_reps(denominator).expect("ambient mismatch");
        Self::new(denominator, reps)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    pub fn reps(&self) -> &[BitVector] {
        &self.reps
    }

    /// Coordinates of the class of `v`, or `None` if `v` is not in
    /// `denominator + span(reps)`.
    pub fn coordinates(&self, v: &BitVector) -> Option<BitVector> {
        self.elim.express(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_independent_of_spanning_set() {
        let a = BitVector::from_support(5, [0, 1]);
        let b = BitVector::from_support(5, [1, 2]);
        let c = BitVector::from_support(5, [0, 2]);
        let s1 = Subspace::span(5, [&a, &b]);
        let s2 = Subspace::span(5, [&c, &a, &b]);
        assert_eq!(s1, s2);
        assert_eq!(s1.dim(), 2);
    }

    #[test]
    fn ones_iterates_in_order() {
        let v = BitVector::from_support(130, [3, 64, 129]);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![3, 64, 129]);
        assert_eq!(v.pivot(), Some(3));
    }
}
