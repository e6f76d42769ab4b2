//! The Z₂ group algebra of a discrete torus `Z₂ⁿ`, powers of its augmentation
//! ideal and the exterior-algebra description of the associated graded.
//!
//! Group elements are `n`-bit masks; an algebra element is the set of group
//! elements with coefficient one.

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::{BitMatrix, BitVector, QuotientBasis, Subspace};

/// Largest rank for which the algebra is materialized.
pub const MAX_RANK: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TorusError {
    #[error("elements belong to tori of rank {0} and {1}")]
    GroupMismatch(usize, usize),
    #[error("element is not in the {0}-th power of the augmentation ideal")]
    NotInPower(usize),
    #[error("rank {0} exceeds the supported maximum {MAX_RANK}")]
    RankTooLarge(usize),
    #[error("homomorphism matrix is {rows}x{cols}, expected source rank {source_rank}")]
    HomShape { rows: usize, cols: usize, source_rank: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraElement {
    rank: usize,
    support: BitVector,
}

impl AlgebraElement {
    pub fn zero(rank: usize) -> Self {
        Self { rank, support: BitVector::zeros(1 << rank) }
    }

    /// `[g]`.
    pub fn group_element(rank: usize, g: usize) -> Self {
        Self { rank, support: BitVector::singleton(1 << rank, g) }
    }

    pub fn one(rank: usize) -> Self {
        Self::group_element(rank, 0)
    }

    pub fn from_support(rank: usize, elements: impl IntoIterator<Item = usize>) -> Self {
        let mut support = BitVector::zeros(1 << rank);
        for g in elements {
            support.flip(g);
        }
        Self { rank, support }
    }

    pub fn from_vector(rank: usize, support: BitVector) -> Self {
        assert_eq!(support.len(), 1 << rank);
        Self { rank, support }
    }

    /// `[H]`, the sum of the elements of the subgroup spanned by `generators`.
    pub fn subgroup_sum(rank: usize, generators: &[usize]) -> Self {
        Self::from_support(rank, span_masks(generators))
    }

    /// `[G(J)]` for the coordinate subgroup on the index set `J`.
    pub fn coordinate_subgroup(rank: usize, indices: &[usize]) -> Self {
        let gens: Vec<usize> = indices.iter().map(|&j| 1 << j).collect();
        Self::subgroup_sum(rank, &gens)
    }

    /// `[1] + [g]`.
    pub fn one_plus(rank: usize, g: usize) -> Self {
        Self::from_support(rank, [0, g])
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn support(&self) -> &BitVector {
        &self.support
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_zero()
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        self.support.ones()
    }

    fn check(&self, other: &Self) -> Result<(), TorusError> {
        if self.rank == other.rank {
            Ok(())
        } else {
            Err(TorusError::GroupMismatch(self.rank, other.rank))
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, TorusError> {
        self.check(other)?;
        Ok(Self { rank: self.rank, support: self.support.xor(&other.support) })
    }

    /// Convolution product.
    pub fn mul(&self, other: &Self) -> Result<Self, TorusError> {
        self.check(other)?;
        let mut support = BitVector::zeros(1 << self.rank);
        for g in self.support.ones() {
            for h in other.support.ones() {
                support.flip(g ^ h);
            }
        }
        Ok(Self { rank: self.rank, support })
    }

    /// Multiplication by `[g]`.
    pub fn translate(&self, g: usize) -> Self {
        Self::from_support(self.rank, self.support.ones().map(|h| h ^ g))
    }

    /// `ε(a)`, the parity of the support.
    pub fn augmentation(&self) -> bool {
        self.support.count_ones() % 2 == 1
    }
}

pub struct AlgebraOps {
    pub sum: AlgebraElement,
    pub product: AlgebraElement,
    pub augmentation: (bool, bool),
}

pub fn algebra_ops(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraOps, TorusError> {
    Ok(AlgebraOps { sum: a.add(b)?, product: a.mul(b)?, augmentation: (a.augmentation(), b.augmentation()) })
}

/// All elements of the subgroup generated by the masks.
pub fn span_masks(generators: &[usize]) -> Vec<usize> {
    let mut out = vec![0usize];
    for &g in generators {
        if out.contains(&g) {
            continue;
        }
        let shifted: Vec<usize> = out.iter().map(|&h| h ^ g).collect();
        out.extend(shifted);
    }
    out
}

/// Bases (in reduced echelon form on bit masks) of every rank-`p` subgroup
/// of `Z₂ⁿ`.
pub fn subgroups(rank: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if p > rank {
        return out;
    }
    for pivots in (0..rank).combinations(p) {
        // Row i has lowest bit pivots[i]; free bits are non-pivot positions above it.
        let free: Vec<Vec<usize>> = pivots
            .iter()
            .map(|&c| (c + 1..rank).filter(|b| !pivots.contains(b)).collect())
            .collect();
        let total: usize = free.iter().map(Vec::len).sum();
        for choice in 0u64..(1u64 << total) {
            let mut bit = 0;
            let mut rows = Vec::with_capacity(p);
            for (i, &c) in pivots.iter().enumerate() {
                let mut m = 1usize << c;
                for &f in &free[i] {
                    if choice >> bit & 1 == 1 {
                        m |= 1 << f;
                    }
                    bit += 1;
                }
                rows.push(m);
            }
            out.push(rows);
        }
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// The algebra `Z₂[Z₂ⁿ]` with its augmentation filtration materialized.
#[derive(Clone, Debug)]
pub struct TorusAlgebra {
    rank: usize,
    /// `powers[p]` is `𝓘^p` for `0 ≤ p ≤ n + 1`.
    powers: Vec<Subspace>,
    /// `graded[p]` has representatives `[G(J)]`, `|J| = p`, modulo `𝓘^{p+1}`.
    graded: Vec<QuotientBasis>,
}

impl TorusAlgebra {
    pub fn new(rank: usize) -> Result<Self, TorusError> {
        if rank > MAX_RANK {
            return Err(TorusError::RankTooLarge(rank));
        }
        let size = 1 << rank;
        let mut powers = vec![Subspace::zero(size); rank + 2];
        for p in (0..=rank).rev() {
            let vecs: Vec<BitVector> =
                subgroups(rank, p).iter().map(|h| AlgebraElement::subgroup_sum(rank, h).support).collect();
            powers[p] = Subspace::span_owned(size, vecs).sum(&powers[p + 1]).expect("ambient");
        }
        let graded = (0..=rank)
            .map(|p| {
                let reps = Self::coordinate_sets(rank, p)
                    .iter()
                    .map(|j| AlgebraElement::coordinate_subgroup(rank, j).support)
                    .collect();
                QuotientBasis::new(&powers[p + 1], reps)
            })
            .collect();
        Ok(Self { rank, powers, graded })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `p`-subsets of `{0..n-1}` in lexicographic order.
    pub fn coordinate_sets(rank: usize, p: usize) -> Vec<Vec<usize>> {
        (0..rank).combinations(p).collect()
    }

    /// `𝓘^p`; zero for `p > n`.
    pub fn ideal_power(&self, p: usize) -> &Subspace {
        &self.powers[p.min(self.rank + 1)]
    }

    pub fn graded_dim(&self, p: usize) -> usize {
        self.ideal_power(p).dim() - self.ideal_power(p + 1).dim()
    }

    /// Coordinates of `a` mod `𝓘^{p+1}` in the basis `[G(J)]`, `|J| = p`.
    pub fn graded_coordinates(&self, a: &AlgebraElement, p: usize) -> Result<BitVector, TorusError> {
        if a.rank != self.rank {
            return Err(TorusError::GroupMismatch(self.rank, a.rank));
        }
        if p > self.rank {
            return if a.is_zero() { Ok(BitVector::zeros(0)) } else { Err(TorusError::NotInPower(p)) };
        }
        if !self.powers[p].contains(&a.support) {
            return Err(TorusError::NotInPower(p));
        }
        Ok(self.graded[p].coordinates(&a.support).expect("graded basis spans 𝓘^p / 𝓘^{p+1}"))
    }
}

/// `ideal_power_basis`: the echelon basis of `𝓘^p`.
pub fn ideal_power_basis(rank: usize, p: usize) -> Result<Subspace, TorusError> {
    Ok(TorusAlgebra::new(rank)?.ideal_power(p).clone())
}

/// A homomorphism `Z₂ⁿ → Z₂ᵐ` as an `m × n` matrix; column `j` is the image of
/// the `j`-th generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusHom {
    pub matrix: BitMatrix,
}

impl TorusHom {
    pub fn new(matrix: BitMatrix) -> Self {
        Self { matrix }
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: BitMatrix::identity(n) }
    }

    pub fn source_rank(&self) -> usize {
        self.matrix.cols()
    }

    pub fn target_rank(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, g: usize) -> usize {
        let mut out = 0usize;
        for j in 0..self.source_rank() {
            if g >> j & 1 == 1 {
                for i in 0..self.target_rank() {
                    if self.matrix.get(i, j) {
                        out ^= 1 << i;
                    }
                }
            }
        }
        out
    }

    /// `γ ∘ δ`.
    pub fn compose(&self, first: &TorusHom) -> TorusHom {
        TorusHom { matrix: self.matrix.mul(&first.matrix).expect("composable") }
    }

    /// All `m × n` homomorphisms.
    pub fn all(source_rank: usize, target_rank: usize) -> impl Iterator<Item = TorusHom> {
        let bits = source_rank * target_rank;
        (0u64..(1u64 << bits)).map(move |code| {
            let mut m = BitMatrix::zeros(target_rank, source_rank);
            for b in 0..bits {
                if code >> b & 1 == 1 {
                    m.set(b / source_rank, b % source_rank, true);
                }
            }
            TorusHom { matrix: m }
        })
    }
}

/// `γ_*`, extended linearly from group elements.
pub fn hom_pushforward(hom: &TorusHom, a: &AlgebraElement) -> Result<AlgebraElement, TorusError> {
    if a.rank != hom.source_rank() {
        return Err(TorusError::HomShape {
            rows: hom.target_rank(),
            cols: hom.source_rank(),
            source_rank: a.rank,
        });
    }
    Ok(AlgebraElement::from_support(hom.target_rank(), a.elements().map(|g| hom.apply(g))))
}

/// Determinant over Z₂ of the square submatrix on `rows × cols`.
pub fn minor(m: &BitMatrix, rows: &[usize], cols: &[usize]) -> bool {
    let sub: Vec<BitVector> =
        rows.iter().map(|&i| BitVector::from_bools(&cols.iter().map(|&j| m.get(i, j)).collect::<Vec<_>>())).collect();
    BitMatrix::from_rows(cols.len(), sub).expect("shape").rank() == rows.len()
}

/// `(a_IJ)` with `a_IJ = det(a_ij)_{i∈I, j∈J}`; rows are target `p`-subsets,
/// columns source `p`-subsets, both lexicographic.
pub fn graded_matrix(hom: &TorusHom, p: usize) -> BitMatrix {
    let rows = TorusAlgebra::coordinate_sets(hom.target_rank(), p);
    let cols = TorusAlgebra::coordinate_sets(hom.source_rank(), p);
    let mut out = BitMatrix::zeros(rows.len(), cols.len());
    for (r, i) in rows.iter().enumerate() {
        for (c, j) in cols.iter().enumerate() {
            if minor(&hom.matrix, i, j) {
                out.set(r, c, true);
            }
        }
    }
    out
}

/// The matrix of `γ_*` on `𝓘^p/𝓘^{p+1}` read off by pushing each `[G(J)]`
/// forward and taking graded coordinates.
pub fn graded_matrix_by_pushforward(
    hom: &TorusHom,
    source: &TorusAlgebra,
    target: &TorusAlgebra,
    p: usize,
) -> Result<BitMatrix, TorusError> {
    let rows = binomial(target.rank(), p);
    let mut cols = Vec::new();
    for j in TorusAlgebra::coordinate_sets(source.rank(), p) {
        let image = hom_pushforward(hom, &AlgebraElement::coordinate_subgroup(source.rank(), &j))?;
        cols.push(target.graded_coordinates(&image, p)?);
    }
    Ok(BitMatrix::from_columns(rows, &cols).expect("shape"))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExteriorModelReport {
    pub rank: usize,
    /// `(p, dim 𝓘^p/𝓘^{p+1}, C(n,p))`.
    pub graded_dims: Vec<(usize, usize, usize)>,
    pub top_power_vanishes: bool,
    pub alternating: bool,
    pub additive: bool,
    pub bijective: bool,
    pub multiplicative: bool,
    pub homs_checked: usize,
    pub functorial: bool,
}

impl ExteriorModelReport {
    pub fn passed(&self) -> bool {
        self.top_power_vanishes
            && self.alternating
            && self.additive
            && self.bijective
            && self.multiplicative
            && self.functorial
            && self.graded_dims.iter().all(|&(_, d, b)| d == b)
    }
}

/// Checks that `g'_1 ∧ … ∧ g'_p ↦ ∏ ([1] + [g_i]) mod 𝓘^{p+1}` is a well-defined
/// isomorphism of graded algebras `Λ*V → gr 𝓘`, natural in homomorphisms.
/// Functoriality is swept over all endomorphisms for `n ≤ 3` and over
/// elementary matrices beyond.
pub fn exterior_model_check(rank: usize) -> Result<ExteriorModelReport, TorusError> {
    let alg = TorusAlgebra::new(rank)?;
    let size = 1usize << rank;
    let mut rep = ExteriorModelReport { rank, ..Default::default() };
    for p in 0..=rank {
        rep.graded_dims.push((p, alg.graded_dim(p), binomial(rank, p)));
    }
    rep.top_power_vanishes = alg.ideal_power(rank + 1).is_zero();

    let i2 = alg.ideal_power(2);
    rep.alternating = (0..size).all(|g| {
        let x = AlgebraElement::one_plus(rank, g);
        x.mul(&x).expect("same rank").is_zero()
    });
    rep.additive = (0..size).cartesian_product(0..size).all(|(g, h)| {
        let lhs = AlgebraElement::one_plus(rank, g ^ h);
        let rhs = AlgebraElement::one_plus(rank, g).add(&AlgebraElement::one_plus(rank, h)).expect("same rank");
        i2.contains(&lhs.add(&rhs).expect("same rank").support)
    });

    // Image of the standard wedge basis e_J.
    let wedge = |j: &[usize]| -> AlgebraElement {
        j.iter().fold(AlgebraElement::one(rank), |acc, &i| acc.mul(&AlgebraElement::one_plus(rank, 1 << i)).expect("same rank"))
    };
    rep.bijective = (0..=rank).all(|p| {
        let sets = TorusAlgebra::coordinate_sets(rank, p);
        let coords: Vec<BitVector> = sets.iter().map(|j| alg.graded_coordinates(&wedge(j), p).expect("in 𝓘^p")).collect();
        BitMatrix::from_columns(sets.len(), &coords).expect("shape").rank() == sets.len()
    });
    rep.multiplicative = (0..=rank).all(|p| {
        (0..=rank - p).all(|q| {
            let js = TorusAlgebra::coordinate_sets(rank, p);
            let ks = TorusAlgebra::coordinate_sets(rank, q);
            js.iter().cartesian_product(ks.iter()).all(|(j, k)| {
                let prod = wedge(j).mul(&wedge(k)).expect("same rank");
                let overlap = j.iter().any(|x| k.contains(x));
                let coords = alg.graded_coordinates(&prod, p + q).expect("𝓘^p𝓘^q ⊆ 𝓘^{p+q}");
                if overlap {
                    coords.is_zero()
                } else {
                    let mut jk: Vec<usize> = j.iter().chain(k.iter()).copied().collect();
                    jk.sort_unstable();
                    let idx = TorusAlgebra::coordinate_sets(rank, p + q).iter().position(|s| *s == jk).expect("subset");
                    coords == BitVector::singleton(coords.len(), idx)
                }
            })
        })
    });

    let homs: Vec<TorusHom> = if rank <= 3 {
        TorusHom::all(rank, rank).collect()
    } else {
        let mut v = vec![TorusHom::identity(rank)];
        for (a, b) in (0..rank).cartesian_product(0..rank) {
            let mut m = BitMatrix::identity(rank);
            if a == b {
                m.set(a, a, false);
            } else {
                m.set(a, b, true);
            }
            v.push(TorusHom::new(m));
        }
        v
    };
    rep.homs_checked = homs.len();
    let mut functorial = true;
    for h in &homs {
        for p in 0..=rank {
            if graded_matrix_by_pushforward(h, &alg, &alg, p)? != graded_matrix(h, p) {
                functorial = false;
            }
        }
    }
    rep.functorial = functorial;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subgroup_counts_are_gaussian_binomials() {
        assert_eq!(subgroups(3, 1).len(), 7);
        assert_eq!(subgroups(3, 2).len(), 7);
        assert_eq!(subgroups(4, 2).len(), 35);
    }
}
