//! Shared test support: dense GF(2) elimination used as an oracle, and a
//! generator of random filtered chain complexes.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use z2weight::chain::ChainComplex;
use z2weight::filt::FilteredComplex;
use z2weight::gf2::{BitMatrix, BitVector};

pub type Dense = Vec<Vec<u8>>;

/// Rank by textbook row reduction on a dense 0/1 matrix.
pub fn naive_rank(m: &Dense) -> usize {
    let mut a = m.clone();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][c] == 1) else { continue };
        a.swap(rank, piv);
        for r in 0..rows {
            if r != rank && a[r][c] == 1 {
                for j in 0..cols {
                    a[r][j] ^= a[rank][j];
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn dense(m: &BitMatrix) -> Dense {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| u8::from(m.get(i, j))).collect()).collect()
}

/// Rank of a family of vectors of length `len`, as rows.
pub fn naive_rank_vectors(len: usize, vs: &[BitVector]) -> usize {
    let rows: Dense = vs.iter().map(|v| (0..len).map(|i| u8::from(v.get(i))).collect()).collect();
    naive_rank(&rows)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize, density: f64) -> BitMatrix {
    let mut m = BitMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            if rng.gen_bool(density) {
                m.set(i, j, true);
            }
        }
    }
    m
}

pub fn random_vector(rng: &mut impl Rng, len: usize) -> BitVector {
    BitVector::from_bools(&(0..len).map(|_| rng.gen_bool(0.5)).collect::<Vec<_>>())
}

/// Generators with a degree and a filtration index; each boundary is a
/// random cycle among lower-degree generators of index at most its own, so
/// the index filtration is by subcomplexes.
pub struct RandomFiltered {
    pub filtered: FilteredComplex,
    pub index: BTreeMap<i32, Vec<i32>>,
}

pub fn random_filtered(rng: &mut impl Rng, max_generators: usize) -> RandomFiltered {
    let degrees = rng.gen_range(1..=4usize);
    let total = rng.gen_range(1..=max_generators);
    let mut dims = vec![0usize; degrees];
    for _ in 0..total {
        dims[rng.gen_range(0..degrees)] += 1;
    }
    let mut index: BTreeMap<i32, Vec<i32>> = BTreeMap::new();
    let mut boundary: Vec<BitMatrix> = Vec::new();
    for k in 0..degrees {
        let idx: Vec<i32> = (0..dims[k]).map(|_| rng.gen_range(-3..=3)).collect();
        if k == 0 {
            boundary.push(BitMatrix::zeros(0, dims[0]));
        } else {
            let below = dims[k - 1];
            let below_idx = &index[&(k as i32 - 1)];
            let cols: Vec<BitVector> = idx
                .iter()
                .map(|&p| {
                    // Random element of ker ∂_{k-1} ∩ F_p C_{k-1}.
                    let allowed: Vec<usize> = (0..below).filter(|&j| below_idx[j] <= p).collect();
                    let cycles = restricted_cycles(&boundary[k - 1], &allowed, below);
                    let mut v = BitVector::zeros(below);
                    for c in &cycles {
                        if rng.gen_bool(0.5) {
                            v.xor_assign(c);
                        }
                    }
                    v
                })
                .collect();
            boundary.push(BitMatrix::from_columns(below, &cols).unwrap());
        }
        index.insert(k as i32, idx);
    }
    let complex = Arc::new(ChainComplex::from_dims(0, &dims, boundary).expect("∂∂ = 0 by construction"));
    let filtered = FilteredComplex::from_basis_indices(complex, &index).unwrap();
    RandomFiltered { filtered, index }
}

/// Basis of the cycles of `d` supported on `allowed` coordinates.
fn restricted_cycles(d: &BitMatrix, allowed: &[usize], len: usize) -> Vec<BitVector> {
    let sub_cols: Vec<BitVector> = allowed.iter().map(|&j| d.column(j)).collect();
    z2weight::gf2::kernel_of_vectors(d.rows(), &sub_cols)
        .into_iter()
        .map(|k| BitVector::from_support(len, k.ones().map(|i| allowed[i])))
        .collect()
}

/// `dim F_p H_k` from ranks alone: `dim(Z ∩ F_p) - dim(B ∩ F_p)`, where
/// `dim(B ∩ F_p) = rank ∂ - rank(∂ followed by projection off F_p)`.
pub fn image_filtration_dim(r: &RandomFiltered, k: i32, p: i32) -> usize {
    let c = &r.filtered.complex;
    let n = c.dim(k);
    let inside: Vec<bool> = (0..n).map(|i| r.index[&k][i] <= p).collect();
    let d_out = dense(&c.boundary(k));
    let restricted: Dense = d_out.iter().map(|row| (0..n).filter(|&j| inside[j]).map(|j| row[j]).collect()).collect();
    let cycles_in = inside.iter().filter(|&&b| b).count() - naive_rank(&restricted);
    let boundaries_in = if k < c.hi() {
        let d_in = dense(&c.boundary(k + 1));
        let outside: Dense = (0..n).filter(|&i| !inside[i]).map(|i| d_in[i].clone()).collect();
        naive_rank(&d_in) - naive_rank(&outside)
    } else {
        0
    };
    cycles_in - boundaries_in
}

/// `dim H_k` by dense elimination.
pub fn naive_homology_dim(c: &ChainComplex, k: i32) -> usize {
    let n = c.dim(k);
    let d_out = naive_rank(&dense(&c.boundary(k)));
    let d_in = if k < c.hi() { naive_rank(&dense(&c.boundary(k + 1))) } else { 0 };
    n - d_out - d_in
}

/// Kernel basis of a dense matrix by reduction to row echelon form.
pub fn naive_kernel(m: &Dense, cols: usize) -> Dense {
    let mut a = m.clone();
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows).find(|&r| a[r][c] == 1) else { continue };
        a.swap(rank, piv);
        for r in 0..rows {
            if r != rank && a[r][c] == 1 {
                for j in 0..cols {
                    a[r][j] ^= a[rank][j];
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u8; cols];
            v[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = a[r][f];
            }
            v
        })
        .collect()
}

/// `m · v` for a dense matrix with `cols` columns.
pub fn apply(m: &Dense, v: &[u8]) -> Vec<u8> {
    m.iter().map(|row| row.iter().zip(v).fold(0u8, |acc, (a, b)| acc ^ (a & b))).collect()
}

/// A filtration written as dense spanning sets, `levels[k][p]`, with every
/// level outside the stored window zero below and everything above.
pub struct DenseFiltration {
    pub lo: i32,
    pub hi: i32,
    pub dims: BTreeMap<i32, usize>,
    pub boundary: BTreeMap<i32, Dense>,
    pub levels: BTreeMap<(i32, i32), Dense>,
}

impl DenseFiltration {
    pub fn from_indices(r: &RandomFiltered) -> Self {
        let c = &r.filtered.complex;
        let (lo, hi) = r.filtered.index_range();
        let mut out = DenseFiltration { lo, hi, dims: BTreeMap::new(), boundary: BTreeMap::new(), levels: BTreeMap::new() };
        for k in c.degrees() {
            let n = c.dim(k);
            out.dims.insert(k, n);
            out.boundary.insert(k, dense(&c.boundary(k)));
            for p in lo..=hi {
                let rows = (0..n)
                    .filter(|&i| r.index[&k][i] <= p)
                    .map(|i| (0..n).map(|j| u8::from(i == j)).collect())
                    .collect();
                out.levels.insert((k, p), rows);
            }
        }
        out
    }

    pub fn dim(&self, k: i32) -> usize {
        self.dims.get(&k).copied().unwrap_or(0)
    }

    pub fn level(&self, k: i32, p: i32) -> Dense {
        let n = self.dim(k);
        if n == 0 || p < self.lo {
            Vec::new()
        } else if p > self.hi {
            (0..n).map(|i| (0..n).map(|j| u8::from(i == j)).collect()).collect()
        } else {
            self.levels[&(k, p)].clone()
        }
    }

    /// `{x ∈ F_p C_k | ∂x ∈ F_{p-r} C_{k-1}}`.
    pub fn z_space(&self, r: i32, p: i32, k: i32) -> Dense {
        let base = self.level(k, p);
        if base.is_empty() || self.dim(k - 1) == 0 {
            return base;
        }
        let d = &self.boundary[&k];
        let images: Dense = base.iter().map(|b| apply(d, b)).collect();
        let lower = self.level(k - 1, p - r);
        // Columns: images of the basis of F_p, then the basis of F_{p-r}.
        let m = self.dim(k - 1);
        let cols = images.len() + lower.len();
        let system: Dense =
            (0..m).map(|i| images.iter().chain(lower.iter()).map(|v| v[i]).collect()).collect();
        naive_kernel(&system, cols)
            .into_iter()
            .map(|y| {
                let mut x = vec![0u8; self.dim(k)];
                for (j, b) in base.iter().enumerate() {
                    if y[j] == 1 {
                        for (t, bit) in b.iter().enumerate() {
                            x[t] ^= bit;
                        }
                    }
                }
                x
            })
            .collect()
    }

    /// `dim E^r_{p, k-p}`.
    pub fn page_dim(&self, r: i32, p: i32, k: i32) -> usize {
        let num = self.z_space(r, p, k);
        let mut den = self.z_space(r - 1, p - 1, k);
        if self.dim(k + 1) > 0 {
            let d = &self.boundary[&(k + 1)];
            den.extend(self.z_space(r - 1, p + r - 1, k + 1).iter().map(|x| apply(d, x)));
        }
        naive_rank(&num) - naive_rank(&den)
    }

    /// The shifted filtration, recomputed from its defining condition.
    pub fn decalage(&self) -> DenseFiltration {
        let (klo, khi) = (*self.dims.keys().next().unwrap(), *self.dims.keys().next_back().unwrap());
        let (lo, hi) = (self.lo - khi, self.hi + 1 - klo);
        let mut levels = BTreeMap::new();
        for k in klo..=khi {
            for p in lo..=hi {
                levels.insert((k, p), self.z_space(1, p + k, k));
            }
        }
        DenseFiltration { lo, hi, dims: self.dims.clone(), boundary: self.boundary.clone(), levels }
    }
}

/// Equality of two spanning sets as subspaces.
pub fn same_span(a: &Dense, b: &Dense) -> bool {
    let ra = naive_rank(a);
    let mut both = a.clone();
    both.extend(b.iter().cloned());
    ra == naive_rank(b) && ra == naive_rank(&both)
}

pub fn dense_vectors(len: usize, vs: &[BitVector]) -> Dense {
    vs.iter().map(|v| (0..len).map(|i| u8::from(v.get(i))).collect()).collect()
}
