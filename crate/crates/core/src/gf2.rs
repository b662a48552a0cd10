//! GF(2) linear algebra on small dense matrices: parity-check matrices,
//! codeword enumeration, projection onto index sets, dual bases, and
//! detection of implicit constraints.
//!
//! Rows are bit-packed into single `u64` words (bit `j` = column `j`), so
//! everything here is limited to 64 columns. All codes in scope have block
//! length well below that.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest code dimension `enumerate_codewords` will expand (2^24 words).
pub const ENUMERATION_BOUND: usize = 24;

/// Dense GF(2) matrix with one `u64` word per row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(cols <= 64, "BitMatrix supports at most 64 columns");
        BitMatrix { rows, cols, data: vec![0; rows] }
    }

    /// Build from bit-packed rows (bit `j` of each word = column `j`).
    pub fn from_rows(cols: usize, rows: Vec<u64>) -> Self {
        assert!(cols <= 64);
        let mask = mask(cols);
        assert!(rows.iter().all(|&r| r & !mask == 0), "row has bits past `cols`");
        BitMatrix { rows: rows.len(), cols, data: rows }
    }

    /// Build from a row-major dense 0/1 slice.
    pub fn from_dense(rows: usize, cols: usize, bits: &[u8]) -> Self {
        assert_eq!(bits.len(), rows * cols);
        let mut m = BitMatrix::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if bits[r * cols + c] != 0 {
                    m.set(r, c, 1);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> u64 {
        self.data[r]
    }

    pub fn row_words(&self) -> &[u64] {
        &self.data
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        ((self.data[r] >> c) & 1) as u8
    }

    pub fn set(&mut self, r: usize, c: usize, bit: u8) {
        if bit != 0 {
            self.data[r] |= 1 << c;
        } else {
            self.data[r] &= !(1 << c);
        }
    }

    pub fn push_row(&mut self, row: u64) {
        assert!(row & !mask(self.cols) == 0);
        self.data.push(row);
        self.rows += 1;
    }

    /// Matrix-vector product `M x` over GF(2); `x` is bit-packed.
    pub fn mul_vec(&self, x: u64) -> u64 {
        let mut out = 0u64;
        for (r, &row) in self.data.iter().enumerate() {
            out |= (((row & x).count_ones() as u64) & 1) << r;
        }
        out
    }

    /// Row echelon form (in fact reduced row echelon form) and rank.
    pub fn row_reduce(&self) -> (BitMatrix, usize) {
        let (rows, pivots) = rref(&self.data, self.cols);
        let rank = pivots.len();
        (BitMatrix { rows: rows.len(), cols: self.cols, data: rows }, rank)
    }

    pub fn rank(&self) -> usize {
        self.row_reduce().1
    }

    /// Basis of the null space `{ x : M x = 0 }`, bit-packed.
    pub fn nullspace_basis(&self) -> Vec<u64> {
        let (rows, pivots) = rref(&self.data, self.cols);
        let pivot_set: Vec<usize> = pivots.clone();
        let is_pivot = |c: usize| pivot_set.contains(&c);
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if is_pivot(free) {
                continue;
            }
            let mut v = 1u64 << free;
            for (i, &p) in pivot_set.iter().enumerate() {
                if (rows[i] >> free) & 1 == 1 {
                    v |= 1 << p;
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Row values as a 0/1 vector, for serialization.
    pub fn row_bits(&self, r: usize) -> Vec<u8> {
        (0..self.cols).map(|c| self.get(r, c)).collect()
    }
}

fn mask(cols: usize) -> u64 {
    if cols == 64 {
        u64::MAX
    } else {
        (1u64 << cols) - 1
    }
}

/// Reduced row echelon form of bit-packed rows; returns (nonzero rows, pivot columns).
fn rref(rows: &[u64], cols: usize) -> (Vec<u64>, Vec<usize>) {
    let mut work: Vec<u64> = rows.to_vec();
    let mut out: Vec<u64> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for col in 0..cols {
        let Some(pos) = work.iter().position(|&r| (r >> col) & 1 == 1) else {
            continue;
        };
        let pivot_row = work.swap_remove(pos);
        for r in work.iter_mut() {
            if (*r >> col) & 1 == 1 {
                *r ^= pivot_row;
            }
        }
        for r in out.iter_mut() {
            if (*r >> col) & 1 == 1 {
                *r ^= pivot_row;
            }
        }
        out.push(pivot_row);
        pivots.push(col);
    }
    (out, pivots)
}

/// Reduce `v` against an rref basis; returns the residual (0 iff `v` is in the span).
fn reduce_against(v: u64, basis: &[u64], pivots: &[usize]) -> u64 {
    let mut v = v;
    for (row, &p) in basis.iter().zip(pivots) {
        if (v >> p) & 1 == 1 {
            v ^= row;
        }
    }
    v
}

/// Incrementally maintained rref span, used for membership and quotient tests.
#[derive(Clone, Debug, Default)]
pub struct Span {
    rows: Vec<u64>,
    pivots: Vec<usize>,
}

impl Span {
    pub fn new() -> Self {
        Span::default()
    }

    pub fn from_rows(rows: &[u64], cols: usize) -> Self {
        let (rows, pivots) = rref(rows, cols);
        Span { rows, pivots }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn contains(&self, v: u64) -> bool {
        reduce_against(v, &self.rows, &self.pivots) == 0
    }

    /// Insert `v`; returns true if it extended the span.
    pub fn insert(&mut self, v: u64) -> bool {
        let res = reduce_against(v, &self.rows, &self.pivots);
        if res == 0 {
            return false;
        }
        let col = res.trailing_zeros() as usize;
        for r in self.rows.iter_mut() {
            if (*r >> col) & 1 == 1 {
                *r ^= res;
            }
        }
        // keep pivot order sorted
        let at = self.pivots.partition_point(|&p| p < col);
        self.pivots.insert(at, col);
        self.rows.insert(at, res);
        true
    }

    /// All elements of the span (2^rank of them). Only for small ranks.
    pub fn elements(&self) -> Vec<u64> {
        expand_basis(&self.rows)
    }
}

/// All XOR combinations of the given basis vectors.
fn expand_basis(basis: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64];
    for &b in basis {
        let n = out.len();
        for i in 0..n {
            out.push(out[i] ^ b);
        }
    }
    out
}

/// All codewords of the null space of a parity-check matrix.
#[derive(Clone, Debug)]
pub struct Codebook {
    n: usize,
    words: Vec<u64>,
}

impl Codebook {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// log2 of the codebook size.
    pub fn dimension(&self) -> usize {
        self.words.len().trailing_zeros() as usize
    }

    /// Bit `i` of codeword `w`.
    pub fn bit(word: u64, i: usize) -> u8 {
        ((word >> i) & 1) as u8
    }
}

/// Enumerate the null space of `h` with the default dimension bound.
pub fn enumerate_codewords(h: &BitMatrix) -> Result<Codebook> {
    enumerate_codewords_bounded(h, ENUMERATION_BOUND)
}

pub fn enumerate_codewords_bounded(h: &BitMatrix, bound: usize) -> Result<Codebook> {
    let basis = h.nullspace_basis();
    if basis.len() > bound {
        return Err(Error::DimensionTooLarge { dim: basis.len(), bound });
    }
    let mut words = expand_basis(&basis);
    words.sort_unstable();
    Ok(Codebook { n: h.cols(), words })
}

/// Projection of a code onto an ordered index set, with fiber multiplicity.
#[derive(Clone, Debug)]
pub struct SubCodebook {
    index_set: Vec<usize>,
    words: Vec<u64>,
    fiber_size: u64,
}

impl SubCodebook {
    pub fn index_set(&self) -> &[usize] {
        &self.index_set
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.words.len().trailing_zeros() as usize
    }

    pub fn fiber_size(&self) -> u64 {
        self.fiber_size
    }

    pub fn width(&self) -> usize {
        self.index_set.len()
    }
}

/// Restrict a full-length word to the index set, packing bits in `index_set` order.
pub fn project_word(word: u64, index_set: &[usize]) -> u64 {
    let mut out = 0u64;
    for (j, &i) in index_set.iter().enumerate() {
        out |= ((word >> i) & 1) << j;
    }
    out
}

/// Project a codebook onto `index_set`. Projected words are deduplicated and
/// stored in sorted order; the fiber size is checked to be uniform.
pub fn project(c: &Codebook, index_set: &[usize]) -> Result<SubCodebook> {
    if index_set.is_empty() {
        return Err(Error::EmptyIndexSet);
    }
    for &i in index_set {
        if i >= c.n() {
            return Err(Error::IndexOutOfRange { index: i, len: c.n() });
        }
    }
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for &w in c.words() {
        *counts.entry(project_word(w, index_set)).or_insert(0) += 1;
    }
    let mut words: Vec<u64> = counts.keys().copied().collect();
    words.sort_unstable();
    let fiber_size = c.len() as u64 / words.len() as u64;
    debug_assert!(counts.values().all(|&k| k == fiber_size), "fiber not uniform");
    Ok(SubCodebook { index_set: index_set.to_vec(), words, fiber_size })
}

/// Basis of the orthogonal complement of `span(S.words)` within GF(2)^|I|.
pub fn dual_basis(s: &SubCodebook) -> BitMatrix {
    // x is orthogonal to every word iff it is orthogonal to a basis, i.e. x is
    // in the null space of the matrix whose rows are the word-space basis.
    let span = Span::from_rows(s.words(), s.width());
    let m = BitMatrix::from_rows(s.width(), span.rows.clone());
    let mut basis = m.nullspace_basis();
    basis.sort_unstable();
    BitMatrix::from_rows(s.width(), basis)
}

/// Dual vectors of `C_I` that are not implied by the local checks.
///
/// `local_checks` must have `|I|` columns; its rows are the in-neighborhood
/// checks restricted to `I`. An empty result certifies that the local tree
/// code equals `C_I`. Returned vectors are canonical coset representatives
/// modulo the local-check row space (minimum weight, then numerically
/// smallest), sorted.
pub fn implicit_constraints(
    h: &BitMatrix,
    index_set: &[usize],
    local_checks: &BitMatrix,
) -> Result<BitMatrix> {
    if local_checks.cols() != index_set.len() {
        return Err(Error::LengthMismatch { expected: index_set.len(), got: local_checks.cols() });
    }
    let c = enumerate_codewords(h)?;
    let sub = project(&c, index_set)?;
    let dual = dual_basis(&sub);

    let local_span = Span::from_rows(local_checks.row_words(), local_checks.cols());
    let mut accum = local_span.clone();
    let mut extra: Vec<u64> = Vec::new();
    for &d in dual.row_words() {
        if accum.insert(d) {
            extra.push(d);
        }
    }
    let local_elems = local_span.elements();
    let mut canon: Vec<u64> = extra
        .into_iter()
        .map(|v| {
            local_elems
                .iter()
                .map(|&l| v ^ l)
                .min_by_key(|&w| (w.count_ones(), w))
                .unwrap()
        })
        .collect();
    canon.sort_unstable();
    Ok(BitMatrix::from_rows(index_set.len(), canon))
}

/// JSON view of a projection: index set, dimension, dual basis, fiber size.
#[derive(Debug, Serialize)]
pub struct ProjectionReport {
    pub index_set: Vec<usize>,
    pub dimension: usize,
    pub dual_basis: Vec<Vec<u8>>,
    pub fiber_size: u64,
}

pub fn projection_report(s: &SubCodebook) -> ProjectionReport {
    let dual = dual_basis(s);
    ProjectionReport {
        index_set: s.index_set().to_vec(),
        dimension: s.dimension(),
        dual_basis: (0..dual.rows()).map(|r| dual.row_bits(r)).collect(),
        fiber_size: s.fiber_size(),
    }
}
