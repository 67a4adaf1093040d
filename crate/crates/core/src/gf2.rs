//! Dense linear algebra over GF(2).
//!
//! Vectors and matrix rows are packed 64 bits per word, least significant bit
//! first. Addition is XOR and multiplication is AND. Elimination always picks
//! the first nonzero entry of the current column as pivot, so every result is
//! reproducible.

use std::fmt;
use std::ops::{BitXor, BitXorAssign};

use rand::Rng;

use crate::{Error, Result};

const WORD: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for w in &mut v.words {
            *w = u64::MAX;
        }
        v.clear_tail();
        v
    }

    /// The `j`-th standard basis vector.
    pub fn unit(len: usize, j: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(j, true);
        v
    }

    /// Builds a vector from 0/1 values. Any nonzero entry counts as 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (j, &b) in bits.iter().enumerate() {
            v.set(j, b != 0);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (j, &b) in bits.iter().enumerate() {
            v.set(j, b);
        }
        v
    }

    /// Element `j` is bit `j` of `value`. Requires `len <= 64`.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD);
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = value;
            v.clear_tail();
        }
        v
    }

    /// Inverse of [`BitVector::from_u64`]. Requires `len <= 64`.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= WORD);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        let mut v = Self::zeros(len);
        for w in &mut v.words {
            *w = rng.gen();
        }
        v.clear_tail();
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, j: usize) -> bool {
        assert!(j < self.len, "bit index {j} out of range for length {}", self.len);
        (self.words[j / WORD] >> (j % WORD)) & 1 == 1
    }

    pub fn set(&mut self, j: usize, bit: bool) {
        assert!(j < self.len, "bit index {j} out of range for length {}", self.len);
        let mask = 1u64 << (j % WORD);
        if bit {
            self.words[j / WORD] |= mask;
        } else {
            self.words[j / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, j: usize) {
        assert!(j < self.len);
        self.words[j / WORD] ^= 1u64 << (j % WORD);
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> Result<bool> {
        if self.len != other.len {
            return Err(Error::DimensionMismatch {
                expected: self.len,
                actual: other.len,
            });
        }
        Ok(dot_words(&self.words, &other.words))
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |j| self.get(j))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    /// Compact rendering as a string of `0`/`1` characters.
    pub fn to_bit_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    pub fn parse_bit_string(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0u8),
                '1' => Ok(1u8),
                other => Err(Error::Parse(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_bits(&bits))
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

fn dot_words(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum::<u32>() & 1 == 1
}

impl BitXorAssign<&BitVector> for BitVector {
    fn bitxor_assign(&mut self, rhs: &BitVector) {
        assert_eq!(self.len, rhs.len, "xor of vectors with different lengths");
        for (a, b) in self.words.iter_mut().zip(&rhs.words) {
            *a ^= b;
        }
    }
}

impl BitXor<&BitVector> for &BitVector {
    type Output = BitVector;

    fn bitxor(self, rhs: &BitVector) -> BitVector {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len {
            if j > 0 {
                f.write_str(" ")?;
            }
            f.write_str(if self.get(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            data: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Stacks equal-length vectors as rows.
    pub fn from_rows(rows: &[BitVector]) -> Result<Self> {
        let cols = rows.first().map_or(0, BitVector::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    actual: r.len(),
                });
            }
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        Ok(m)
    }

    /// Builds a matrix from rows of 0/1 values.
    pub fn from_bit_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let vs: Vec<BitVector> = rows.iter().map(|r| BitVector::from_bits(r.as_ref())).collect();
        Self::from_rows(&vs)
    }

    /// Entry `(r, c)` is bit `r * n + c` of `index`. Requires `n * n <= 64`.
    pub fn from_index(n: usize, index: u64) -> Self {
        assert!(n * n <= WORD);
        let mut m = Self::zeros(n, n);
        for r in 0..n {
            m.data[r] = (index >> (r * n)) & low_mask(n);
        }
        m
    }

    /// Inverse of [`BitMatrix::from_index`].
    pub fn to_index(&self) -> u64 {
        assert!(self.rows == self.cols && self.rows * self.cols <= WORD);
        let n = self.rows;
        (0..n).fold(0u64, |acc, r| acc | (self.data[r] << (r * n)))
    }

    pub fn random_matrix<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut m = Self::zeros(n, n);
        if n == 0 {
            return m;
        }
        let tail = low_mask(n - (m.stride - 1) * WORD);
        for row in m.data.chunks_mut(m.stride.max(1)) {
            for w in row.iter_mut() {
                *w = rng.gen();
            }
            if let Some(last) = row.last_mut() {
                *last &= tail;
            }
        }
        m
    }

    /// Draws uniform matrices until one is nonsingular. Returns the matrix
    /// and the number of rejected draws.
    pub fn random_nonsingular<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Self, usize) {
        let mut rejected = 0;
        loop {
            let m = Self::random_matrix(n, rng);
            if m.rank() == n {
                return (m, rejected);
            }
            rejected += 1;
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        assert!(r < self.rows && c < self.cols);
        (self.data[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, bit: bool) {
        assert!(r < self.rows && c < self.cols);
        let w = &mut self.data[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if bit {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    pub fn row(&self, r: usize) -> BitVector {
        let mut v = BitVector::zeros(self.cols);
        v.words.copy_from_slice(self.row_words(r));
        v
    }

    pub fn column(&self, c: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            v.set(r, self.get(r, c));
        }
        v
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.data[r * self.stride..(r + 1) * self.stride]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.data.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// `row[dst] ^= row[src]`
    fn add_row(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        for w in 0..self.stride {
            let v = self.data[src * self.stride + w];
            self.data[dst * self.stride + w] ^= v;
        }
    }

    /// XORs `v` into every row.
    pub fn xor_each_row(&mut self, v: &BitVector) -> Result<()> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: v.len(),
            });
        }
        for r in 0..self.rows {
            for (a, b) in self.row_words_mut(r).iter_mut().zip(v.words()) {
                *a ^= b;
            }
        }
        Ok(())
    }

    pub fn mat_vec_mul(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: v.len(),
            });
        }
        let mut out = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            out.set(r, dot_words(self.row_words(r), v.words()));
        }
        Ok(out)
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: rhs.rows,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    for w in 0..out.stride {
                        out.data[r * out.stride + w] ^= rhs.data[k * rhs.stride + w];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    out.set(c, r, true);
                }
            }
        }
        out
    }

    /// Dimension of the row space.
    pub fn rank(&self) -> usize {
        if self.stride == 1 && self.rows <= WORD {
            let mut buf = [0u64; WORD];
            buf[..self.rows].copy_from_slice(&self.data);
            return narrow::rank(&mut buf[..self.rows], self.cols);
        }
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let Some(p) = (rank..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(p, rank);
            for r in rank + 1..m.rows {
                if m.get(r, c) {
                    m.add_row(rank, r);
                }
            }
            rank += 1;
        }
        rank
    }

    pub fn is_nonsingular(&self) -> bool {
        self.is_square() && self.rank() == self.rows
    }

    fn require_square(&self) -> Result<()> {
        if self.is_square() {
            Ok(())
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// Solves `self · p = x` for `p`. Singular matrices are rejected even
    /// when the particular system is consistent.
    pub fn solve(&self, x: &BitVector) -> Result<BitVector> {
        self.require_square()?;
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: x.len(),
            });
        }
        let n = self.rows;
        if self.stride == 1 {
            let mut inv = BitMatrix::identity(n);
            narrow::gauss_jordan(&mut self.data.clone(), &mut inv.data, n).ok_or(Error::Singular)?;
            return inv.mat_vec_mul(x);
        }
        let mut m = self.clone();
        let mut rhs: Vec<bool> = x.iter().collect();
        for c in 0..n {
            let p = (c..n).find(|&r| m.get(r, c)).ok_or(Error::Singular)?;
            m.swap_rows(p, c);
            rhs.swap(p, c);
            for r in 0..n {
                if r != c && m.get(r, c) {
                    m.add_row(c, r);
                    rhs[r] ^= rhs[c];
                }
            }
        }
        Ok(BitVector::from_bools(&rhs))
    }

    pub fn invert(&self) -> Result<BitMatrix> {
        self.require_square()?;
        let n = self.rows;
        let mut inv = BitMatrix::identity(n);
        if self.stride == 1 && inv.stride == 1 {
            narrow::gauss_jordan(&mut self.data.clone(), &mut inv.data, n).ok_or(Error::Singular)?;
            return Ok(inv);
        }
        let mut m = self.clone();
        for c in 0..n {
            let p = (c..n).find(|&r| m.get(r, c)).ok_or(Error::Singular)?;
            m.swap_rows(p, c);
            inv.swap_rows(p, c);
            for r in 0..n {
                if r != c && m.get(r, c) {
                    m.add_row(c, r);
                    inv.add_row(c, r);
                }
            }
        }
        Ok(inv)
    }

    /// Gauss-Jordan reduction to reduced row echelon form, tracking the row
    /// operations applied. Returns `(reduced, transform, pivot_columns)` with
    /// `transform · self == reduced`; pivot row `i` has its leading one in
    /// column `pivot_columns[i]`.
    pub fn row_reduce(&self) -> (BitMatrix, BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let mut t = BitMatrix::identity(self.rows);
        if m.stride == 1 && t.stride == 1 {
            let pivots = narrow::reduce(&mut m.data, &mut t.data, m.cols);
            return (m, t, pivots);
        }
        let mut pivots = Vec::new();
        for c in 0..m.cols {
            let r0 = pivots.len();
            if r0 == m.rows {
                break;
            }
            let Some(p) = (r0..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.swap_rows(p, r0);
            t.swap_rows(p, r0);
            for r in 0..m.rows {
                if r != r0 && m.get(r, c) {
                    m.add_row(r0, r);
                    t.add_row(r0, r);
                }
            }
            pivots.push(c);
        }
        (m, t, pivots)
    }
}

/// Elimination on matrices whose rows fit in one word, row `r` being
/// `rows[r]`. Same pivot rule as the general path: first row with a one.
mod narrow {
    /// All ones if bit `c` of `word` is set, else zero.
    #[inline]
    fn select(word: u64, c: usize) -> u64 {
        ((word >> c) & 1).wrapping_neg()
    }

    pub fn rank(rows: &mut [u64], cols: usize) -> usize {
        let mut rank = 0;
        for c in 0..cols {
            if rank == rows.len() {
                break;
            }
            let bit = 1u64 << c;
            let Some(p) = (rank..rows.len()).find(|&r| rows[r] & bit != 0) else {
                continue;
            };
            rows.swap(p, rank);
            let pivot = rows[rank];
            for r in &mut rows[rank + 1..] {
                *r ^= pivot & select(*r, c);
            }
            rank += 1;
        }
        rank
    }

    /// Reduces square `m` to the identity, applying the same row operations
    /// to `t`. `None` if `m` is singular.
    pub fn gauss_jordan(m: &mut [u64], t: &mut [u64], n: usize) -> Option<()> {
        for c in 0..n {
            let bit = 1u64 << c;
            let p = (c..n).find(|&r| m[r] & bit != 0)?;
            m.swap(p, c);
            t.swap(p, c);
            let (pm, pt) = (m[c], t[c]);
            for r in 0..n {
                let on = select(m[r], c) & !((r == c) as u64).wrapping_neg();
                m[r] ^= pm & on;
                t[r] ^= pt & on;
            }
        }
        Some(())
    }

    pub fn reduce(m: &mut [u64], t: &mut [u64], cols: usize) -> Vec<usize> {
        let mut pivots = Vec::new();
        for c in 0..cols {
            let r0 = pivots.len();
            if r0 == m.len() {
                break;
            }
            let bit = 1u64 << c;
            let Some(p) = (r0..m.len()).find(|&r| m[r] & bit != 0) else {
                continue;
            };
            m.swap(p, r0);
            t.swap(p, r0);
            let (pm, pt) = (m[r0], t[r0]);
            for r in 0..m.len() {
                let on = select(m[r], c) & !((r == r0) as u64).wrapping_neg();
                m[r] ^= pm & on;
                t[r] ^= pt & on;
            }
            pivots.push(c);
        }
        pivots
    }
}

fn low_mask(bits: usize) -> u64 {
    if bits >= WORD {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Rows of space-separated 0/1 characters, one row per line.
impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            writeln!(f, "{}", self.row(r))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        fmt::Display::fmt(self, f)
    }
}

/// Every invertible `n × n` matrix, in increasing [`BitMatrix::to_index`]
/// order. Requires `n * n <= 64`; intended for `n <= 4`.
pub fn enumerate_invertible(n: usize) -> Vec<BitMatrix> {
    assert!(n * n <= 16, "enumeration beyond 4x4 is not supported");
    (0..1u64 << (n * n))
        .map(|idx| BitMatrix::from_index(n, idx))
        .filter(BitMatrix::is_nonsingular)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use proptest::prelude::*;
    use std::collections::{BTreeSet, HashMap};

    fn m(rows: &[&[u8]]) -> BitMatrix {
        BitMatrix::from_bit_rows(rows).unwrap()
    }

    fn a24() -> BitMatrix {
        crate::table1::printed_matrix()
    }

    #[test]
    fn identity_times_vector() {
        let v = BitVector::from_bits(&[1, 0, 1, 1, 0, 0, 1]);
        assert_eq!(BitMatrix::identity(7).mat_vec_mul(&v).unwrap(), v);
    }

    #[test]
    fn zero_matrix_annihilates() {
        let v = BitVector::ones(3);
        assert_eq!(BitMatrix::zeros(3, 3).mat_vec_mul(&v).unwrap(), BitVector::zeros(3));
    }

    #[test]
    fn row_one_of_a24_selects_p2_xor_p4() {
        let row = m(&[&[0, 1, 0, 1, 0, 0, 0]]);
        let e2 = BitVector::unit(7, 1);
        assert_eq!(row.mat_vec_mul(&e2).unwrap().to_bits(), vec![1]);
        let mut both = e2.clone();
        both.set(3, true);
        assert_eq!(row.mat_vec_mul(&both).unwrap().to_bits(), vec![0]);
    }

    #[test]
    fn mat_vec_dimension_mismatch() {
        let err = BitMatrix::identity(3).mat_vec_mul(&BitVector::zeros(4)).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 3, actual: 4 });
    }

    #[test]
    fn rank_examples() {
        assert_eq!(a24().rank(), 7);
        assert_eq!(BitMatrix::identity(5).rank(), 5);
        assert_eq!(BitMatrix::zeros(4, 4).rank(), 0);
        assert_eq!(m(&[&[1, 0, 1], &[0, 1, 1]]).rank(), 2);
        assert_eq!(m(&[&[1, 1], &[1, 1], &[0, 0]]).rank(), 1);
    }

    #[test]
    fn solve_examples() {
        let a = m(&[&[1, 1], &[0, 1]]);
        let p = a.solve(&BitVector::from_bits(&[1, 0])).unwrap();
        assert_eq!(p.to_bits(), vec![1, 0]);
        assert_eq!(a.mat_vec_mul(&p).unwrap().to_bits(), vec![1, 0]);
        let p = a.solve(&BitVector::from_bits(&[1, 1])).unwrap();
        assert_eq!(p.to_bits(), vec![0, 1]);
        assert_eq!(a.mat_vec_mul(&p).unwrap().to_bits(), vec![1, 1]);
        let x = BitVector::from_bits(&[0, 1, 1]);
        assert_eq!(BitMatrix::identity(3).solve(&x).unwrap(), x);
    }

    #[test]
    fn solve_rejects_singular_even_if_consistent() {
        let a = m(&[&[1, 1], &[1, 1]]);
        assert_eq!(a.solve(&BitVector::from_bits(&[0, 0])), Err(Error::Singular));
        assert!(matches!(
            m(&[&[1, 0, 1]]).solve(&BitVector::zeros(1)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn invert_examples() {
        assert_eq!(BitMatrix::identity(6).invert().unwrap(), BitMatrix::identity(6));
        let a = m(&[&[1, 1], &[0, 1]]);
        let inv = a.invert().unwrap();
        assert_eq!(inv, a);
        assert_eq!(a.mul(&inv).unwrap(), BitMatrix::identity(2));

        let a = a24();
        let inv = a.invert().unwrap();
        assert_eq!(a.mul(&inv).unwrap(), BitMatrix::identity(7));
        assert_eq!(inv.mul(&a).unwrap(), BitMatrix::identity(7));
        assert_eq!(BitMatrix::zeros(2, 2).invert(), Err(Error::Singular));
    }

    #[test]
    fn random_matrix_is_deterministic() {
        let a = BitMatrix::random_matrix(9, &mut seed::rng(3, "m", 0));
        let b = BitMatrix::random_matrix(9, &mut seed::rng(3, "m", 0));
        assert_eq!(a, b);
        let one = BitMatrix::random_matrix(1, &mut seed::rng(4, "m", 0));
        assert!(one == m(&[&[0]]) || one == m(&[&[1]]));
    }

    #[test]
    fn random_matrix_entries_are_balanced() {
        let mut rng = seed::rng(11, "balance", 0);
        let draws = 100_000;
        let mut ones = [0u32; 4];
        for _ in 0..draws {
            let a = BitMatrix::random_matrix(2, &mut rng);
            for (k, cell) in ones.iter_mut().enumerate() {
                *cell += a.get(k / 2, k % 2) as u32;
            }
        }
        for c in ones {
            let mean = c as f64 / draws as f64;
            assert!((mean - 0.5).abs() < 0.005, "cell mean {mean}");
        }
    }

    #[test]
    fn random_nonsingular_one_by_one() {
        let mut rng = seed::rng(5, "ns", 0);
        for _ in 0..20 {
            let (a, _) = BitMatrix::random_nonsingular(1, &mut rng);
            assert_eq!(a, m(&[&[1]]));
        }
    }

    #[test]
    fn random_nonsingular_is_uniform_over_gl2() {
        let gl2 = enumerate_invertible(2);
        assert_eq!(gl2.len(), 6);
        let mut rng = seed::rng(6, "gl2", 0);
        let draws = 60_000;
        let mut counts: HashMap<u64, u32> = HashMap::new();
        let mut rejected = 0;
        for _ in 0..draws {
            let (a, r) = BitMatrix::random_nonsingular(2, &mut rng);
            assert_eq!(a.rank(), 2);
            rejected += r;
            *counts.entry(a.to_index()).or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        for a in &gl2 {
            let f = counts[&a.to_index()] as f64 / draws as f64;
            assert!((f - 1.0 / 6.0).abs() < 0.01, "frequency {f}");
        }
        // 6 of 16 matrices are invertible: expect 10/6 rejections per draw.
        let per = rejected as f64 / draws as f64;
        assert!((per - 10.0 / 6.0).abs() < 0.05, "rejections per draw {per}");
    }

    #[test]
    fn gl_orders() {
        assert_eq!(enumerate_invertible(1).len(), 1);
        assert_eq!(enumerate_invertible(3).len(), 168);
        assert_eq!(enumerate_invertible(4).len(), 20160);
    }

    fn brute_force_rank(a: &BitMatrix) -> usize {
        // Row space by closure over subsets of rows.
        let mut span: BTreeSet<BitVector> = BTreeSet::new();
        for mask in 0u32..1 << a.rows() {
            let mut v = BitVector::zeros(a.cols());
            for r in 0..a.rows() {
                if mask >> r & 1 == 1 {
                    v ^= &a.row(r);
                }
            }
            span.insert(v);
        }
        span.len().trailing_zeros() as usize
    }

    #[test]
    fn rank_matches_row_space_enumeration_exhaustively() {
        for n in 1..=3 {
            for idx in 0..1u64 << (n * n) {
                let a = BitMatrix::from_index(n, idx);
                assert_eq!(a.rank(), brute_force_rank(&a), "{a:?}");
            }
        }
    }

    #[test]
    fn index_round_trip() {
        for idx in [0u64, 1, 0x1234, 0xffff] {
            assert_eq!(BitMatrix::from_index(4, idx).to_index(), idx);
        }
    }

    #[test]
    fn row_reduce_tracks_transform() {
        let a = m(&[&[1, 1, 0], &[1, 1, 0], &[0, 1, 1]]);
        let (r, t, piv) = a.row_reduce();
        assert_eq!(t.mul(&a).unwrap(), r);
        assert_eq!(piv, vec![0, 1]);
        assert_eq!(r.row(0).to_bits(), vec![1, 0, 1]);
        assert_eq!(r.row(1).to_bits(), vec![0, 1, 1]);
        assert!(r.row(2).is_zero());
    }

    #[test]
    fn display_renders_rows() {
        let a = m(&[&[1, 0], &[0, 1]]);
        assert_eq!(a.to_string(), "1 0\n0 1\n");
        assert_eq!(format!("{}", BitVector::from_bits(&[1, 1, 0])), "1 1 0");
    }

    #[test]
    fn wide_vectors_cross_word_boundaries() {
        let mut v = BitVector::zeros(130);
        v.set(0, true);
        v.set(64, true);
        v.set(129, true);
        assert_eq!(v.weight(), 3);
        assert_eq!(BitVector::ones(130).weight(), 130);
        let id = BitMatrix::identity(130);
        assert_eq!(id.mat_vec_mul(&v).unwrap(), v);
        assert_eq!(id.solve(&v).unwrap(), v);
    }

    fn nonsingular(n: usize, s: u64) -> BitMatrix {
        BitMatrix::random_nonsingular(n, &mut seed::rng(s, "prop", n as u64)).0
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn solve_round_trip(n in 1usize..=130, s in any::<u64>()) {
            let a = nonsingular(n, s);
            let x = BitVector::random(n, &mut seed::rng(s, "x", 0));
            let p = a.solve(&x).unwrap();
            prop_assert_eq!(a.mat_vec_mul(&p).unwrap(), x.clone());
            let inv = a.invert().unwrap();
            prop_assert_eq!(inv.mat_vec_mul(&x).unwrap(), p);
        }

        #[test]
        fn one_word_and_multi_word_paths_agree(n in 1usize..=40, extra in 0usize..=3, s in any::<u64>()) {
            // Zero columns past bit 64 force the general elimination path
            // without changing any result.
            let rows = n + extra;
            let mut rng = seed::rng(s, "paths", 0);
            let rows_v: Vec<BitVector> = (0..rows).map(|_| BitVector::random(n, &mut rng)).collect();
            let narrow = BitMatrix::from_rows(&rows_v).unwrap();
            let mut wide = BitMatrix::zeros(rows, n + 64);
            for r in 0..rows {
                for c in 0..n {
                    wide.set(r, c, narrow.get(r, c));
                }
            }
            prop_assert_eq!(narrow.rank(), wide.rank());
            let (m1, t1, p1) = narrow.row_reduce();
            let (m2, t2, p2) = wide.row_reduce();
            prop_assert_eq!(&p1, &p2);
            prop_assert_eq!(t1, t2);
            for r in 0..rows {
                for c in 0..n {
                    prop_assert_eq!(m1.get(r, c), m2.get(r, c));
                }
            }
        }

        #[test]
        fn rank_is_transpose_invariant(rows in 1usize..=20, cols in 1usize..=20, s in any::<u64>()) {
            let mut rng = seed::rng(s, "rt", 0);
            let rows_v: Vec<BitVector> = (0..rows).map(|_| BitVector::random(cols, &mut rng)).collect();
            let a = BitMatrix::from_rows(&rows_v).unwrap();
            prop_assert_eq!(a.rank(), a.transpose().rank());
            prop_assert!(a.rank() <= rows.min(cols));
        }
    }
}
