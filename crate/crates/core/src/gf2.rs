//! GF(2) linear algebra for the polar transform.
//!
//! `G = F^{⊗n}` is never materialized for large `N`: entries are read
//! lazily through [`generator_entry`], and the product `u·G` is the
//! in-place butterfly in [`kron_transform`].

use std::fmt;

use crate::error::{Error, Result};

/// `u · F^{⊗n}` over GF(2), in place.
///
/// Each stage XORs the upper half of every block with its lower half,
/// which is `(a, b) ↦ (a ⊕ b, b)` applied recursively.
pub fn kron_transform_in_place(u: &mut [u8]) -> Result<()> {
    let len = u.len();
    if !len.is_power_of_two() {
        return Err(Error::invalid(format!("length {len} is not a power of two")));
    }
    let mut half = 1;
    while half < len {
        for block in u.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        half *= 2;
    }
    Ok(())
}

/// Returns `u · F^{⊗n}` for a bit vector whose length is a power of two.
pub fn kron_transform(u: &[u8]) -> Result<Vec<u8>> {
    let mut x = u.to_vec();
    kron_transform_in_place(&mut x)?;
    Ok(x)
}

/// Entry `(row, col)` of `F^{⊗n}`: one iff `col`'s bits are a subset of `row`'s.
#[inline]
pub fn generator_entry(row: usize, col: usize) -> u8 {
    u8::from(col & !row == 0)
}

/// The submatrix of `F^{⊗n}` on `rows × cols`, read entry by entry.
pub fn submatrix(n: u32, rows: &[usize], cols: &[usize]) -> Result<Gf2Matrix> {
    let len = 1usize
        .checked_shl(n)
        .ok_or_else(|| Error::invalid(format!("exponent {n} too large")))?;
    if let Some(&bad) = rows.iter().chain(cols).find(|&&i| i >= len) {
        return Err(Error::invalid(format!("index {bad} out of range for N = {len}")));
    }
    let mut m = Gf2Matrix::zeros(rows.len(), cols.len());
    for (r, &i) in rows.iter().enumerate() {
        for (c, &j) in cols.iter().enumerate() {
            if generator_entry(i, j) == 1 {
                m.set(r, c, 1);
            }
        }
    }
    Ok(m)
}

/// Dense binary matrix, rows packed into 64-bit words.
#[derive(Clone, PartialEq, Eq)]
pub struct Gf2Matrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl Gf2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        Gf2Matrix {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 entries.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::invalid("ragged rows"));
            }
            for (c, &b) in row.iter().enumerate() {
                if b > 1 {
                    return Err(Error::invalid(format!("entry {b} is not a bit")));
                }
                m.set(r, c, b);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        assert!(r < self.rows && c < self.cols);
        ((self.bits[r * self.words_per_row + c / 64] >> (c % 64)) & 1) as u8
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, bit: u8) {
        assert!(r < self.rows && c < self.cols);
        let word = &mut self.bits[r * self.words_per_row + c / 64];
        let mask = 1u64 << (c % 64);
        if bit & 1 == 1 {
            *word |= mask;
        } else {
            *word &= !mask;
        }
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words_per_row..(r + 1) * self.words_per_row]
    }

    fn xor_row_into(&mut self, src: usize, dst: usize) {
        let w = self.words_per_row;
        let (s, d) = (src * w, dst * w);
        for k in 0..w {
            let v = self.bits[s + k];
            self.bits[d + k] ^= v;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let w = self.words_per_row;
        for k in 0..w {
            self.bits.swap(a * w + k, b * w + k);
        }
    }

    pub fn to_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|r| (0..self.cols).map(|c| self.get(r, c)).collect())
            .collect()
    }

    /// Matrix product over GF(2).
    pub fn mul(&self, rhs: &Gf2Matrix) -> Result<Gf2Matrix> {
        if self.cols != rhs.rows {
            return Err(Error::invalid(format!(
                "shape mismatch: {}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Gf2Matrix::zeros(self.rows, rhs.cols);
        let w = out.words_per_row;
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) == 1 {
                    let src = rhs.row_words(k);
                    let dst = &mut out.bits[r * w..(r + 1) * w];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d ^= *s;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Row vector times matrix: `v · self`.
    pub fn left_mul_vec(&self, v: &[u8]) -> Result<Vec<u8>> {
        if v.len() != self.rows {
            return Err(Error::invalid(format!(
                "vector length {} does not match {} rows",
                v.len(),
                self.rows
            )));
        }
        let mut acc = vec![0u64; self.words_per_row];
        for (r, &bit) in v.iter().enumerate() {
            if bit & 1 == 1 {
                for (a, s) in acc.iter_mut().zip(self.row_words(r)) {
                    *a ^= *s;
                }
            }
        }
        Ok((0..self.cols)
            .map(|c| ((acc[c / 64] >> (c % 64)) & 1) as u8)
            .collect())
    }

    /// Gauss-Jordan inverse over GF(2).
    pub fn invert(&self) -> Result<Gf2Matrix> {
        if self.rows != self.cols {
            return Err(Error::invalid(format!(
                "cannot invert a non-square {}x{} matrix",
                self.rows, self.cols
            )));
        }
        let size = self.rows;
        let mut work = self.clone();
        let mut inv = Gf2Matrix::identity(size);
        for col in 0..size {
            let pivot = (col..size)
                .find(|&r| work.get(r, col) == 1)
                .ok_or(Error::SingularMatrix)?;
            work.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            for r in 0..size {
                if r != col && work.get(r, col) == 1 {
                    work.xor_row_into(col, r);
                    inv.xor_row_into(col, r);
                }
            }
        }
        Ok(inv)
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Gf2Matrix {}x{} [", self.rows, self.cols)?;
        for row in self.to_rows() {
            let s: String = row.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect();
            writeln!(f, "  {s}")?;
        }
        write!(f, "]")
    }
}

/// Inverse of a square GF(2) matrix.
pub fn gf2_invert(m: &Gf2Matrix) -> Result<Gf2Matrix> {
    m.invert()
}
