//! Packed GF(2) vectors and matrices.
//!
//! Bit `j` of a vector lives in word `j / 64` at position `j % 64`.

use crate::error::{Error, Result};

pub const WORD_BITS: usize = 64;

#[inline]
pub fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD_BITS)
}

#[inline]
pub fn get_bit(words: &[u64], j: usize) -> bool {
    (words[j / WORD_BITS] >> (j % WORD_BITS)) & 1 == 1
}

#[inline]
pub fn set_bit(words: &mut [u64], j: usize, value: bool) {
    let mask = 1u64 << (j % WORD_BITS);
    if value {
        words[j / WORD_BITS] |= mask;
    } else {
        words[j / WORD_BITS] &= !mask;
    }
}

#[inline]
pub fn xor_into(acc: &mut [u64], other: &[u64]) {
    for (a, b) in acc.iter_mut().zip(other) {
        *a ^= b;
    }
}

#[inline]
pub fn parity_of_and(a: &[u64], b: &[u64]) -> bool {
    a.iter()
        .zip(b)
        .fold(0u32, |acc, (x, y)| acc ^ (x & y).count_ones())
        & 1
        == 1
}

/// Row-major packed bit matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<Vec<u64>>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: vec![vec![0; words_for(cols)]; rows],
        }
    }

    pub fn from_rows(cols: usize, rows: Vec<Vec<u64>>) -> Result<Self> {
        let w = words_for(cols);
        for row in &rows {
            if row.len() != w {
                return Err(Error::Format(format!(
                    "row has {} words, expected {w}",
                    row.len()
                )));
            }
            if cols % WORD_BITS != 0 && w > 0 && row[w - 1] >> (cols % WORD_BITS) != 0 {
                return Err(Error::Format("bits set beyond column count".into()));
            }
        }
        Ok(BitMatrix { cols, rows })
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[u64] {
        &self.rows[i]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.rows.iter().map(Vec::as_slice)
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        get_bit(&self.rows[i], j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        set_bit(&mut self.rows[i], j, value)
    }

    /// `M v^T` for a packed row vector `v` of length `num_cols`.
    pub fn mul_vec(&self, v: &[u64]) -> Vec<bool> {
        self.rows.iter().map(|r| parity_of_and(r, v)).collect()
    }

    pub fn rank(&self) -> usize {
        RowBasis::new(self).rank()
    }
}

/// Echelon basis of a row space that remembers how each basis vector was
/// formed from the original rows, so membership queries can return the
/// combination of generators.
#[derive(Clone, Debug)]
pub struct RowBasis {
    cols: usize,
    // (pivot column, reduced row, combination of original rows)
    basis: Vec<(usize, Vec<u64>, Vec<u64>)>,
    num_generators: usize,
}

impl RowBasis {
    pub fn new(m: &BitMatrix) -> Self {
        let mut basis: Vec<(usize, Vec<u64>, Vec<u64>)> = Vec::new();
        let gen_words = words_for(m.num_rows());
        for (i, row) in m.rows().enumerate() {
            let mut v = row.to_vec();
            let mut combo = vec![0u64; gen_words];
            set_bit(&mut combo, i, true);
            for (pivot, b, c) in &basis {
                if get_bit(&v, *pivot) {
                    xor_into(&mut v, b);
                    xor_into(&mut combo, c);
                }
            }
            if let Some(pivot) = first_set_bit(&v) {
                // keep the basis fully reduced on pivot columns
                for (_, b, c) in basis.iter_mut() {
                    if get_bit(b, pivot) {
                        xor_into(b, &v);
                        xor_into(c, &combo);
                    }
                }
                basis.push((pivot, v, combo));
            }
        }
        RowBasis {
            cols: m.num_cols(),
            basis,
            num_generators: m.num_rows(),
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Returns the indices of original rows whose XOR equals `v`, or `None`
    /// when `v` is outside the row space.
    pub fn solve(&self, v: &[u64]) -> Option<Vec<usize>> {
        debug_assert_eq!(v.len(), words_for(self.cols));
        let mut residual = v.to_vec();
        let mut combo = vec![0u64; words_for(self.num_generators)];
        for (pivot, b, c) in &self.basis {
            if get_bit(&residual, *pivot) {
                xor_into(&mut residual, b);
                xor_into(&mut combo, c);
            }
        }
        if residual.iter().any(|&w| w != 0) {
            return None;
        }
        Some(
            (0..self.num_generators)
                .filter(|&i| get_bit(&combo, i))
                .collect(),
        )
    }
}

pub fn first_set_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, w)| i * WORD_BITS + w.trailing_zeros() as usize)
}
