//! Packed GF(2) row vectors and the little bit of linear algebra the code
//! constructors need (rank, reduced row echelon form, greedy basis).

use std::fmt;

/// A length-`len` vector over GF(2), packed LSB-first into 64-bit words.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitRow {
    words: Vec<u64>,
    len: usize,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    /// Builds a row from 0/1 bytes; any nonzero byte counts as a one.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut row = BitRow::zeros(bits.len());
        for (j, &b) in bits.iter().enumerate() {
            if b != 0 {
                row.set(j, true);
            }
        }
        row
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, j: usize) -> bool {
        debug_assert!(j < self.len);
        (self.words[j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, j: usize, value: bool) {
        debug_assert!(j < self.len);
        let mask = 1u64 << (j % 64);
        if value {
            self.words[j / 64] |= mask;
        } else {
            self.words[j / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, j: usize) {
        debug_assert!(j < self.len);
        self.words[j / 64] ^= 1u64 << (j % 64);
    }

    pub fn xor_assign(&mut self, other: &BitRow) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitRow) -> bool {
        debug_assert_eq!(self.len, other.len);
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones % 2 == 1
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&j| self.get(j))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|j| self.get(j) as u8).collect()
    }
}

impl fmt::Debug for BitRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.len {
            f.write_str(if self.get(j) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Reduced row echelon form. Returns the nonzero reduced rows together with
/// the pivot column of each row (strictly increasing).
pub fn rref(rows: &[BitRow]) -> (Vec<BitRow>, Vec<usize>) {
    let mut work: Vec<BitRow> = rows.to_vec();
    let ncols = rows.first().map_or(0, BitRow::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == work.len() {
            break;
        }
        let Some(p) = (r..work.len()).find(|&i| work[i].get(col)) else {
            continue;
        };
        work.swap(r, p);
        let pivot_row = work[r].clone();
        for (i, row) in work.iter_mut().enumerate() {
            if i != r && row.get(col) {
                row.xor_assign(&pivot_row);
            }
        }
        pivots.push(col);
        r += 1;
    }
    work.truncate(r);
    (work, pivots)
}

pub fn rank(rows: &[BitRow]) -> usize {
    rref(rows).1.len()
}

/// Indices of a maximal linearly independent subset of `rows`, chosen
/// greedily in the given order.
pub fn independent_subset(rows: &[BitRow]) -> Vec<usize> {
    // Basis kept in echelon form keyed by leading column.
    let mut basis: Vec<BitRow> = Vec::new();
    let mut keep = Vec::new();
    for (idx, row) in rows.iter().enumerate() {
        let mut v = row.clone();
        for b in &basis {
            let lead = b.first_one().expect("basis rows are nonzero");
            if v.get(lead) {
                v.xor_assign(b);
            }
        }
        if let Some(lead) = v.first_one() {
            // Keep the basis fully reduced on its leading columns.
            for b in basis.iter_mut() {
                if b.get(lead) {
                    b.xor_assign(&v);
                }
            }
            basis.push(v);
            keep.push(idx);
        }
    }
    keep
}
