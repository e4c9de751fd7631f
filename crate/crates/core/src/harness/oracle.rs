//! Exhaustive maximum-likelihood decoding for codes with k ≤ 24.
//!
//! Under BPSK/AWGN the ML codeword minimizes Σ |l_j| over the positions
//! where it disagrees with the hard decision. The oracle walks all 2^k
//! codewords in Gray-code order using the systematic structure of rref(H):
//! info bits sit on the non-pivot columns and each info bit toggles a fixed
//! set of pivot (parity) bits. Costs are summed from byte-indexed partial
//! tables, so every codeword's cost is evaluated the same way.

use super::HarnessError;
use crate::channel::ReceivedInstance;
use crate::code::{rref, CodeSpec};

pub const ORACLE_MAX_K: usize = 24;

#[derive(Clone, Debug)]
pub struct MlOracle {
    n: usize,
    info_cols: Vec<usize>,
    pivot_cols: Vec<usize>,
    /// For each info column, the pivot bits it toggles (bit r = pivot r).
    toggles: Vec<u128>,
}

/// Σ of per-bit weights over the set bits of a mask, via 8-bit chunks.
struct ChunkTable {
    tables: Vec<[f64; 256]>,
}

impl ChunkTable {
    fn new(weights: &[f64]) -> Self {
        let tables = weights
            .chunks(8)
            .map(|chunk| {
                let mut t = [0.0; 256];
                for (byte, slot) in t.iter_mut().enumerate() {
                    *slot = chunk
                        .iter()
                        .enumerate()
                        .filter(|(b, _)| byte >> b & 1 == 1)
                        .map(|(_, &w)| w)
                        .sum();
                }
                t
            })
            .collect();
        ChunkTable { tables }
    }

    #[inline]
    fn sum(&self, mask: u128) -> f64 {
        let mut total = 0.0;
        for (i, t) in self.tables.iter().enumerate() {
            total += t[(mask >> (8 * i)) as usize & 0xff];
        }
        total
    }
}

impl MlOracle {
    pub fn new(code: &CodeSpec) -> Result<Self, HarnessError> {
        if code.k() > ORACLE_MAX_K {
            return Err(HarnessError::OracleTooLarge { k: code.k() });
        }
        let (reduced, pivots) = rref(code.h_rows());
        let n = code.n();
        let mut is_pivot = vec![false; n];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let info_cols: Vec<usize> = (0..n).filter(|&j| !is_pivot[j]).collect();
        let toggles = info_cols
            .iter()
            .map(|&c| {
                reduced
                    .iter()
                    .enumerate()
                    .filter(|(_, row)| row.get(c))
                    .fold(0u128, |m, (r, _)| m | 1 << r)
            })
            .collect();
        Ok(MlOracle {
            n,
            info_cols,
            pivot_cols: pivots,
            toggles,
        })
    }

    fn codeword(&self, info: u32, parity: u128) -> Vec<u8> {
        let mut c = vec![0u8; self.n];
        for (b, &col) in self.info_cols.iter().enumerate() {
            c[col] = (info >> b & 1) as u8;
        }
        for (r, &col) in self.pivot_cols.iter().enumerate() {
            c[col] = (parity >> r & 1) as u8;
        }
        c
    }

    pub fn decode(&self, inst: &ReceivedInstance) -> Vec<u8> {
        let info_w: Vec<f64> = self.info_cols.iter().map(|&j| inst.abs_llr[j]).collect();
        let pivot_w: Vec<f64> = self.pivot_cols.iter().map(|&j| inst.abs_llr[j]).collect();
        let info_table = ChunkTable::new(&info_w);
        let pivot_table = ChunkTable::new(&pivot_w);
        let w_info = self
            .info_cols
            .iter()
            .enumerate()
            .fold(0u32, |m, (b, &j)| m | (inst.w[j] as u32) << b);
        let w_pivot = self
            .pivot_cols
            .iter()
            .enumerate()
            .fold(0u128, |m, (r, &j)| m | (inst.w[j] as u128) << r);

        let cost = |info: u32, parity: u128| {
            info_table.sum((info ^ w_info) as u128) + pivot_table.sum(parity ^ w_pivot)
        };
        let mut info = 0u32;
        let mut parity = 0u128;
        let mut best = (cost(0, 0), 0u32, 0u128);
        for i in 1u64..(1u64 << self.info_cols.len()) {
            let b = i.trailing_zeros() as usize;
            info ^= 1 << b;
            parity ^= self.toggles[b];
            let c = cost(info, parity);
            if c < best.0
                || (c == best.0 && self.codeword(info, parity) < self.codeword(best.1, best.2))
            {
                best = (c, info, parity);
            }
        }
        self.codeword(best.1, best.2)
    }
}

/// One-shot form of [`MlOracle::decode`].
pub fn ml_oracle_decode(inst: &ReceivedInstance, code: &CodeSpec) -> Result<Vec<u8>, HarnessError> {
    Ok(MlOracle::new(code)?.decode(inst))
}
