//! Polar codes from a fixed polarization-weight reliability ordering.
//!
//! Channel i of the length-N transform gets weight Σ_b bit_b(i)·β^b with
//! β = 2^(1/4); larger weight means more reliable. The k heaviest indices carry
//! information and the rest are frozen to zero. Since the Kronecker power
//! F^{⊗m} of F = [[1,0],[1,1]] is its own inverse over GF(2), a word x is a
//! codeword iff (x·F^{⊗m})_f = 0 for every frozen f, so the parity checks are
//! the columns of the transform at the frozen indices.

use super::{BitRow, CodeError, CodeSpec};

const BETA: f64 = 1.189_207_115_002_721; // 2^(1/4)

fn polarization_weight(i: usize) -> f64 {
    let mut w = 0.0;
    let mut p = 1.0;
    let mut x = i;
    while x != 0 {
        if x & 1 == 1 {
            w += p;
        }
        p *= BETA;
        x >>= 1;
    }
    w
}

/// Channel indices of a length-`n` polar transform, least reliable first.
/// Equal weights fall back to index order.
pub fn polar_reliability_order(n: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        polarization_weight(a)
            .total_cmp(&polarization_weight(b))
            .then(a.cmp(&b))
    });
    idx
}

pub fn build_polar_code(n: usize, k: usize) -> Result<CodeSpec, CodeError> {
    if n < 2 || !n.is_power_of_two() {
        return Err(CodeError::NotPowerOfTwo(n));
    }
    if k == 0 || k >= n {
        return Err(CodeError::InvalidDimensions(format!(
            "polar dimension must satisfy 0 < k < n, got k={k}, n={n}"
        )));
    }
    let order = polar_reliability_order(n);
    let mut frozen: Vec<usize> = order[..n - k].to_vec();
    frozen.sort_unstable();
    // Column f of F^{⊗m}: entry i is set iff the bits of f are a subset of i.
    let rows = frozen
        .iter()
        .map(|&f| {
            let mut row = BitRow::zeros(n);
            for i in (0..n).filter(|i| i & f == f) {
                row.set(i, true);
            }
            row
        })
        .collect();
    CodeSpec::new(format!("polar-{n}-{k}"), rows, None)
}
