//! Narrow-sense primitive binary BCH codes, optionally extended by an overall
//! parity bit.
//!
//! Bit j of a codeword is the coefficient of x^j, so column j of H is the
//! residue x^j mod g(x). That puts the n−k parity bits at positions
//! 0..n−k and, for extended codes, the overall parity bit at position n.

use super::{BitRow, CodeError, CodeSpec, MAX_REDUNDANCY};

/// Primitive polynomials for GF(2^m), m = 3..=10, bit i = coefficient of x^i.
const PRIMITIVE_POLYNOMIALS: [(u32, u32); 8] = [
    (3, 0b1011),          // x^3 + x + 1
    (4, 0b1_0011),        // x^4 + x + 1
    (5, 0b10_0101),       // x^5 + x^2 + 1
    (6, 0b100_0011),      // x^6 + x + 1
    (7, 0b1000_1001),     // x^7 + x^3 + 1
    (8, 0b1_0001_1101),   // x^8 + x^4 + x^3 + x^2 + 1
    (9, 0b10_0001_0001),  // x^9 + x^4 + 1
    (10, 0b100_0000_1001), // x^10 + x^3 + 1
];

pub fn primitive_polynomial(m: u32) -> Option<u32> {
    PRIMITIVE_POLYNOMIALS
        .iter()
        .find(|(deg, _)| *deg == m)
        .map(|&(_, p)| p)
}

/// Log/antilog tables for GF(2^m).
struct Field {
    order: usize, // 2^m − 1
    exp: Vec<u16>,
    log: Vec<u16>,
}

impl Field {
    fn new(m: u32, poly: u32) -> Self {
        let order = (1usize << m) - 1;
        let mut exp = vec![0u16; 2 * order];
        let mut log = vec![0u16; order + 1];
        let mut x = 1u32;
        for (i, e) in exp.iter_mut().take(order).enumerate() {
            *e = x as u16;
            log[x as usize] = i as u16;
            x <<= 1;
            if x & (1 << m) != 0 {
                x ^= poly;
            }
        }
        for i in order..2 * order {
            exp[i] = exp[i - order];
        }
        Field { order, exp, log }
    }

    fn mul(&self, a: u16, b: u16) -> u16 {
        if a == 0 || b == 0 {
            0
        } else {
            self.exp[self.log[a as usize] as usize + self.log[b as usize] as usize]
        }
    }

    fn alpha_pow(&self, i: usize) -> u16 {
        self.exp[i % self.order]
    }
}

/// Minimal polynomial of α^i over GF(2), as a coefficient vector (index =
/// power of x), computed as the product of (x + α^j) over the cyclotomic
/// coset of i.
fn minimal_polynomial(field: &Field, i: usize) -> Vec<u8> {
    let mut coset = vec![i % field.order];
    let mut j = (2 * i) % field.order;
    while j != coset[0] {
        coset.push(j);
        j = (2 * j) % field.order;
    }
    let mut poly: Vec<u16> = vec![1];
    for &e in &coset {
        let root = field.alpha_pow(e);
        let mut next = vec![0u16; poly.len() + 1];
        for (d, &c) in poly.iter().enumerate() {
            next[d + 1] ^= c;
            next[d] ^= field.mul(c, root);
        }
        poly = next;
    }
    poly.into_iter()
        .map(|c| {
            debug_assert!(c <= 1, "minimal polynomial must have binary coefficients");
            c as u8
        })
        .collect()
}

fn mul_binary(a: &[u8], b: &[u8]) -> Vec<u8> {
    let mut out = vec![0u8; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] ^= y;
        }
    }
    out
}

/// Generator polynomial lcm(m_1, m_3, …, m_{2t−1}).
fn generator_polynomial(field: &Field, t: usize) -> Vec<u8> {
    let mut g = vec![1u8];
    let mut used: Vec<Vec<u8>> = Vec::new();
    for i in (1..2 * t).step_by(2) {
        let m = minimal_polynomial(field, i);
        if !used.contains(&m) {
            g = mul_binary(&g, &m);
            used.push(m);
        }
    }
    g
}

/// Builds the narrow-sense binary BCH code of length 2^m − 1 with designed
/// distance 2t + 1. With `extend`, an overall even-parity bit is appended
/// (length 2^m, same dimension) via one extra all-ones check row.
pub fn build_bch_code(m: u32, t: usize, extend: bool) -> Result<CodeSpec, CodeError> {
    let poly = primitive_polynomial(m).ok_or(CodeError::UnsupportedFieldDegree(m))?;
    if t == 0 {
        return Err(CodeError::InvalidDimensions("t must be at least 1".into()));
    }
    let field = Field::new(m, poly);
    let n = field.order;
    let g = generator_polynomial(&field, t);
    let redundancy = g.len() - 1;
    if redundancy >= n {
        return Err(CodeError::EmptyCode { n, k: 0 });
    }
    if redundancy + extend as usize > MAX_REDUNDANCY {
        return Err(CodeError::RedundancyTooLarge(redundancy + extend as usize));
    }

    // Residues x^j mod g(x), low `redundancy` coefficients of g without the
    // leading term.
    let g_low: u128 = g[..redundancy]
        .iter()
        .enumerate()
        .fold(0, |acc, (i, &c)| acc | ((c as u128) << i));
    let top = 1u128 << (redundancy - 1);
    let mut columns = Vec::with_capacity(n);
    let mut r = 1u128;
    for _ in 0..n {
        columns.push(r);
        let carry = r & top != 0;
        r = (r << 1) & (top | (top - 1));
        if carry {
            r ^= g_low;
        }
    }

    let len = n + extend as usize;
    let mut rows: Vec<BitRow> = (0..redundancy)
        .map(|i| {
            let mut row = BitRow::zeros(len);
            for (j, &col) in columns.iter().enumerate() {
                if (col >> i) & 1 == 1 {
                    row.set(j, true);
                }
            }
            row
        })
        .collect();
    if extend {
        let mut all = BitRow::zeros(len);
        for j in 0..len {
            all.set(j, true);
        }
        rows.push(all);
    }
    let k = n - redundancy;
    CodeSpec::new(format!("bch-{len}-{k}"), rows, None)
}
