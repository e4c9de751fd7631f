//! Binary linear block codes: parity-check matrices, encoders, syndromes.

mod bch;
mod gf2;
mod io;
mod polar;

use std::path::Path;

use thiserror::Error;

pub use bch::{build_bch_code, primitive_polynomial};
pub use gf2::{independent_subset, rank, rref, BitRow};
pub use io::{load_code, parse_code, save_code, write_code};
pub use polar::{build_polar_code, polar_reliability_order};

/// Syndromes are carried as a single machine word, so this is the largest
/// supported number of parity checks.
pub const MAX_REDUNDANCY: usize = 128;

#[derive(Debug, Error)]
pub enum CodeError {
    #[error("no primitive polynomial shipped for GF(2^{0}); supported degrees are 3..=10")]
    UnsupportedFieldDegree(u32),
    #[error("code has no information bits (k = {k}, n = {n})")]
    EmptyCode { n: usize, k: usize },
    #[error("block length {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("invalid dimensions: {0}")]
    InvalidDimensions(String),
    #[error("expected a word of length {expected}, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("code has no generator matrix")]
    MissingGenerator,
    #[error("generator matrix is inconsistent with H: {0}")]
    BadGenerator(String),
    #[error("parity-check matrix has rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("{0} parity checks exceed the supported maximum of {MAX_REDUNDANCY}")]
    RedundancyTooLarge(usize),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown code `{0}`")]
    UnknownCode(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `w·Hᵀ` as an (n−k)-bit word. Bit `r` is the check of row `r` of H.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syndrome(pub u128);

impl Syndrome {
    pub const ZERO: Syndrome = Syndrome(0);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn bits(self) -> u128 {
        self.0
    }
}

impl std::ops::BitXor for Syndrome {
    type Output = Syndrome;
    #[inline]
    fn bitxor(self, rhs: Syndrome) -> Syndrome {
        Syndrome(self.0 ^ rhs.0)
    }
}

impl std::ops::BitXorAssign for Syndrome {
    #[inline]
    fn bitxor_assign(&mut self, rhs: Syndrome) {
        self.0 ^= rhs.0;
    }
}

/// A binary linear (n, k) code described by a full-rank parity-check matrix.
///
/// H is kept both as packed rows and as one (n−k)-bit word per column; the
/// column words are what the decoders XOR together. Instances are immutable
/// once built.
#[derive(Clone, Debug)]
pub struct CodeSpec {
    name: String,
    n: usize,
    k: usize,
    h_rows: Vec<BitRow>,
    columns: Vec<Syndrome>,
    generator: Option<Vec<BitRow>>,
}

impl CodeSpec {
    /// Builds a code from full-rank parity-check rows. When `generator` is
    /// `None` a systematic generator is derived from H.
    pub fn new(
        name: impl Into<String>,
        h_rows: Vec<BitRow>,
        generator: Option<Vec<BitRow>>,
    ) -> Result<Self, CodeError> {
        let n = h_rows
            .first()
            .map(BitRow::len)
            .ok_or_else(|| CodeError::InvalidDimensions("H has no rows".into()))?;
        if let Some(bad) = h_rows.iter().find(|r| r.len() != n) {
            return Err(CodeError::InvalidDimensions(format!(
                "H rows have differing lengths {} and {}",
                n,
                bad.len()
            )));
        }
        let r = h_rows.len();
        if r > MAX_REDUNDANCY {
            return Err(CodeError::RedundancyTooLarge(r));
        }
        if r >= n {
            return Err(CodeError::EmptyCode { n, k: 0 });
        }
        let rank = gf2::rank(&h_rows);
        if rank != r {
            return Err(CodeError::RankDeficient { rank, expected: r });
        }
        let k = n - r;

        let columns = (0..n)
            .map(|j| {
                let mut word = 0u128;
                for (i, row) in h_rows.iter().enumerate() {
                    if row.get(j) {
                        word |= 1 << i;
                    }
                }
                Syndrome(word)
            })
            .collect();

        let generator = match generator {
            Some(g) => {
                check_generator(&g, &h_rows, k)?;
                g
            }
            None => systematic_generator(&h_rows),
        };

        Ok(CodeSpec {
            name: name.into(),
            n,
            k,
            h_rows,
            columns,
            generator: Some(generator),
        })
    }

    /// Like [`CodeSpec::new`] but tolerates redundant rows: a maximal
    /// independent subset (first occurrences win) is kept and the number of
    /// dropped rows is returned.
    pub fn from_redundant_rows(
        name: impl Into<String>,
        h_rows: Vec<BitRow>,
        generator: Option<Vec<BitRow>>,
    ) -> Result<(Self, usize), CodeError> {
        let keep = gf2::independent_subset(&h_rows);
        let dropped = h_rows.len() - keep.len();
        if dropped == 0 {
            return Ok((CodeSpec::new(name, h_rows, generator)?, 0));
        }
        let rows = keep.into_iter().map(|i| h_rows[i].clone()).collect();
        // A generator for the declared dimension cannot span the larger code.
        Ok((CodeSpec::new(name, rows, None)?, dropped))
    }

    /// Drops the generator matrix (syndrome-only use).
    pub fn without_generator(mut self) -> Self {
        self.generator = None;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of parity checks, n − k.
    pub fn redundancy(&self) -> usize {
        self.n - self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }

    pub fn h_rows(&self) -> &[BitRow] {
        &self.h_rows
    }

    pub fn generator(&self) -> Option<&[BitRow]> {
        self.generator.as_deref()
    }

    /// Column word h_j.
    #[inline]
    pub fn column(&self, j: usize) -> Syndrome {
        self.columns[j]
    }

    pub fn columns(&self) -> &[Syndrome] {
        &self.columns
    }

    fn check_len(&self, len: usize, expected: usize) -> Result<(), CodeError> {
        if len != expected {
            return Err(CodeError::LengthMismatch {
                expected,
                found: len,
            });
        }
        Ok(())
    }

    /// `w·Hᵀ`, accumulated as the XOR of h_j over the ones of `w`.
    pub fn syndrome(&self, w: &[u8]) -> Result<Syndrome, CodeError> {
        self.check_len(w.len(), self.n)?;
        Ok(w.iter()
            .zip(&self.columns)
            .filter(|(&b, _)| b != 0)
            .fold(Syndrome::ZERO, |s, (_, &h)| s ^ h))
    }

    pub fn is_codeword(&self, w: &[u8]) -> Result<bool, CodeError> {
        Ok(self.syndrome(w)?.is_zero())
    }

    /// `u·G` for k information bits.
    pub fn encode(&self, u: &[u8]) -> Result<Vec<u8>, CodeError> {
        let g = self.generator.as_ref().ok_or(CodeError::MissingGenerator)?;
        self.check_len(u.len(), self.k)?;
        let mut c = BitRow::zeros(self.n);
        for (row, _) in g.iter().zip(u).filter(|(_, &b)| b != 0) {
            c.xor_assign(row);
        }
        Ok(c.to_bits())
    }
}

fn check_generator(g: &[BitRow], h: &[BitRow], k: usize) -> Result<(), CodeError> {
    if g.len() != k {
        return Err(CodeError::BadGenerator(format!(
            "{} rows, expected {k}",
            g.len()
        )));
    }
    let n = h[0].len();
    if g.iter().any(|r| r.len() != n) {
        return Err(CodeError::BadGenerator(format!("rows must have length {n}")));
    }
    for (i, gr) in g.iter().enumerate() {
        if let Some(r) = h.iter().position(|hr| gr.dot(hr)) {
            return Err(CodeError::BadGenerator(format!(
                "row {i} fails parity check {r}"
            )));
        }
    }
    let rank = gf2::rank(g);
    if rank != k {
        return Err(CodeError::BadGenerator(format!("rank {rank}, expected {k}")));
    }
    Ok(())
}

/// Generator that is systematic on the non-pivot columns of rref(H): the
/// information bits land on those columns in ascending order.
fn systematic_generator(h_rows: &[BitRow]) -> Vec<BitRow> {
    let n = h_rows[0].len();
    let (reduced, pivots) = gf2::rref(h_rows);
    let mut is_pivot = vec![false; n];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..n)
        .filter(|&j| !is_pivot[j])
        .map(|info| {
            let mut row = BitRow::zeros(n);
            row.set(info, true);
            for (r, &p) in reduced.iter().zip(&pivots) {
                if r.get(info) {
                    row.set(p, true);
                }
            }
            row
        })
        .collect()
}

/// The (7,4) Hamming code whose column j is the binary expansion of j + 1
/// (row 0 holds the least significant bit).
pub fn hamming_7_4() -> CodeSpec {
    let rows = (0..3)
        .map(|r| {
            let bits: Vec<u8> = (1..=7u8).map(|v| (v >> r) & 1).collect();
            BitRow::from_bits(&bits)
        })
        .collect();
    CodeSpec::new("hamming-7-4", rows, None).expect("hamming(7,4) is well formed")
}

/// Names accepted by [`resolve_code`] besides file paths.
pub const BUILTIN_CODES: &[&str] = &["hamming-7-4", "bch-32-21", "bch-256-239", "polar-128-116"];

pub fn builtin_code(name: &str) -> Option<CodeSpec> {
    let code = match name {
        "hamming-7-4" => hamming_7_4(),
        "bch-32-21" => build_bch_code(5, 2, true).ok()?,
        "bch-256-239" => build_bch_code(8, 2, true).ok()?,
        "polar-128-116" => build_polar_code(128, 116).ok()?,
        _ => return None,
    };
    Some(code)
}

/// Resolves a built-in code name, falling back to loading `spec` as a path.
pub fn resolve_code(spec: &str) -> Result<CodeSpec, CodeError> {
    if let Some(code) = builtin_code(spec) {
        return Ok(code);
    }
    let path = Path::new(spec);
    if path.exists() {
        load_code(path)
    } else {
        Err(CodeError::UnknownCode(spec.to_string()))
    }
}
