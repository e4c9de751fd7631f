use std::collections::HashMap;

use crate::code::{CodeSpec, Syndrome};

/// Largest redundancy served by a direct-indexed table (2^24 entries).
pub const DIRECT_TABLE_MAX_BITS: usize = 24;

const NO_COLUMN: u32 = u32::MAX;

/// Maps a syndrome to the index of the column of H equal to it.
///
/// Duplicate columns resolve to the smallest index; the zero syndrome and
/// any value that is not a column map to `None`.
#[derive(Clone, Debug)]
pub enum SyndromeLookup {
    Direct(Vec<u32>),
    Hashed(HashMap<u128, u32>),
}

impl SyndromeLookup {
    pub fn build(code: &CodeSpec) -> Self {
        let columns = code.columns().iter().enumerate().rev();
        if code.redundancy() <= DIRECT_TABLE_MAX_BITS {
            let mut table = vec![NO_COLUMN; 1 << code.redundancy()];
            // Reverse order so the smallest index is written last.
            for (j, h) in columns {
                table[h.bits() as usize] = j as u32;
            }
            table[0] = NO_COLUMN;
            SyndromeLookup::Direct(table)
        } else {
            let mut map = HashMap::with_capacity(code.n());
            for (j, h) in columns.filter(|(_, h)| !h.is_zero()) {
                map.insert(h.bits(), j as u32);
            }
            SyndromeLookup::Hashed(map)
        }
    }

    #[inline]
    pub fn lookup(&self, s: Syndrome) -> Option<usize> {
        let j = match self {
            SyndromeLookup::Direct(table) => table[s.bits() as usize],
            SyndromeLookup::Hashed(map) => *map.get(&s.bits())?,
        };
        (j != NO_COLUMN).then_some(j as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{build_bch_code, hamming_7_4, BitRow};

    fn scan(code: &CodeSpec, s: Syndrome) -> Option<usize> {
        if s.is_zero() {
            return None;
        }
        code.columns().iter().position(|&h| h == s)
    }

    #[test]
    fn hamming_lookup() {
        let code = hamming_7_4();
        let lut = SyndromeLookup::build(&code);
        assert_eq!(lut.lookup(code.column(3)), Some(3));
        assert_eq!(lut.lookup(Syndrome::ZERO), None);
    }

    #[test]
    fn bch_32_21_exhaustive() {
        let code = build_bch_code(5, 2, true).unwrap();
        let lut = SyndromeLookup::build(&code);
        for s in 0..1u128 << code.redundancy() {
            assert_eq!(lut.lookup(Syndrome(s)), scan(&code, Syndrome(s)));
        }
    }

    #[test]
    fn duplicate_columns_pick_smallest_index() {
        let rows = vec![
            BitRow::from_bits(&[1, 0, 1, 1, 0]),
            BitRow::from_bits(&[0, 1, 1, 1, 0]),
            BitRow::from_bits(&[0, 0, 0, 0, 1]),
        ];
        let code = CodeSpec::new("dup", rows, None).unwrap();
        let lut = SyndromeLookup::build(&code);
        assert_eq!(lut.lookup(Syndrome(0b011)), Some(2));
    }

    #[test]
    fn hashed_variant_agrees_with_direct() {
        let code = build_bch_code(5, 2, true).unwrap();
        let direct = SyndromeLookup::build(&code);
        let hashed = SyndromeLookup::Hashed(
            code.columns()
                .iter()
                .enumerate()
                .rev()
                .map(|(j, h)| (h.bits(), j as u32))
                .collect(),
        );
        for s in 0..1u128 << code.redundancy() {
            assert_eq!(direct.lookup(Syndrome(s)), hashed.lookup(Syndrome(s)));
        }
    }

    #[test]
    fn zero_columns_never_match() {
        let rows = vec![BitRow::from_bits(&[1, 1, 0]), BitRow::from_bits(&[0, 1, 0])];
        let code = CodeSpec::new("z", rows, None).unwrap();
        let lut = SyndromeLookup::build(&code);
        assert_eq!(lut.lookup(Syndrome::ZERO), None);
        assert_eq!(lut.lookup(Syndrome(0b01)), Some(0));
    }
}
