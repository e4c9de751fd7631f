//! Error patterns in logistic-weight order.
//!
//! A pattern is a set of 1-based reliability ranks (rank 1 = least reliable
//! bit). Its logistic weight is the sum of its ranks, so the patterns of
//! weight W are the partitions of W into distinct parts no larger than n.
//! The stream walks W = 1, 2, …; inside one W it goes by ascending Hamming
//! weight and then lexicographically by rank list. The empty pattern is not
//! part of the stream.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("ranks must be strictly increasing and at least 1: {0:?}")]
    BadRanks(Vec<u16>),
    #[error("rank {rank} exceeds block length {n}")]
    RankOutOfRange { rank: u16, n: usize },
}

pub fn logistic_weight(ranks: &[u16]) -> Result<u32, PatternError> {
    let increasing = ranks.windows(2).all(|w| w[0] < w[1]);
    if !increasing || ranks.first() == Some(&0) {
        return Err(PatternError::BadRanks(ranks.to_vec()));
    }
    Ok(ranks.iter().map(|&r| r as u32).sum())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankPattern {
    ranks: Vec<u16>,
}

impl RankPattern {
    pub fn new(ranks: Vec<u16>) -> Result<Self, PatternError> {
        logistic_weight(&ranks)?;
        Ok(RankPattern { ranks })
    }

    pub fn ranks(&self) -> &[u16] {
        &self.ranks
    }

    pub fn logistic_weight(&self) -> u32 {
        self.ranks.iter().map(|&r| r as u32).sum()
    }

    pub fn hamming_weight(&self) -> usize {
        self.ranks.len()
    }
}

/// Maps ranks to bit positions: rank r selects position pi[r − 1].
pub fn apply_permutation(ranks: &[u16], pi: &[usize]) -> Result<Vec<usize>, PatternError> {
    ranks
        .iter()
        .map(|&r| {
            if r == 0 || r as usize > pi.len() {
                Err(PatternError::RankOutOfRange { rank: r, n: pi.len() })
            } else {
                Ok(pi[r as usize - 1])
            }
        })
        .collect()
}

/// Lexicographically smallest strictly increasing sequence of `len` values
/// in (floor, n] summing to `total`.
fn smallest_fill(floor: u32, len: u32, total: u32, n: u32) -> Option<Vec<u16>> {
    let mut out = Vec::with_capacity(len as usize);
    let mut prev = floor as i64;
    let mut rem = total as i64;
    let n = n as i64;
    for i in 0..len as i64 {
        let left = len as i64 - i - 1;
        let max_rest = left * n - left * (left - 1) / 2;
        let v = (prev + 1).max(rem - max_rest);
        let min_rest = left * v + left * (left + 1) / 2;
        if v + left > n || min_rest > rem - v {
            return None;
        }
        out.push(v as u16);
        rem -= v;
        prev = v;
    }
    (rem == 0).then_some(out)
}

/// Lexicographic successor among sequences with the same length and sum.
fn successor(cur: &[u16], total: u32, n: u32) -> Option<Vec<u16>> {
    let m = cur.len();
    for i in (0..m.saturating_sub(1)).rev() {
        let prefix: u32 = cur[..i].iter().map(|&r| r as u32).sum();
        if let Some(tail) = smallest_fill(cur[i] as u32, (m - i) as u32, total - prefix, n) {
            let mut next = cur[..i].to_vec();
            next.extend(tail);
            return Some(next);
        }
    }
    None
}

/// Streams patterns in logistic-weight order, stopping after `limit`
/// patterns or when all 2^n − 1 nonempty patterns have been produced.
#[derive(Clone, Debug)]
pub struct PatternIter {
    n: u32,
    remaining: usize,
    weight: u32,
    current: Vec<u16>,
    started: bool,
}

impl PatternIter {
    pub fn new(n: usize, limit: usize) -> Self {
        assert!(n >= 1 && n <= u16::MAX as usize, "block length out of range");
        PatternIter {
            n: n as u32,
            remaining: limit,
            weight: 1,
            current: Vec::new(),
            started: false,
        }
    }

    fn max_weight(&self) -> u32 {
        self.n * (self.n + 1) / 2
    }

    /// First pattern at logistic weight ≥ `weight`, trying Hamming weights
    /// from `min_parts` upward.
    fn first_from(&mut self, mut weight: u32, mut parts: u32) -> Option<Vec<u16>> {
        while weight <= self.max_weight() {
            while parts * (parts + 1) / 2 <= weight && parts <= self.n {
                if let Some(p) = smallest_fill(0, parts, weight, self.n) {
                    self.weight = weight;
                    return Some(p);
                }
                parts += 1;
            }
            weight += 1;
            parts = 1;
        }
        None
    }
}

impl Iterator for PatternIter {
    type Item = RankPattern;

    fn next(&mut self) -> Option<RankPattern> {
        if self.remaining == 0 {
            return None;
        }
        let next = if !self.started {
            self.started = true;
            self.first_from(1, 1)
        } else if self.current.is_empty() {
            None
        } else {
            successor(&self.current, self.weight, self.n).or_else(|| {
                let parts = self.current.len() as u32 + 1;
                self.first_from(self.weight, parts)
            })
        };
        match next {
            Some(ranks) => {
                self.remaining -= 1;
                self.current = ranks.clone();
                Some(RankPattern { ranks })
            }
            None => {
                self.remaining = 0;
                self.current.clear();
                None
            }
        }
    }
}

/// The first `len` patterns of the stream for block length `n`, stored flat
/// so that every trial can share one copy.
#[derive(Clone, Debug)]
pub struct PatternSchedule {
    n: usize,
    ranks: Vec<u16>,
    offsets: Vec<u32>,
}

impl PatternSchedule {
    pub fn new(n: usize, len: usize) -> Self {
        let mut ranks = Vec::new();
        let mut offsets = vec![0u32];
        for p in PatternIter::new(n, len) {
            ranks.extend_from_slice(p.ranks());
            offsets.push(ranks.len() as u32);
        }
        PatternSchedule { n, ranks, offsets }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> &[u16] {
        &self.ranks[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u16]> + '_ {
        (0..self.len()).map(move |i| self.get(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    /// All nonempty subsets of {1..n} sorted by (weight, size, lex).
    fn brute_force(n: usize) -> Vec<Vec<u16>> {
        let mut all: Vec<Vec<u16>> = (1u32..1 << n)
            .map(|mask| (0..n as u16).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect())
            .collect();
        all.sort_by_key(|s: &Vec<u16>| (s.iter().map(|&r| r as u32).sum::<u32>(), s.len(), s.clone()));
        all
    }

    fn stream(n: usize, k: usize) -> Vec<Vec<u16>> {
        PatternIter::new(n, k).map(|p| p.ranks().to_vec()).collect()
    }

    #[test]
    fn logistic_weight_examples() {
        assert_eq!(logistic_weight(&[]), Ok(0));
        assert_eq!(logistic_weight(&[1]), Ok(1));
        assert_eq!(logistic_weight(&[1, 3]), Ok(4));
        assert!(logistic_weight(&[2, 2]).is_err());
        assert!(logistic_weight(&[0, 2]).is_err());
        assert!(logistic_weight(&[3, 1]).is_err());
    }

    #[test]
    fn first_patterns_for_n8() {
        assert_eq!(
            stream(8, 5),
            vec![vec![1], vec![2], vec![3], vec![1, 2], vec![4]]
        );
    }

    #[test]
    fn n2_is_exhausted_after_three() {
        assert_eq!(stream(2, 100), vec![vec![1], vec![2], vec![1, 2]]);
        let mut it = PatternIter::new(2, 100);
        for _ in 0..3 {
            it.next();
        }
        assert!(it.next().is_none());
        assert!(it.next().is_none());
    }

    #[test]
    fn first_pattern_is_rank_one() {
        for n in [1, 3, 32, 256] {
            assert_eq!(stream(n, 1), vec![vec![1]]);
        }
    }

    #[test]
    fn matches_brute_force_for_small_n() {
        for n in 1..=10 {
            let expect = brute_force(n);
            let got = stream(n, usize::MAX);
            assert_eq!(got, expect, "n = {n}");
        }
    }

    #[test]
    fn schedule_matches_iterator() {
        let s = PatternSchedule::new(32, 1000);
        assert_eq!(s.len(), 1000);
        let it = stream(32, 1000);
        for (i, p) in it.iter().enumerate() {
            assert_eq!(s.get(i), &p[..]);
        }
    }

    #[test]
    fn permutation_lookup() {
        assert_eq!(apply_permutation(&[1, 2], &[0, 1, 2]), Ok(vec![0, 1]));
        assert_eq!(apply_permutation(&[1], &[2, 0, 1]), Ok(vec![2]));
        assert_eq!(
            apply_permutation(&[4], &[2, 0, 1]),
            Err(PatternError::RankOutOfRange { rank: 4, n: 3 })
        );
    }

    proptest! {
        #[test]
        fn stream_is_ordered_and_unique(n in 1usize..64, k in 1usize..3000) {
            let pats = stream(n, k);
            let mut seen = HashSet::new();
            let mut last = 0;
            for p in &pats {
                let w = logistic_weight(p).unwrap();
                prop_assert!(w >= last);
                prop_assert!(*p.last().unwrap() as usize <= n);
                prop_assert!(seen.insert(p.clone()));
                last = w;
            }
        }

        #[test]
        fn permutation_preserves_size(ranks in proptest::collection::btree_set(1u16..=20, 0..8),
                                      seed in any::<u64>()) {
            let mut pi: Vec<usize> = (0..20).collect();
            // Cheap deterministic shuffle.
            let mut s = seed | 1;
            for i in (1..20).rev() {
                s ^= s << 13; s ^= s >> 7; s ^= s << 17;
                pi.swap(i, (s % (i as u64 + 1)) as usize);
            }
            let ranks: Vec<u16> = ranks.into_iter().collect();
            let pos = apply_permutation(&ranks, &pi).unwrap();
            let distinct: HashSet<_> = pos.iter().collect();
            prop_assert_eq!(distinct.len(), ranks.len());
        }
    }
}
