//! Query and real-arithmetic metering.
//!
//! Rules, per decoder:
//! * every decoder counts queries and the (n−k)-bit column XORs it performs;
//!   the XORs are kept apart from the real-valued operations;
//! * SOGRAND termination pays `n` once for the hard-decision probability,
//!   `ω + 1` per query of Hamming weight ω (pattern probability plus its
//!   accumulation) and 2 per new candidate;
//! * likelihood thresholding pays only per candidate: `ω̃` additions for the
//!   analog weight of a completed pattern with ω̃ flips plus one comparison
//!   against the threshold;
//! * list ORBGRAND pays `ω̃` per candidate for its analog weight;
//! * picking the best of C stored candidates at loop exit costs C − 1
//!   comparisons, for every decoder.

use std::ops::AddAssign;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexityError {
    #[error("hard-decision probability already charged for this instance")]
    BaseAlreadyCharged,
    #[error("a completed error pattern flips at least one bit")]
    EmptyFlipSet,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct OpTally {
    pub queries: u64,
    pub syndrome_xors: u64,
    pub base_ops: u64,
    pub query_ops: u64,
    pub candidate_ops: u64,
    pub selection_ops: u64,
    base_charged: bool,
}

impl OpTally {
    pub fn new() -> Self {
        Self::default()
    }

    /// Total real-valued operations.
    pub fn real_ops(&self) -> u64 {
        self.base_ops + self.query_ops + self.candidate_ops + self.selection_ops
    }

    /// A query with no real-valued work attached.
    #[inline]
    pub fn count_query(&mut self) {
        self.queries += 1;
    }

    #[inline]
    pub fn charge_xors(&mut self, count: usize) {
        self.syndrome_xors += count as u64;
    }

    #[inline]
    pub fn charge_sogrand_query(&mut self, pattern_weight: usize) {
        self.queries += 1;
        self.query_ops += pattern_weight as u64 + 1;
    }

    #[inline]
    pub fn charge_sogrand_candidate(&mut self) {
        self.candidate_ops += 2;
    }

    pub fn charge_sogrand_base(&mut self, n: usize) -> Result<(), ComplexityError> {
        if self.base_charged {
            return Err(ComplexityError::BaseAlreadyCharged);
        }
        self.base_charged = true;
        self.base_ops += n as u64;
        Ok(())
    }

    pub fn charge_lt_candidate(&mut self, flips: usize) -> Result<(), ComplexityError> {
        if flips == 0 {
            return Err(ComplexityError::EmptyFlipSet);
        }
        self.candidate_ops += flips as u64 + 1;
        Ok(())
    }

    #[inline]
    pub fn charge_list_candidate(&mut self, flips: usize) {
        self.candidate_ops += flips as u64;
    }

    #[inline]
    pub fn charge_selection(&mut self, candidates: usize) {
        self.selection_ops += candidates.saturating_sub(1) as u64;
    }
}

impl AddAssign<&OpTally> for OpTally {
    fn add_assign(&mut self, rhs: &OpTally) {
        self.queries += rhs.queries;
        self.syndrome_xors += rhs.syndrome_xors;
        self.base_ops += rhs.base_ops;
        self.query_ops += rhs.query_ops;
        self.candidate_ops += rhs.candidate_ops;
        self.selection_ops += rhs.selection_ops;
        self.base_charged |= rhs.base_charged;
    }
}
