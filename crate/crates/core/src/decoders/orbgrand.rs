//! ORBGRAND with the 1-line logistic-weight schedule: every query applies a
//! full pattern and checks for a zero syndrome. With `c_max = 1` the first
//! hit is the decision; larger lists keep going and return the lightest
//! codeword found.

use super::{argmin_weight, Budget, Candidate, Completion, DecodeResult, Termination, TraceEvent};
use super::ordept::partial_syndrome;
use crate::channel::ReceivedInstance;
use crate::code::{CodeSpec, Syndrome};
use crate::complexity::OpTally;
use crate::patterns::PatternSchedule;

pub fn decode_orbgrand(
    inst: &ReceivedInstance,
    code: &CodeSpec,
    schedule: &PatternSchedule,
    budget: Budget,
) -> DecodeResult {
    decode_orbgrand_traced(inst, code, schedule, budget, |_| {})
}

pub fn decode_orbgrand_traced(
    inst: &ReceivedInstance,
    code: &CodeSpec,
    schedule: &PatternSchedule,
    budget: Budget,
    mut trace: impl FnMut(&TraceEvent<'_>),
) -> DecodeResult {
    let mut ops = OpTally::new();
    let ones: Vec<usize> = (0..inst.n()).filter(|&j| inst.w[j] != 0).collect();
    let s = partial_syndrome(Syndrome::ZERO, &ones, code);
    ops.charge_xors(ones.len());
    if s.is_zero() {
        return DecodeResult::trivial(&inst.w, ops);
    }

    let list_mode = budget.c_max > 1;
    let mut candidates: Vec<Candidate> = Vec::new();
    let mut positions: Vec<usize> = Vec::with_capacity(16);
    let mut q = 0usize;
    let termination = loop {
        if candidates.len() >= budget.c_max {
            break Termination::CMax;
        }
        if q >= budget.q_max {
            break Termination::QMax;
        }
        if q >= schedule.len() {
            break Termination::Exhausted;
        }
        let ranks = schedule.get(q);
        positions.clear();
        positions.extend(ranks.iter().map(|&r| inst.pi[r as usize - 1]));
        let residual = partial_syndrome(s, &positions, code);
        ops.charge_xors(positions.len());
        ops.count_query();
        q += 1;

        let hit = residual.is_zero();
        let mut new_weight = None;
        if hit {
            let mut flips = positions.clone();
            flips.sort_unstable();
            let cand = Candidate::new(flips, &inst.w, &inst.abs_llr);
            debug_assert!(code.syndrome(&cand.codeword).unwrap().is_zero());
            if list_mode {
                ops.charge_list_candidate(cand.flips.len());
            }
            new_weight = Some(cand.analog_weight);
            candidates.push(cand);
        }
        trace(&TraceEvent {
            query: q as u64,
            ranks,
            positions: &positions,
            completion: if hit {
                Completion::AlreadyCodeword
            } else {
                Completion::None
            },
            analog_weight: new_weight,
        });
    };

    ops.charge_selection(candidates.len());
    DecodeResult {
        best_index: argmin_weight(&candidates),
        candidates,
        queries: q as u64,
        ops,
        termination,
        trivial_word: None,
    }
}
