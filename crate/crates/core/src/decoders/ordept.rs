//! Partial-error-pattern (PEP) decoding.
//!
//! Each query takes a pattern from the logistic-weight stream as a PEP, i.e.
//! a guess that is missing its last error. Applying it to the hard decision
//! leaves the partial syndrome s̃ = s ⊕ ⊕_{j∈PEP} h_j; if s̃ equals some column
//! h_{j*} the pattern is completed by flipping j*, so one query covers every
//! pattern that extends the PEP by a single position. The empty PEP is the
//! first query and covers all single-bit errors.

use super::sogrand::SograndState;
use super::{argmin_weight, Budget, Candidate, DecodeResult, SyndromeLookup, Termination, TraceEvent};
use crate::channel::ReceivedInstance;
use crate::code::{CodeSpec, Syndrome};
use crate::complexity::OpTally;
use crate::patterns::PatternSchedule;

/// s ⊕ h_{j_0} ⊕ … over `positions`.
#[inline]
pub fn partial_syndrome(s: Syndrome, positions: &[usize], code: &CodeSpec) -> Syndrome {
    positions.iter().fold(s, |acc, &j| acc ^ code.column(j))
}

/// What completing a PEP yields.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Completion {
    /// s̃ = 0: the PEP alone already gives a codeword.
    AlreadyCodeword,
    /// s̃ = h_j for j outside the PEP: flip j as well.
    Extend(usize),
    /// s̃ = h_j for j inside the PEP: leave j unflipped.
    Unflip(usize),
    /// No column of H equals s̃.
    None,
}

pub fn complete_pep(s_tilde: Syndrome, lookup: &SyndromeLookup, pep_positions: &[usize]) -> Completion {
    if s_tilde.is_zero() {
        return Completion::AlreadyCodeword;
    }
    match lookup.lookup(s_tilde) {
        Some(j) if pep_positions.contains(&j) => Completion::Unflip(j),
        Some(j) => Completion::Extend(j),
        None => Completion::None,
    }
}

/// Flip set of the completed pattern, ascending, or `None` without a
/// completion.
pub fn completed_flips(pep_positions: &[usize], completion: Completion) -> Option<Vec<usize>> {
    let mut flips = match completion {
        Completion::None => return None,
        Completion::AlreadyCodeword => pep_positions.to_vec(),
        Completion::Extend(j) => {
            let mut f = pep_positions.to_vec();
            f.push(j);
            f
        }
        Completion::Unflip(j) => pep_positions.iter().copied().filter(|&p| p != j).collect(),
    };
    flips.sort_unstable();
    Some(flips)
}

/// ε = Σ_{j∈flips} |l_j|.
#[inline]
pub fn analog_weight(flips: &[usize], abs_llr: &[f64]) -> f64 {
    flips.iter().map(|&j| abs_llr[j]).sum()
}

enum Verdict {
    Continue,
    /// Return the candidate just found.
    Accept,
    /// Stop and return the best listed candidate.
    StopList,
}

trait StopRule {
    fn begin(&mut self, inst: &ReceivedInstance, ops: &mut OpTally);
    fn on_query(&mut self, positions: &[usize], abs_llr: &[f64], ops: &mut OpTally);
    fn on_candidate(&mut self, cand: &Candidate, ops: &mut OpTally) -> Verdict;
}

struct LikelihoodThreshold {
    epsilon_t: f64,
}

impl StopRule for LikelihoodThreshold {
    fn begin(&mut self, _: &ReceivedInstance, _: &mut OpTally) {}

    #[inline]
    fn on_query(&mut self, _: &[usize], _: &[f64], ops: &mut OpTally) {
        ops.count_query();
    }

    fn on_candidate(&mut self, cand: &Candidate, ops: &mut OpTally) -> Verdict {
        ops.charge_lt_candidate(cand.flips.len())
            .expect("w is not a codeword, so every completion flips something");
        if cand.analog_weight < self.epsilon_t {
            Verdict::Accept
        } else {
            Verdict::Continue
        }
    }
}

struct SograndTermination {
    theta: f64,
    k: usize,
    state: Option<SograndState>,
}

impl StopRule for SograndTermination {
    fn begin(&mut self, inst: &ReceivedInstance, ops: &mut OpTally) {
        ops.charge_sogrand_base(inst.n())
            .expect("fresh tally per decode");
        self.state = Some(SograndState::new(&inst.abs_llr, self.k, self.theta));
    }

    #[inline]
    fn on_query(&mut self, positions: &[usize], abs_llr: &[f64], ops: &mut OpTally) {
        ops.charge_sogrand_query(positions.len());
        let state = self.state.as_mut().expect("begin runs first");
        state.add_query(analog_weight(positions, abs_llr));
    }

    fn on_candidate(&mut self, cand: &Candidate, ops: &mut OpTally) -> Verdict {
        ops.charge_sogrand_candidate();
        let state = self.state.as_mut().expect("begin runs first");
        state.add_candidate(cand.analog_weight);
        if state.should_stop().expect("list is nonempty") {
            Verdict::StopList
        } else {
            Verdict::Continue
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run<R: StopRule>(
    inst: &ReceivedInstance,
    code: &CodeSpec,
    lookup: &SyndromeLookup,
    schedule: &PatternSchedule,
    budget: Budget,
    strict_eq3: bool,
    mut rule: R,
    mut trace: impl FnMut(&TraceEvent<'_>),
) -> DecodeResult {
    let mut ops = OpTally::new();
    let ones: Vec<usize> = (0..inst.n()).filter(|&j| inst.w[j] != 0).collect();
    let s = partial_syndrome(Syndrome::ZERO, &ones, code);
    ops.charge_xors(ones.len());
    if s.is_zero() {
        return DecodeResult::trivial(&inst.w, ops);
    }

    rule.begin(inst, &mut ops);
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
        let ranks: &[u16] = match q {
            0 => &[],
            _ if q - 1 < schedule.len() => schedule.get(q - 1),
            _ => break Termination::Exhausted,
        };
        positions.clear();
        positions.extend(ranks.iter().map(|&r| inst.pi[r as usize - 1]));
        let s_tilde = partial_syndrome(s, &positions, code);
        ops.charge_xors(positions.len());
        rule.on_query(&positions, &inst.abs_llr, &mut ops);
        q += 1;

        let mut completion = complete_pep(s_tilde, lookup, &positions);
        if strict_eq3 && completion == Completion::AlreadyCodeword {
            completion = Completion::None;
        }
        let mut verdict = Verdict::Continue;
        let mut new_weight = None;
        if let Some(flips) = completed_flips(&positions, completion) {
            if !candidates.iter().any(|c| c.flips == flips) {
                let cand = Candidate::new(flips, &inst.w, &inst.abs_llr);
                debug_assert!(code.syndrome(&cand.codeword).unwrap().is_zero());
                new_weight = Some(cand.analog_weight);
                verdict = rule.on_candidate(&cand, &mut ops);
                candidates.push(cand);
            }
        }
        trace(&TraceEvent {
            query: q as u64,
            ranks,
            positions: &positions,
            completion,
            analog_weight: new_weight,
        });
        match verdict {
            Verdict::Continue => {}
            Verdict::Accept => {
                return DecodeResult {
                    best_index: Some(candidates.len() - 1),
                    candidates,
                    queries: q as u64,
                    ops,
                    termination: Termination::Threshold,
                    trivial_word: None,
                };
            }
            Verdict::StopList => break Termination::Threshold,
        }
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

/// PEP decoding with likelihood-based thresholding: stop at the first
/// candidate whose analog weight is strictly below `epsilon_t`, otherwise
/// return the lightest of up to `c_max` candidates found within `q_max`
/// queries. `epsilon_t = 0` never stops early.
pub fn decode_ordept_lt(
    inst: &ReceivedInstance,
    code: &CodeSpec,
    lookup: &SyndromeLookup,
    schedule: &PatternSchedule,
    budget: Budget,
    epsilon_t: f64,
) -> DecodeResult {
    decode_ordept_lt_traced(inst, code, lookup, schedule, budget, epsilon_t, false, |_| {})
}

#[allow(clippy::too_many_arguments)]
pub fn decode_ordept_lt_traced(
    inst: &ReceivedInstance,
    code: &CodeSpec,
    lookup: &SyndromeLookup,
    schedule: &PatternSchedule,
    budget: Budget,
    epsilon_t: f64,
    strict_eq3: bool,
    trace: impl FnMut(&TraceEvent<'_>),
) -> DecodeResult {
    let rule = LikelihoodThreshold { epsilon_t };
    run(inst, code, lookup, schedule, budget, strict_eq3, rule, trace)
}

/// PEP decoding stopped when the estimated probability that the transmitted
/// codeword is not yet listed drops to `theta` or below.
pub fn decode_ordept_sogrand(
    inst: &ReceivedInstance,
    code: &CodeSpec,
    lookup: &SyndromeLookup,
    schedule: &PatternSchedule,
    budget: Budget,
    theta: f64,
) -> DecodeResult {
    decode_ordept_sogrand_traced(inst, code, lookup, schedule, budget, theta, false, |_| {})
}

#[allow(clippy::too_many_arguments)]
pub fn decode_ordept_sogrand_traced(
    inst: &ReceivedInstance,
    code: &CodeSpec,
    lookup: &SyndromeLookup,
    schedule: &PatternSchedule,
    budget: Budget,
    theta: f64,
    strict_eq3: bool,
    trace: impl FnMut(&TraceEvent<'_>),
) -> DecodeResult {
    let rule = SograndTermination {
        theta,
        k: code.k(),
        state: None,
    };
    run(inst, code, lookup, schedule, budget, strict_eq3, rule, trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::trial_rng;
    use crate::code::{build_bch_code, hamming_7_4};
    use crate::decoders::{decode_orbgrand, sogrand_pattern_logprob};
    use proptest::prelude::*;
    use rand::Rng;

    const UNLIMITED: usize = usize::MAX;

    fn bch_32_21() -> CodeSpec {
        build_bch_code(5, 2, true).unwrap()
    }

    fn random_instance(code: &CodeSpec, sigma: f64, seed: u64, trial: u32) -> ReceivedInstance {
        let mut rng = trial_rng(seed, 0, trial);
        let u: Vec<u8> = (0..code.k()).map(|_| rng.random::<bool>() as u8).collect();
        let c = code.encode(&u).unwrap();
        ReceivedInstance::simulate(&c, sigma, &mut rng)
    }

    /// All-zero codeword, σ = 1, reliabilities increasing with the index
    /// except for two hard-decision errors at positions 5 and 9, which
    /// become reliability ranks 1 and 2.
    fn golden_instance() -> ReceivedInstance {
        let mut y: Vec<f64> = (0..32).map(|j| 1.0 + 0.01 * j as f64).collect();
        y[5] = -0.05;
        y[9] = -0.1;
        ReceivedInstance::from_channel_output(y, 1.0)
    }

    struct Setup {
        code: CodeSpec,
        lookup: SyndromeLookup,
        schedule: PatternSchedule,
    }

    fn setup(code: CodeSpec, len: usize) -> Setup {
        let lookup = SyndromeLookup::build(&code);
        let schedule = PatternSchedule::new(code.n(), len);
        Setup {
            code,
            lookup,
            schedule,
        }
    }

    impl Setup {
        fn lt(&self, inst: &ReceivedInstance, q_max: usize, c_max: usize, eps: f64) -> DecodeResult {
            decode_ordept_lt(inst, &self.code, &self.lookup, &self.schedule, Budget { q_max, c_max }, eps)
        }

        fn sogrand(&self, inst: &ReceivedInstance, q_max: usize, c_max: usize, theta: f64) -> DecodeResult {
            decode_ordept_sogrand(inst, &self.code, &self.lookup, &self.schedule, Budget { q_max, c_max }, theta)
        }
    }

    #[test]
    fn completion_cases() {
        let code = hamming_7_4();
        let lookup = SyndromeLookup::build(&code);
        assert_eq!(complete_pep(Syndrome::ZERO, &lookup, &[2]), Completion::AlreadyCodeword);
        assert_eq!(complete_pep(code.column(4), &lookup, &[1, 2]), Completion::Extend(4));
        assert_eq!(complete_pep(code.column(2), &lookup, &[1, 2]), Completion::Unflip(2));
        assert_eq!(completed_flips(&[3, 1], Completion::Extend(0)), Some(vec![0, 1, 3]));
        assert_eq!(completed_flips(&[3, 1], Completion::Unflip(3)), Some(vec![1]));
        assert_eq!(completed_flips(&[3, 1], Completion::AlreadyCodeword), Some(vec![1, 3]));
        assert_eq!(completed_flips(&[3, 1], Completion::None), None);

        let bch = bch_32_21();
        let lookup = SyndromeLookup::build(&bch);
        let two = bch.column(0) ^ bch.column(1);
        assert_eq!(complete_pep(two, &lookup, &[]), Completion::None);
    }

    #[test]
    fn analog_weight_sums_selected_magnitudes() {
        let abs = [0.5, 0.75, 2.0, 1.0];
        assert_eq!(analog_weight(&[1, 3], &abs), 1.75);
        assert_eq!(analog_weight(&[], &abs), 0.0);
    }

    #[test]
    fn completion_is_exhaustively_correct() {
        // Every syndrome against every PEP of size ≤ 2: a completion must
        // zero the syndrome, and "none" must mean no single column fits.
        let code = build_bch_code(4, 2, true).unwrap();
        let lookup = SyndromeLookup::build(&code);
        let n = code.n();
        let mut peps: Vec<Vec<usize>> = vec![vec![]];
        peps.extend((0..n).map(|a| vec![a]));
        peps.extend((0..n).flat_map(|a| (a + 1..n).map(move |b| vec![a, b])));
        for s in 1u128..1 << code.redundancy() {
            let s = Syndrome(s);
            for pep in &peps {
                let s_tilde = partial_syndrome(s, pep, &code);
                let completion = complete_pep(s_tilde, &lookup, pep);
                match completed_flips(pep, completion) {
                    Some(flips) => assert!(partial_syndrome(s, &flips, &code).is_zero()),
                    None => assert!((0..n).all(|j| code.column(j) != s_tilde)),
                }
            }
        }
    }

    #[test]
    fn trivial_exit_without_queries() {
        let s = setup(bch_32_21(), 64);
        let inst = ReceivedInstance::from_channel_output(vec![1.0; 32], 1.0);
        for r in [s.lt(&inst, 10, 4, 0.0), s.sogrand(&inst, 10, 4, 1e-3)] {
            assert_eq!(r.termination, Termination::Trivial);
            assert_eq!(r.queries, 0);
            assert_eq!(r.ops.real_ops(), 0);
            assert_eq!(r.best(), Some(&inst.w[..]));
        }
    }

    #[test]
    fn single_error_at_least_reliable_position() {
        let s = setup(bch_32_21(), 64);
        let mut y: Vec<f64> = (0..32).map(|j| 1.0 + 0.01 * j as f64).collect();
        y[17] = -0.2;
        let inst = ReceivedInstance::from_channel_output(y, 1.0);
        assert_eq!(inst.pi[0], 17);
        let r = s.lt(&inst, 100, 1, 0.0);
        assert_eq!(r.queries, 1);
        assert_eq!(r.best_candidate().unwrap().flips, vec![17]);
        assert_eq!(r.best(), Some(&[0u8; 32][..]));
    }

    #[test]
    fn golden_likelihood_threshold_tally() {
        // Query 1 (empty PEP): s = h5 ⊕ h9 is no column since d_min = 6.
        // Query 2 (PEP = rank 1 = position 5): s̃ = h9, extend by 9.
        // Candidate {5, 9}: ε = 2·0.05 + 2·0.1 = 0.3, charged 2 + 1.
        // XORs: 2 for the syndrome of w, 0 and 1 for the two PEPs.
        let s = setup(bch_32_21(), 64);
        let inst = golden_instance();
        let mut events = Vec::new();
        let r = decode_ordept_lt_traced(
            &inst,
            &s.code,
            &s.lookup,
            &s.schedule,
            Budget { q_max: 100, c_max: 1 },
            0.0,
            false,
            |e| events.push((e.query, e.positions.to_vec(), e.completion)),
        );
        assert_eq!(
            events,
            vec![(1, vec![], Completion::None), (2, vec![5], Completion::Extend(9))]
        );
        assert_eq!(r.termination, Termination::CMax);
        assert_eq!(r.queries, 2);
        assert_eq!(r.ops.syndrome_xors, 3);
        assert_eq!(r.ops.candidate_ops, 3);
        assert_eq!(r.ops.selection_ops, 0);
        assert_eq!(r.ops.real_ops(), 3);
        assert!((r.best_candidate().unwrap().analog_weight - 0.3).abs() < 1e-12);

        let r = s.lt(&inst, 100, 8, 1.0);
        assert_eq!(r.termination, Termination::Threshold);
        assert_eq!((r.queries, r.ops.real_ops()), (2, 3));
    }

    #[test]
    fn golden_sogrand_tally() {
        // Base 32, query 1 (ω = 0) +1, query 2 (ω = 1) +2, candidate +2.
        let s = setup(bch_32_21(), 64);
        let r = s.sogrand(&golden_instance(), 100, 1, 1e-3);
        assert_eq!(r.queries, 2);
        assert_eq!(r.ops.base_ops, 32);
        assert_eq!(r.ops.query_ops, 3);
        assert_eq!(r.ops.candidate_ops, 2);
        assert_eq!(r.ops.real_ops(), 37);
    }

    #[test]
    fn infinite_threshold_matches_first_candidate_rule() {
        let s = setup(bch_32_21(), 4096);
        let sigma = crate::channel::ebno_to_sigma(3.0, s.code.rate()).unwrap();
        for t in 0..300 {
            let inst = random_instance(&s.code, sigma, 11, t);
            let a = s.lt(&inst, 4096, 8, f64::INFINITY);
            let b = s.lt(&inst, 4096, 1, 0.0);
            assert_eq!(a.best(), b.best());
            assert_eq!(a.queries, b.queries);
        }
    }

    #[test]
    fn zero_threshold_never_stops_early() {
        let s = setup(bch_32_21(), 512);
        let sigma = crate::channel::ebno_to_sigma(2.0, s.code.rate()).unwrap();
        for t in 0..200 {
            let inst = random_instance(&s.code, sigma, 12, t);
            let r = s.lt(&inst, 512, 4, 0.0);
            assert_ne!(r.termination, Termination::Threshold);
            assert!(r.queries <= 512);
            if r.termination == Termination::QMax {
                assert_eq!(r.queries, 512);
                assert!(r.candidates.len() < 4);
            }
        }
    }

    #[test]
    fn tiny_theta_lists_the_same_candidates_as_zero_threshold() {
        let s = setup(bch_32_21(), 1024);
        let sigma = crate::channel::ebno_to_sigma(3.0, s.code.rate()).unwrap();
        for t in 0..1000 {
            let inst = random_instance(&s.code, sigma, 13, t);
            let lt = s.lt(&inst, 1024, 6, 0.0);
            let so = s.sogrand(&inst, 1024, 6, f64::MIN_POSITIVE);
            if so.termination == Termination::Threshold {
                continue;
            }
            assert_eq!(lt.candidates, so.candidates);
            assert_eq!(lt.best(), so.best());
            if lt.queries > 0 {
                assert!(lt.ops.real_ops() < so.ops.real_ops());
            }
        }
    }

    #[test]
    fn partial_patterns_find_at_least_what_full_patterns_find() {
        // ORDEPT query i + 1 applies ORBGRAND's pattern i as a PEP, so with
        // one extra query it lists a superset of ORBGRAND's codewords.
        let s = setup(bch_32_21(), 300);
        let sigma = crate::channel::ebno_to_sigma(2.5, s.code.rate()).unwrap();
        for t in 0..200 {
            let inst = random_instance(&s.code, sigma, 14, t);
            let full = decode_orbgrand(&inst, &s.code, &s.schedule, Budget { q_max: 299, c_max: UNLIMITED });
            let pep = s.lt(&inst, 300, UNLIMITED, 0.0);
            for c in &full.candidates {
                assert!(pep.candidates.iter().any(|p| p.flips == c.flips));
            }
            if let (Some(f), Some(p)) = (full.best_candidate(), pep.best_candidate()) {
                assert!(p.analog_weight <= f.analog_weight);
            }
        }
    }

    #[test]
    fn strict_completion_only_relabels_duplicates() {
        // Every proper sub-pattern of a PEP precedes it in the stream, so a
        // PEP that is itself a codeword was already found by extension.
        let s = setup(bch_32_21(), 2048);
        let sigma = crate::channel::ebno_to_sigma(2.0, s.code.rate()).unwrap();
        let budget = Budget { q_max: 2048, c_max: UNLIMITED };
        let mut relabelled = 0;
        for t in 0..100 {
            let inst = random_instance(&s.code, sigma, 15, t);
            let mut loose = Vec::new();
            let mut strict = Vec::new();
            let a = decode_ordept_lt_traced(&inst, &s.code, &s.lookup, &s.schedule, budget, 0.0, false, |e| {
                loose.push(e.completion)
            });
            let b = decode_ordept_lt_traced(&inst, &s.code, &s.lookup, &s.schedule, budget, 0.0, true, |e| {
                strict.push(e.completion)
            });
            assert_eq!(a.candidates, b.candidates);
            assert_eq!(a.ops, b.ops);
            for (x, y) in loose.iter().zip(&strict) {
                if *x == Completion::AlreadyCodeword {
                    assert_eq!(*y, Completion::None);
                    relabelled += 1;
                } else {
                    assert_eq!(x, y);
                }
            }
        }
        assert!(relabelled > 0);
    }

    #[test]
    fn candidates_are_distinct_codewords() {
        let s = setup(bch_32_21(), 2048);
        let sigma = crate::channel::ebno_to_sigma(1.5, s.code.rate()).unwrap();
        for t in 0..100 {
            let inst = random_instance(&s.code, sigma, 16, t);
            let r = s.lt(&inst, 2048, 16, 0.0);
            for (i, c) in r.candidates.iter().enumerate() {
                assert!(s.code.is_codeword(&c.codeword).unwrap());
                assert!(r.candidates[..i].iter().all(|d| d.codeword != c.codeword));
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn lightest_candidate_is_most_likely(seed in any::<u64>(), ebno in 1.0f64..5.0) {
            let s = setup(bch_32_21(), 512);
            let sigma = crate::channel::ebno_to_sigma(ebno, s.code.rate()).unwrap();
            let inst = random_instance(&s.code, sigma, seed, 0);
            let r = s.lt(&inst, 512, 8, 0.0);
            if let Some(best) = r.best_candidate() {
                let best_lp = sogrand_pattern_logprob(&best.flips, &inst.llr);
                for c in &r.candidates {
                    prop_assert!(best.analog_weight <= c.analog_weight);
                    prop_assert!(sogrand_pattern_logprob(&c.flips, &inst.llr) <= best_lp + 1e-9);
                }
            }
        }

        #[test]
        fn budgets_hold_and_decoding_is_repeatable(
            seed in any::<u64>(),
            q_max in 1usize..400,
            c_max in 1usize..6,
            eps in 0.0f64..6.0,
        ) {
            let s = setup(bch_32_21(), 400);
            let sigma = crate::channel::ebno_to_sigma(2.0, s.code.rate()).unwrap();
            let inst = random_instance(&s.code, sigma, seed, 1);
            let r = s.lt(&inst, q_max, c_max, eps);
            prop_assert!(r.queries as usize <= q_max);
            prop_assert!(r.candidates.len() <= c_max);
            prop_assert_eq!(r.ops.queries, r.queries);
            let again = s.lt(&inst, q_max, c_max, eps);
            prop_assert_eq!(r.candidates, again.candidates);
            prop_assert_eq!(r.ops, again.ops);
        }
    }
}
