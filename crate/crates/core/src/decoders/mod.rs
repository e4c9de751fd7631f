//! Pattern-based soft-decision decoders.
//!
//! * [`decode_ordept_lt`]: ordered partial-error-pattern testing where each
//!   query is completed through a syndrome lookup, stopped as soon as a
//!   candidate's analog weight falls below a fixed threshold.
//! * [`decode_ordept_sogrand`]: the same query loop stopped by the
//!   soft-output estimate that the transmitted codeword is already listed.
//! * [`decode_orbgrand`]: ORBGRAND and its list variant, testing full
//!   patterns.
//!
//! All decoders share one [`CodeSpec`], one [`SyndromeLookup`] and one
//! [`PatternSchedule`]; none of them keeps state between calls.

mod lookup;
mod orbgrand;
mod ordept;
mod sogrand;

use std::fmt;
use std::str::FromStr;

use crate::channel::ReceivedInstance;
use crate::code::CodeSpec;
use crate::complexity::OpTally;
use crate::patterns::PatternSchedule;

pub use lookup::{SyndromeLookup, DIRECT_TABLE_MAX_BITS};
pub use orbgrand::{decode_orbgrand, decode_orbgrand_traced};
pub use ordept::{
    analog_weight, complete_pep, completed_flips, decode_ordept_lt, decode_ordept_lt_traced,
    decode_ordept_sogrand, decode_ordept_sogrand_traced, partial_syndrome, Completion,
};
pub use sogrand::{
    hard_decision_logprob, not_in_list_prob_direct, sogrand_not_in_list_prob,
    sogrand_pattern_logprob, LogSumExp, SograndError, SograndState,
};

/// A completed error pattern and the codeword it produces.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    /// Positions where the codeword differs from the hard decision, ascending.
    pub flips: Vec<usize>,
    pub codeword: Vec<u8>,
    /// Σ |l_j| over `flips`.
    pub analog_weight: f64,
}

impl Candidate {
    pub fn new(flips: Vec<usize>, w: &[u8], abs_llr: &[f64]) -> Self {
        let mut codeword = w.to_vec();
        for &j in &flips {
            codeword[j] ^= 1;
        }
        let analog_weight = analog_weight(&flips, abs_llr);
        Candidate {
            flips,
            codeword,
            analog_weight,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Termination {
    /// The hard decision was already a codeword; no query was made.
    Trivial,
    /// Early stop: analog weight below ε_T, or not-in-list estimate ≤ θ.
    Threshold,
    CMax,
    QMax,
    /// The pattern stream ran out before the query budget (tiny codes only).
    Exhausted,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Trivial => "trivial",
            Termination::Threshold => "threshold",
            Termination::CMax => "c_max",
            Termination::QMax => "q_max",
            Termination::Exhausted => "exhausted",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    /// Index into `candidates` of the decision. `None` on a trivial exit
    /// (the decision is the hard decision itself) and on abandonment.
    pub best_index: Option<usize>,
    pub candidates: Vec<Candidate>,
    pub queries: u64,
    pub ops: OpTally,
    pub termination: Termination,
    trivial_word: Option<Vec<u8>>,
}

impl DecodeResult {
    pub(crate) fn trivial(w: &[u8], ops: OpTally) -> Self {
        DecodeResult {
            best_index: None,
            candidates: Vec::new(),
            queries: 0,
            ops,
            termination: Termination::Trivial,
            trivial_word: Some(w.to_vec()),
        }
    }

    /// The decoded codeword, or `None` if the decoder abandoned.
    pub fn best(&self) -> Option<&[u8]> {
        match (&self.trivial_word, self.best_index) {
            (Some(w), _) => Some(w),
            (None, Some(i)) => Some(&self.candidates[i].codeword),
            (None, None) => None,
        }
    }

    pub fn best_candidate(&self) -> Option<&Candidate> {
        self.best_index.map(|i| &self.candidates[i])
    }

    pub fn is_abandoned(&self) -> bool {
        self.best().is_none()
    }
}

/// Index of the smallest analog weight; the earliest candidate wins ties.
pub(crate) fn argmin_weight(candidates: &[Candidate]) -> Option<usize> {
    candidates
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.analog_weight.total_cmp(&b.1.analog_weight).then(a.0.cmp(&b.0)))
        .map(|(i, _)| i)
}

/// Query budget and list size shared by all decoders.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub q_max: usize,
    pub c_max: usize,
}

/// One step of a decoder's query loop, for golden-file traces.
#[derive(Clone, Debug)]
pub struct TraceEvent<'a> {
    /// 1-based query index.
    pub query: u64,
    pub ranks: &'a [u16],
    pub positions: &'a [usize],
    pub completion: Completion,
    /// Set when the query produced a new candidate.
    pub analog_weight: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DecoderKind {
    OrdeptLt,
    OrdeptSogrand,
    Orbgrand,
    OrbgrandList,
}

impl DecoderKind {
    pub const ALL: [DecoderKind; 4] = [
        DecoderKind::OrdeptLt,
        DecoderKind::OrdeptSogrand,
        DecoderKind::Orbgrand,
        DecoderKind::OrbgrandList,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DecoderKind::OrdeptLt => "ordept-lt",
            DecoderKind::OrdeptSogrand => "ordept-sogrand",
            DecoderKind::Orbgrand => "orbgrand",
            DecoderKind::OrbgrandList => "orbgrand-list",
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DecoderKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        DecoderKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown decoder `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecoderConfig {
    pub kind: DecoderKind,
    pub q_max: usize,
    pub c_max: usize,
    /// ε_T for `ordept-lt`.
    pub epsilon_t: f64,
    /// θ for `ordept-sogrand`.
    pub theta: f64,
    /// Treat a zero partial syndrome as "no completion" instead of accepting
    /// the partial pattern itself as a candidate.
    pub strict_eq3: bool,
}

impl DecoderConfig {
    pub fn new(kind: DecoderKind) -> Self {
        DecoderConfig {
            kind,
            q_max: 1 << 15,
            c_max: 8,
            epsilon_t: 0.0,
            theta: 1e-3,
            strict_eq3: false,
        }
    }

    /// List size actually used: plain ORBGRAND always stops at its first hit.
    pub fn effective_c_max(&self) -> usize {
        match self.kind {
            DecoderKind::Orbgrand => 1,
            _ => self.c_max,
        }
    }

    /// The threshold column of result files: ε_T or θ, whichever applies.
    pub fn threshold(&self) -> Option<f64> {
        match self.kind {
            DecoderKind::OrdeptLt => Some(self.epsilon_t),
            DecoderKind::OrdeptSogrand => Some(self.theta),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.q_max == 0 {
            return Err("q_max must be at least 1".into());
        }
        if self.c_max == 0 {
            return Err("c_max must be at least 1".into());
        }
        if self.kind == DecoderKind::OrdeptLt && (self.epsilon_t.is_nan() || self.epsilon_t < 0.0) {
            return Err(format!("threshold must be nonnegative, got {}", self.epsilon_t));
        }
        if self.kind == DecoderKind::OrdeptSogrand && !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(format!("theta must lie in (0, 1), got {}", self.theta));
        }
        Ok(())
    }
}

/// A configured decoder bound to a code: owns the lookup table and pattern
/// schedule so that trials only borrow it.
#[derive(Clone, Debug)]
pub struct Decoder {
    config: DecoderConfig,
    code: CodeSpec,
    lookup: SyndromeLookup,
    schedule: PatternSchedule,
}

impl Decoder {
    pub fn new(code: CodeSpec, config: DecoderConfig) -> Result<Self, String> {
        config.validate()?;
        let lookup = SyndromeLookup::build(&code);
        let schedule = PatternSchedule::new(code.n(), config.q_max);
        Ok(Decoder {
            config,
            code,
            lookup,
            schedule,
        })
    }

    pub fn config(&self) -> &DecoderConfig {
        &self.config
    }

    pub fn code(&self) -> &CodeSpec {
        &self.code
    }

    pub fn lookup(&self) -> &SyndromeLookup {
        &self.lookup
    }

    pub fn schedule(&self) -> &PatternSchedule {
        &self.schedule
    }

    fn budget(&self) -> Budget {
        Budget {
            q_max: self.config.q_max,
            c_max: self.config.effective_c_max(),
        }
    }

    pub fn decode(&self, inst: &ReceivedInstance) -> DecodeResult {
        self.decode_traced(inst, |_| {})
    }

    pub fn decode_traced(
        &self,
        inst: &ReceivedInstance,
        trace: impl FnMut(&TraceEvent<'_>),
    ) -> DecodeResult {
        let c = &self.config;
        match c.kind {
            DecoderKind::OrdeptLt => decode_ordept_lt_traced(
                inst,
                &self.code,
                &self.lookup,
                &self.schedule,
                self.budget(),
                c.epsilon_t,
                c.strict_eq3,
                trace,
            ),
            DecoderKind::OrdeptSogrand => decode_ordept_sogrand_traced(
                inst,
                &self.code,
                &self.lookup,
                &self.schedule,
                self.budget(),
                c.theta,
                c.strict_eq3,
                trace,
            ),
            DecoderKind::Orbgrand | DecoderKind::OrbgrandList => {
                decode_orbgrand_traced(inst, &self.code, &self.schedule, self.budget(), trace)
            }
        }
    }
}
