//! Soft-output probabilities for SOGRAND-style termination.
//!
//! A guessed word that differs from the hard decision on `flips` has
//! probability p(w ⊕ e | l) = Π_j σ(|l_j|) · Π_{j∈flips} e^{−|l_j|}, with σ the
//! logistic function. Everything is kept as log-probabilities: the product
//! over all n bits underflows long before n = 256.

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SograndError {
    #[error("the candidate list is empty")]
    EmptyList,
}

const LN_2: f64 = std::f64::consts::LN_2;

/// log p(w | l) = −Σ_j ln(1 + e^{−|l_j|}), the log-probability of the hard
/// decision itself.
pub fn hard_decision_logprob(abs_llr: &[f64]) -> f64 {
    -abs_llr.iter().map(|&a| (-a).exp().ln_1p()).sum::<f64>()
}

/// log-probability of the word obtained by flipping `flips` in the hard
/// decision of `llr`.
pub fn sogrand_pattern_logprob(flips: &[usize], llr: &[f64]) -> f64 {
    let abs: Vec<f64> = llr.iter().map(|l| l.abs()).collect();
    hard_decision_logprob(&abs) - flips.iter().map(|&j| abs[j]).sum::<f64>()
}

/// Running log Σ exp(x_i), stable for any order of insertion.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogSumExp {
    max: f64,
    scaled: f64,
}

impl Default for LogSumExp {
    fn default() -> Self {
        LogSumExp {
            max: f64::NEG_INFINITY,
            scaled: 0.0,
        }
    }
}

impl LogSumExp {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            self.scaled = self.scaled * (self.max - x).exp() + 1.0;
            self.max = x;
        } else {
            self.scaled += (x - self.max).exp();
        }
    }

    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.scaled.ln()
        }
    }
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

/// ln(1 − e^x) for x ≤ 0.
fn log1m_exp(x: f64) -> f64 {
    if x > -LN_2 {
        (-x.exp_m1()).ln()
    } else {
        (-x.exp()).ln_1p()
    }
}

/// Accumulated probabilities of one SOGRAND-terminated decode.
#[derive(Clone, Debug)]
pub struct SograndState {
    /// log p(w | l), computed once per instance.
    pub base_logprob: f64,
    /// log p_noise: every queried pattern.
    pub noise: LogSumExp,
    /// log Σ over listed codewords of p(ĉ | l).
    pub list: LogSumExp,
    pub list_log_probs: Vec<f64>,
    pub theta: f64,
    pub n: usize,
    pub k: usize,
}

impl SograndState {
    pub fn new(abs_llr: &[f64], k: usize, theta: f64) -> Self {
        SograndState {
            base_logprob: hard_decision_logprob(abs_llr),
            noise: LogSumExp::new(),
            list: LogSumExp::new(),
            list_log_probs: Vec::new(),
            theta,
            n: abs_llr.len(),
            k,
        }
    }

    /// Records a queried pattern with analog weight `weight`.
    #[inline]
    pub fn add_query(&mut self, weight: f64) {
        self.noise.add(self.base_logprob - weight);
    }

    /// Records a new listed codeword with analog weight `weight`.
    pub fn add_candidate(&mut self, weight: f64) {
        let lp = self.base_logprob - weight;
        self.list.add(lp);
        self.list_log_probs.push(lp);
    }

    pub fn should_stop(&self) -> Result<bool, SograndError> {
        Ok(sogrand_not_in_list_prob(self)? <= self.theta)
    }
}

/// Estimated probability that the transmitted codeword is not in the list:
///
/// P = (1 − T) 2^{k−n} / (Σ_L + (1 − T) 2^{k−n}),   T = p_noise + Σ_L,
///
/// evaluated with log-sum-exp and clamped to [0, 1].
pub fn sogrand_not_in_list_prob(state: &SograndState) -> Result<f64, SograndError> {
    if state.list_log_probs.is_empty() {
        return Err(SograndError::EmptyList);
    }
    let log_list = state.list.value();
    let log_total = log_add_exp(state.noise.value(), log_list);
    if log_total >= 0.0 {
        return Ok(0.0);
    }
    let log_rest = log1m_exp(log_total) + (state.k as f64 - state.n as f64) * LN_2;
    let log_den = log_add_exp(log_list, log_rest);
    Ok((log_rest - log_den).exp().clamp(0.0, 1.0))
}

/// The same estimate evaluated directly on probabilities. Only usable for
/// short blocks where nothing underflows.
pub fn not_in_list_prob_direct(p_noise: f64, list_probs: &[f64], n: usize, k: usize) -> f64 {
    let listed: f64 = list_probs.iter().sum();
    let prior = 2f64.powi(k as i32 - n as i32);
    // Overlapping noise and list mass can push T past 1; nothing is left.
    let rest = (1.0 - (p_noise + listed)).max(0.0) * prior;
    (rest / (listed + rest)).clamp(0.0, 1.0)
}
