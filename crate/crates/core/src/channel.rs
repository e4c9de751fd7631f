//! BPSK over a real AWGN channel: modulation, noise, LLRs, hard decisions
//! and the reliability ordering the pattern-based decoders work from.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("code rate must lie in (0, 1], got {0}")]
    BadRate(f64),
    #[error("noise standard deviation must be positive and finite, got {0}")]
    BadSigma(f64),
}

/// σ for unit-energy BPSK symbols at the given Eb/N0:
/// σ² = 1 / (2 · R · 10^(Eb/N0 / 10)).
pub fn ebno_to_sigma(ebno_db: f64, rate: f64) -> Result<f64, ChannelError> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(ChannelError::BadRate(rate));
    }
    let ebno = 10f64.powf(ebno_db / 10.0);
    Ok((1.0 / (2.0 * rate * ebno)).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    pub ebno_db: f64,
    pub rate: f64,
    pub sigma: f64,
    pub seed: u64,
}

impl ChannelParams {
    pub fn new(ebno_db: f64, rate: f64, seed: u64) -> Result<Self, ChannelError> {
        let sigma = ebno_to_sigma(ebno_db, rate)?;
        Self::with_sigma(ebno_db, rate, sigma, seed)
    }

    /// Bypasses the Eb/N0 conversion, e.g. for near-noiseless checks.
    pub fn with_sigma(ebno_db: f64, rate: f64, sigma: f64, seed: u64) -> Result<Self, ChannelError> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(ChannelError::BadSigma(sigma));
        }
        Ok(ChannelParams {
            ebno_db,
            rate,
            sigma,
            seed,
        })
    }
}

/// Generator for trial `trial` at sweep point `point`. Each (point, trial)
/// pair gets its own ChaCha stream, so results do not depend on which worker
/// runs which trial.
pub fn trial_rng(seed: u64, point: u32, trial: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point as u64) << 32) | trial as u64);
    rng
}

/// x_i = 1 − 2c_i.
pub fn modulate(c: &[u8]) -> Vec<f64> {
    c.iter().map(|&b| 1.0 - 2.0 * b as f64).collect()
}

/// y = x + ζ with ζ_i ~ N(0, σ²).
pub fn transmit<R: Rng + ?Sized>(x: &[f64], sigma: f64, rng: &mut R) -> Vec<f64> {
    x.iter()
        .map(|&xi| {
            let z: f64 = rng.sample(StandardNormal);
            xi + sigma * z
        })
        .collect()
}

/// l_i = 2y_i/σ², returned together with |l_i|.
pub fn compute_llr(y: &[f64], sigma: f64) -> (Vec<f64>, Vec<f64>) {
    let scale = 2.0 / (sigma * sigma);
    let llr: Vec<f64> = y.iter().map(|&yi| scale * yi).collect();
    let abs = llr.iter().map(|l| l.abs()).collect();
    (llr, abs)
}

/// w_i = 1 iff y_i < 0; an exact zero decides for 0.
pub fn hard_decision(y: &[f64]) -> Vec<u8> {
    y.iter().map(|&yi| (yi < 0.0) as u8).collect()
}

/// Positions sorted by ascending |l|, ties kept in index order.
pub fn sort_reliability(abs_llr: &[f64]) -> Vec<usize> {
    let mut pi: Vec<usize> = (0..abs_llr.len()).collect();
    pi.sort_by(|&a, &b| abs_llr[a].total_cmp(&abs_llr[b]));
    pi
}

/// One channel use as seen by a decoder.
#[derive(Clone, Debug, PartialEq)]
pub struct ReceivedInstance {
    pub y: Vec<f64>,
    pub llr: Vec<f64>,
    pub abs_llr: Vec<f64>,
    pub w: Vec<u8>,
    pub pi: Vec<usize>,
    /// Transmitted codeword and c ⊕ w, when known (simulation only).
    pub c_true: Option<Vec<u8>>,
    pub z_true: Option<Vec<u8>>,
}

impl ReceivedInstance {
    pub fn from_channel_output(y: Vec<f64>, sigma: f64) -> Self {
        let (llr, abs_llr) = compute_llr(&y, sigma);
        let w = hard_decision(&y);
        let pi = sort_reliability(&abs_llr);
        debug_assert!(is_permutation(&pi));
        ReceivedInstance {
            y,
            llr,
            abs_llr,
            w,
            pi,
            c_true: None,
            z_true: None,
        }
    }

    /// Modulates `c`, passes it through the channel and records the truth.
    pub fn simulate<R: Rng + ?Sized>(c: &[u8], sigma: f64, rng: &mut R) -> Self {
        let y = transmit(&modulate(c), sigma, rng);
        let mut inst = Self::from_channel_output(y, sigma);
        inst.z_true = Some(c.iter().zip(&inst.w).map(|(a, b)| a ^ b).collect());
        inst.c_true = Some(c.to_vec());
        inst
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }
}

fn is_permutation(pi: &[usize]) -> bool {
    let mut seen = vec![false; pi.len()];
    pi.iter().all(|&p| p < seen.len() && !std::mem::replace(&mut seen[p], true))
}
