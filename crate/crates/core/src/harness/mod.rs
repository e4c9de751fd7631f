//! Monte Carlo BLER/complexity sweeps and the tooling around them.
//!
//! Trials are generated from per-(point, trial) RNG substreams and evaluated
//! in fixed-size batches. Batches run in parallel but are folded in trial
//! order, so the stopping point and every aggregate are identical for any
//! number of workers.

mod config;
mod export;
mod optimize;
mod oracle;

use std::path::PathBuf;

use rand::Rng;
use rayon::prelude::*;
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::channel::{ebno_to_sigma, trial_rng, ChannelError, ReceivedInstance};
use crate::code::{CodeError, CodeSpec};
use crate::complexity::OpTally;
use crate::decoders::{DecodeResult, Decoder, DecoderConfig, DecoderKind};

pub use config::{parse_key_values, parse_list, KeyValues};
pub use export::{
    read_curve_csv, read_reference_curve, render_svg, write_curve_csv, write_instance_record,
    write_svgs, CsvRow, ReferenceCurve, SvgMetric, CSV_HEADER, INSTANCE_HEADER,
};
pub use optimize::{optimize_cmax, optimize_threshold, threshold_grid, CmaxOutcome, ThresholdPoint};
pub use oracle::{ml_oracle_decode, MlOracle, ORACLE_MAX_K};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("exhaustive ML decoding needs k ≤ {ORACLE_MAX_K}, code has k = {k}")]
    OracleTooLarge { k: usize },
    #[error("reference curve: {0}")]
    Reference(String),
}

/// Trials evaluated per parallel batch. Fixed so that results never depend
/// on the worker count.
pub const BATCH_TRIALS: u64 = 512;

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Debug, PartialEq)]
pub struct SimConfig {
    /// Code name or path, as given; used for labelling results.
    pub code: String,
    pub decoder: DecoderConfig,
    pub ebno_db: Vec<f64>,
    pub min_block_errors: u64,
    pub max_trials: u64,
    pub seed: u64,
    pub workers: usize,
    pub out_dir: Option<PathBuf>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            code: "bch-32-21".into(),
            decoder: DecoderConfig::new(DecoderKind::OrdeptLt),
            ebno_db: vec![4.0, 5.0, 6.0],
            min_block_errors: 100,
            max_trials: 10_000_000,
            seed: 1,
            workers: 1,
            out_dir: None,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.min_block_errors < 1 {
            return Err(HarnessError::Config("min_block_errors must be at least 1".into()));
        }
        if self.max_trials < self.min_block_errors {
            return Err(HarnessError::Config(
                "max_trials must be at least min_block_errors".into(),
            ));
        }
        if self.workers == 0 {
            return Err(HarnessError::Config("workers must be at least 1".into()));
        }
        self.decoder.validate().map_err(HarnessError::Config)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub ebno_db: f64,
    pub trials: u64,
    pub block_errors: u64,
    pub bler: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
    pub avg_queries: f64,
    pub avg_real_ops: f64,
    pub avg_syndrome_xors: f64,
}

/// Wilson score interval for `errors` out of `trials`.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // The bounds are exactly 0 and 1 at the extremes; avoid rounding noise.
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Running sums for one curve point. Merging is plain addition.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PointAccumulator {
    pub trials: u64,
    pub block_errors: u64,
    pub ops: OpTally,
}

impl PointAccumulator {
    pub fn record(&mut self, error: bool, ops: &OpTally) {
        self.trials += 1;
        self.block_errors += error as u64;
        self.ops += ops;
    }

    pub fn finish(&self, ebno_db: f64) -> CurvePoint {
        let t = self.trials.max(1) as f64;
        let (lo, hi) = wilson_interval(self.block_errors, self.trials);
        CurvePoint {
            ebno_db,
            trials: self.trials,
            block_errors: self.block_errors,
            bler: if self.trials == 0 {
                0.0
            } else {
                self.block_errors as f64 / self.trials as f64
            },
            ci95_lo: lo,
            ci95_hi: hi,
            avg_queries: self.ops.queries as f64 / t,
            avg_real_ops: self.ops.real_ops() as f64 / t,
            avg_syndrome_xors: self.ops.syndrome_xors as f64 / t,
        }
    }
}

/// A completed trial, handed to observers in trial order.
pub struct TrialRecord<'a> {
    pub point: usize,
    pub ebno_db: f64,
    pub trial: u64,
    pub instance: &'a ReceivedInstance,
    pub result: &'a DecodeResult,
    pub block_error: bool,
}

/// Draws the information word and channel output of one trial.
pub fn simulate_trial(code: &CodeSpec, sigma: f64, seed: u64, point: usize, trial: u64) -> ReceivedInstance {
    let mut rng = trial_rng(seed, point as u32, trial as u32);
    let u: Vec<u8> = (0..code.k()).map(|_| rng.random::<bool>() as u8).collect();
    let c = code.encode(&u).expect("simulation codes carry a generator");
    ReceivedInstance::simulate(&c, sigma, &mut rng)
}

fn is_block_error(inst: &ReceivedInstance, result: &DecodeResult) -> bool {
    result.best() != inst.c_true.as_deref()
}

type BatchItem = (bool, OpTally, Option<(ReceivedInstance, DecodeResult)>);

/// Stopping rule and RNG coordinates of a single curve point.
#[derive(Clone, Copy, Debug)]
pub struct PointSpec {
    pub index: usize,
    pub ebno_db: f64,
    pub min_block_errors: u64,
    pub max_trials: u64,
    pub seed: u64,
}

/// Runs one curve point on `pool`. The observer sees every counted trial in
/// order; instances are only retained when `keep` is set.
pub fn run_point(
    decoder: &Decoder,
    spec: PointSpec,
    pool: &rayon::ThreadPool,
    keep: bool,
    mut observer: impl FnMut(&TrialRecord<'_>),
) -> Result<CurvePoint, HarnessError> {
    let code = decoder.code();
    let sigma = ebno_to_sigma(spec.ebno_db, code.rate())?;
    let mut acc = PointAccumulator::default();
    let mut next = 0u64;
    'outer: while next < spec.max_trials {
        let end = (next + BATCH_TRIALS).min(spec.max_trials);
        let batch: Vec<BatchItem> = pool.install(|| {
            (next..end)
                .into_par_iter()
                .map(|t| {
                    let inst = simulate_trial(code, sigma, spec.seed, spec.index, t);
                    let result = decoder.decode(&inst);
                    let err = is_block_error(&inst, &result);
                    let ops = result.ops;
                    (err, ops, keep.then_some((inst, result)))
                })
                .collect()
        });
        for (offset, (err, ops, kept)) in batch.iter().enumerate() {
            acc.record(*err, ops);
            if let Some((inst, result)) = kept {
                observer(&TrialRecord {
                    point: spec.index,
                    ebno_db: spec.ebno_db,
                    trial: next + offset as u64,
                    instance: inst,
                    result,
                    block_error: *err,
                });
            }
            if acc.block_errors >= spec.min_block_errors {
                break 'outer;
            }
        }
        next = end;
    }
    Ok(acc.finish(spec.ebno_db))
}

pub fn thread_pool(workers: usize) -> Result<rayon::ThreadPool, HarnessError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| HarnessError::Config(format!("thread pool: {e}")))
}

/// BLER and complexity at every configured Eb/N0.
pub fn run_bler_sweep(code: &CodeSpec, config: &SimConfig) -> Result<Vec<CurvePoint>, HarnessError> {
    run_bler_sweep_observed(code, config, false, |_| {})
}

pub fn run_bler_sweep_observed(
    code: &CodeSpec,
    config: &SimConfig,
    keep: bool,
    mut observer: impl FnMut(&TrialRecord<'_>),
) -> Result<Vec<CurvePoint>, HarnessError> {
    config.validate()?;
    let decoder = Decoder::new(code.clone(), config.decoder).map_err(HarnessError::Config)?;
    let pool = thread_pool(config.workers)?;
    config
        .ebno_db
        .iter()
        .enumerate()
        .map(|(index, &ebno_db)| {
            let spec = PointSpec {
                index,
                ebno_db,
                min_block_errors: config.min_block_errors,
                max_trials: config.max_trials,
                seed: config.seed,
            };
            run_point(&decoder, spec, &pool, keep, &mut observer)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct UncodedPoint {
    pub ebno_db: f64,
    pub bits: u64,
    pub errors: u64,
    pub ber: f64,
    /// Q(1/σ).
    pub expected: f64,
    /// Binomial standard deviation of the error count.
    pub count_sd: f64,
}

impl UncodedPoint {
    /// |errors − bits·Q(1/σ)| in binomial standard deviations.
    pub fn deviation_sigmas(&self) -> f64 {
        (self.errors as f64 - self.bits as f64 * self.expected).abs() / self.count_sd
    }
}

/// Q(x) = P(N(0,1) > x).
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Hard-decision BER of uncoded BPSK (rate 1) over `bits` bits.
pub fn uncoded_ber(ebno_db: f64, bits: u64, seed: u64, point: usize) -> Result<UncodedPoint, HarnessError> {
    let sigma = ebno_to_sigma(ebno_db, 1.0)?;
    const CHUNK: u64 = 1 << 16;
    let errors: u64 = (0..bits.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut rng = trial_rng(seed, point as u32, chunk as u32);
            let len = CHUNK.min(bits - chunk * CHUNK);
            let c: Vec<u8> = (0..len).map(|_| rng.random::<bool>() as u8).collect();
            let inst = ReceivedInstance::simulate(&c, sigma, &mut rng);
            inst.z_true.unwrap().iter().map(|&z| z as u64).sum::<u64>()
        })
        .sum();
    let expected = q_function(1.0 / sigma);
    Ok(UncodedPoint {
        ebno_db,
        bits,
        errors,
        ber: errors as f64 / bits as f64,
        expected,
        count_sd: (bits as f64 * expected * (1.0 - expected)).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{build_bch_code, hamming_7_4};

    #[test]
    fn wilson_interval_brackets_the_estimate() {
        let (lo, hi) = wilson_interval(10, 1000);
        assert!(lo < 0.01 && hi > 0.01);
        assert_eq!(wilson_interval(0, 100).0, 0.0);
        let (lo, hi) = wilson_interval(100, 100);
        assert!(lo > 0.9 && hi == 1.0);
    }

    #[test]
    fn noiseless_point_has_no_errors() {
        let code = build_bch_code(5, 2, true).unwrap();
        let cfg = SimConfig {
            ebno_db: vec![200.0],
            max_trials: 2000,
            min_block_errors: 1,
            ..SimConfig::default()
        };
        let pts = run_bler_sweep(&code, &cfg).unwrap();
        assert_eq!(pts[0].trials, 2000);
        assert_eq!(pts[0].block_errors, 0);
        assert_eq!(pts[0].avg_queries, 0.0);
    }

    #[test]
    fn stops_at_the_error_target() {
        let code = hamming_7_4();
        let mut cfg = SimConfig {
            ebno_db: vec![0.0],
            min_block_errors: 37,
            max_trials: 100_000,
            ..SimConfig::default()
        };
        cfg.decoder.c_max = 1;
        let pts = run_bler_sweep(&code, &cfg).unwrap();
        assert_eq!(pts[0].block_errors, 37);
        assert!(pts[0].trials < 100_000);
    }

    #[test]
    fn single_query_budget_is_sanity_bounded() {
        // The only query is the empty PEP, which corrects exactly the words
        // with at most one hard-decision error: BLER = P(≥ 2 errors).
        let code = build_bch_code(5, 2, true).unwrap();
        let mut cfg = SimConfig {
            ebno_db: vec![1.0],
            min_block_errors: 20_000,
            max_trials: 20_000,
            ..SimConfig::default()
        };
        cfg.decoder.q_max = 1;
        cfg.decoder.c_max = 1;
        let pts = run_bler_sweep(&code, &cfg).unwrap();
        let sigma = ebno_to_sigma(1.0, code.rate()).unwrap();
        let p = q_function(1.0 / sigma);
        let n = code.n() as i32;
        let p_le1 = (1.0 - p).powi(n) + n as f64 * p * (1.0 - p).powi(n - 1);
        let bound = 1.0 - p_le1;
        let sd = (bound * (1.0 - bound) / 20_000.0).sqrt();
        assert!(pts[0].bler < 1.0);
        assert!((pts[0].bler - bound).abs() < 4.0 * sd, "bler {} vs {}", pts[0].bler, bound);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let code = build_bch_code(5, 2, true).unwrap();
        let base = SimConfig {
            ebno_db: vec![3.0, 4.0],
            min_block_errors: 25,
            max_trials: 5000,
            ..SimConfig::default()
        };
        let one = run_bler_sweep(&code, &base).unwrap();
        let four = run_bler_sweep(&code, &SimConfig { workers: 4, ..base.clone() }).unwrap();
        assert_eq!(one, four);
    }

    #[test]
    fn rejects_bad_stopping_rules() {
        let code = hamming_7_4();
        let cfg = SimConfig {
            min_block_errors: 0,
            ..SimConfig::default()
        };
        assert!(matches!(run_bler_sweep(&code, &cfg), Err(HarnessError::Config(_))));
        let cfg = SimConfig {
            min_block_errors: 10,
            max_trials: 5,
            ..SimConfig::default()
        };
        assert!(matches!(run_bler_sweep(&code, &cfg), Err(HarnessError::Config(_))));
    }

    #[test]
    fn uncoded_ber_matches_theory() {
        let pt = uncoded_ber(4.0, 300_000, 5, 0).unwrap();
        assert!(pt.deviation_sigmas() < 3.0, "{pt:?}");
    }
}
