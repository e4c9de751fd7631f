//! `ordept` command-line front end.
//!
//! Settings are layered: built-in defaults, then `--config FILE`
//! (`key = value` lines using the long flag names), then explicit flags.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use ordept::code::{resolve_code, CodeSpec};
use ordept::decoders::{Decoder, DecoderKind, TraceEvent};
use ordept::harness::{
    optimize_cmax, optimize_threshold, parse_key_values, parse_list, read_reference_curve,
    run_point, thread_pool, uncoded_ber, write_curve_csv, write_instance_record, write_svgs,
    CmaxOutcome, CurvePoint, KeyValues, PointSpec, ReferenceCurve, SimConfig, INSTANCE_HEADER,
};
use ordept::patterns::PatternIter;

#[derive(Parser)]
#[command(name = "ordept", version, about = "Ordered partial-error-pattern decoding laboratory")]
struct Cli {
    /// Configuration file of `key = value` lines; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// BLER and complexity over a list of Eb/N0 points.
    Sweep {
        #[command(flatten)]
        sim: SimArgs,
        /// Write a per-query trace of every trial to `<out>/trace.tsv`.
        #[arg(long)]
        trace: bool,
        /// Write every trial's channel output to this file.
        #[arg(long)]
        dump_instances: Option<PathBuf>,
    },
    /// Smallest list size whose ε_T = 0 curve beats a reference curve.
    OptimizeCmax {
        #[command(flatten)]
        sim: SimArgs,
        /// CSV with `ebno_db` and `bler` columns.
        #[arg(long)]
        reference: Option<PathBuf>,
        /// Largest list size tried (powers of two up to this).
        #[arg(long)]
        c_cap: Option<usize>,
    },
    /// Largest ε_T per Eb/N0 that still beats a reference curve.
    OptimizeThreshold {
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        reference: Option<PathBuf>,
        #[arg(long)]
        grid_step: Option<f64>,
        #[arg(long)]
        grid_max: Option<f64>,
    },
    /// Print the first reliability-rank patterns of the query order.
    Patterns {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 20)]
        count: usize,
    },
    /// Hard-decision BER of uncoded BPSK against Q(1/σ).
    UncodedBer {
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 2.0, 4.0])]
        ebno: Vec<f64>,
        #[arg(long, default_value_t = 1_000_000)]
        bits: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args, Clone, Default)]
struct SimArgs {
    /// Built-in code name or path to a code file.
    #[arg(long)]
    code: Option<String>,
    /// ordept-lt, ordept-sogrand, orbgrand or orbgrand-list.
    #[arg(long)]
    decoder: Option<String>,
    #[arg(long)]
    qmax: Option<usize>,
    #[arg(long)]
    cmax: Option<usize>,
    /// Likelihood threshold ε_T.
    #[arg(long)]
    threshold: Option<f64>,
    /// SOGRAND termination level θ.
    #[arg(long)]
    theta: Option<f64>,
    /// Eb/N0 values in dB, comma separated.
    #[arg(long)]
    ebno: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    min_errors: Option<u64>,
    #[arg(long)]
    max_trials: Option<u64>,
    /// Output directory for CSV and SVG files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Do not accept a PEP whose partial syndrome is already zero.
    #[arg(long)]
    strict_eq3: bool,
}

impl SimArgs {
    fn apply(&self, cfg: &mut SimConfig) -> Result<()> {
        if let Some(v) = &self.code {
            cfg.code = v.clone();
        }
        if let Some(v) = &self.decoder {
            cfg.decoder.kind = DecoderKind::from_str(v).map_err(anyhow::Error::msg)?;
        }
        if let Some(v) = self.qmax {
            cfg.decoder.q_max = v;
        }
        if let Some(v) = self.cmax {
            cfg.decoder.c_max = v;
        }
        if let Some(v) = self.threshold {
            cfg.decoder.epsilon_t = v;
        }
        if let Some(v) = self.theta {
            cfg.decoder.theta = v;
        }
        if let Some(v) = &self.ebno {
            cfg.ebno_db = parse_list("ebno", v)?;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.workers {
            cfg.workers = v;
        }
        if let Some(v) = self.min_errors {
            cfg.min_block_errors = v;
        }
        if let Some(v) = self.max_trials {
            cfg.max_trials = v;
        }
        if let Some(v) = &self.out {
            cfg.out_dir = Some(v.clone());
        }
        if self.strict_eq3 {
            cfg.decoder.strict_eq3 = true;
        }
        Ok(())
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn load_settings(config: Option<&Path>, sim: &SimArgs) -> Result<(SimConfig, KeyValues)> {
    let mut cfg = SimConfig {
        workers: default_workers(),
        ..SimConfig::default()
    };
    let kv = match config {
        Some(path) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_key_values(&text)?
        }
        None => KeyValues::default(),
    };
    cfg.apply_key_values(&kv)?;
    sim.apply(&mut cfg)?;
    cfg.validate()?;
    Ok((cfg, kv))
}

fn load_code(cfg: &SimConfig) -> Result<CodeSpec> {
    let code = resolve_code(&cfg.code).with_context(|| format!("loading code `{}`", cfg.code))?;
    log::info!("code {}: n = {}, k = {}", code.name(), code.n(), code.k());
    Ok(code)
}

fn setting<T: FromStr>(flag: Option<T>, kv: &KeyValues, key: &str, default: Option<T>) -> Result<T> {
    if let Some(v) = flag {
        return Ok(v);
    }
    if let Some(v) = kv.get_parsed(key)? {
        return Ok(v);
    }
    default.with_context(|| format!("`--{key}` is required"))
}

fn reference_curve(flag: Option<PathBuf>, kv: &KeyValues) -> Result<ReferenceCurve> {
    let path: PathBuf = setting(flag, kv, "reference", None)?;
    read_reference_curve(&path).with_context(|| format!("reading {}", path.display()))
}

/// Writes `curve.csv` and the SVG plots into the output directory, or the
/// CSV to stdout when none is set.
fn emit_curve(cfg: &SimConfig, points: &[CurvePoint], title: &str) -> Result<()> {
    match &cfg.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join("curve.csv");
            write_curve_csv(File::create(&path)?, points, cfg)?;
            write_svgs(dir, points, title)?;
            log::info!("wrote {}", path.display());
        }
        None => write_curve_csv(io::stdout().lock(), points, cfg)?,
    }
    Ok(())
}

fn trace_line(out: &mut impl Write, point: usize, trial: u64, e: &TraceEvent<'_>) -> io::Result<()> {
    let join = |v: &mut dyn Iterator<Item = String>| v.collect::<Vec<_>>().join(",");
    writeln!(
        out,
        "{point}\t{trial}\t{}\t{}\t{}\t{:?}\t{}",
        e.query,
        join(&mut e.ranks.iter().map(|r| r.to_string())),
        join(&mut e.positions.iter().map(|p| p.to_string())),
        e.completion,
        e.analog_weight.map_or(String::new(), |w| w.to_string())
    )
}

fn sweep(cfg: &SimConfig, trace: bool, dump: Option<&Path>) -> Result<()> {
    let code = load_code(cfg)?;
    if trace && cfg.out_dir.is_none() {
        bail!("--trace needs --out");
    }
    let decoder = Decoder::new(code.clone(), cfg.decoder).map_err(anyhow::Error::msg)?;
    let pool = thread_pool(cfg.workers)?;

    let mut trace_out = match (&cfg.out_dir, trace) {
        (Some(dir), true) => {
            fs::create_dir_all(dir)?;
            let mut w = BufWriter::new(File::create(dir.join("trace.tsv"))?);
            writeln!(w, "point\ttrial\tquery\tranks\tpositions\tcompletion\tepsilon")?;
            Some(w)
        }
        _ => None,
    };
    let mut dump_out = match dump {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path)?);
            writeln!(w, "{INSTANCE_HEADER}")?;
            Some(w)
        }
        None => None,
    };
    let keep = trace_out.is_some() || dump_out.is_some();

    let mut points = Vec::with_capacity(cfg.ebno_db.len());
    let mut io_error: Option<io::Error> = None;
    for (index, &ebno_db) in cfg.ebno_db.iter().enumerate() {
        let spec = PointSpec {
            index,
            ebno_db,
            min_block_errors: cfg.min_block_errors,
            max_trials: cfg.max_trials,
            seed: cfg.seed,
        };
        let p = run_point(&decoder, spec, &pool, keep, |rec| {
            if io_error.is_some() {
                return;
            }
            let mut step = || -> io::Result<()> {
                if let Some(w) = dump_out.as_mut() {
                    write_instance_record(w, rec)?;
                }
                if let Some(w) = trace_out.as_mut() {
                    let mut res = Ok(());
                    decoder.decode_traced(rec.instance, |e| {
                        if res.is_ok() {
                            res = trace_line(w, rec.point, rec.trial, e);
                        }
                    });
                    res?;
                }
                Ok(())
            };
            if let Err(e) = step() {
                io_error = Some(e);
            }
        })?;
        if let Some(e) = io_error.take() {
            return Err(e.into());
        }
        log::info!(
            "{ebno_db} dB: {} errors in {} trials, BLER {:.3e}",
            p.block_errors,
            p.trials,
            p.bler
        );
        points.push(p);
    }
    if let Some(mut w) = trace_out {
        w.flush()?;
    }
    if let Some(mut w) = dump_out {
        w.flush()?;
    }
    let title = format!("{} / {}", cfg.code, cfg.decoder.kind);
    emit_curve(cfg, &points, &title)
}

fn cmax_command(cfg: &SimConfig, kv: &KeyValues, reference: Option<PathBuf>, c_cap: Option<usize>) -> Result<()> {
    let code = load_code(cfg)?;
    let reference = reference_curve(reference, kv)?;
    let c_cap = setting(c_cap, kv, "c-cap", Some(64))?;
    match optimize_cmax(&code, cfg, &reference, c_cap)? {
        CmaxOutcome::Found { c_max, points } => {
            println!("c_max* = {c_max}");
            for (p, (_, r)) in points.iter().zip(&reference.points) {
                println!(
                    "  {} dB: BLER {:.4e} [{:.4e}, {:.4e}] < reference {:.4e}",
                    p.ebno_db, p.bler, p.ci95_lo, p.ci95_hi, r
                );
            }
            if cfg.out_dir.is_some() {
                let mut found = cfg.clone();
                found.decoder.kind = DecoderKind::OrdeptLt;
                found.decoder.c_max = c_max;
                found.decoder.epsilon_t = 0.0;
                emit_curve(&found, &points, &format!("{} / c_max = {c_max}", cfg.code))?;
            }
        }
        CmaxOutcome::NotFound { tried } => {
            println!("c_max* not found up to {c_cap}");
            for (c, pts) in tried {
                let last = pts.last().expect("at least one point per try");
                println!("  c_max = {c}: BLER {:.4e} at {} dB", last.bler, last.ebno_db);
            }
        }
    }
    Ok(())
}

fn threshold_command(
    cfg: &SimConfig,
    kv: &KeyValues,
    reference: Option<PathBuf>,
    grid_step: Option<f64>,
    grid_max: Option<f64>,
) -> Result<()> {
    let code = load_code(cfg)?;
    let reference = reference_curve(reference, kv)?;
    let step = setting(grid_step, kv, "grid-step", Some(0.25))?;
    let max = setting(grid_max, kv, "grid-max", Some(16.0))?;
    let results = optimize_threshold(&code, cfg, cfg.decoder.c_max, &reference, step, max)?;

    let mut out: Box<dyn Write> = match &cfg.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            Box::new(BufWriter::new(File::create(dir.join("threshold.csv"))?))
        }
        None => Box::new(io::stdout().lock()),
    };
    writeln!(out, "ebno_db,reference_bler,epsilon_t,bler,ci95_lo,ci95_hi,trials,avg_queries,avg_real_ops")?;
    for r in &results {
        match r.chosen() {
            Some(p) => writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.ebno_db,
                r.reference_bler,
                r.epsilon_t.unwrap(),
                p.bler,
                p.ci95_lo,
                p.ci95_hi,
                p.trials,
                p.avg_queries,
                p.avg_real_ops
            )?,
            None => writeln!(out, "{},{},,,,,,,", r.ebno_db, r.reference_bler)?,
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Sweep {
            sim,
            trace,
            dump_instances,
        } => {
            let (cfg, _) = load_settings(cli.config.as_deref(), &sim)?;
            sweep(&cfg, trace, dump_instances.as_deref())
        }
        Command::OptimizeCmax { sim, reference, c_cap } => {
            let (cfg, kv) = load_settings(cli.config.as_deref(), &sim)?;
            cmax_command(&cfg, &kv, reference, c_cap)
        }
        Command::OptimizeThreshold {
            sim,
            reference,
            grid_step,
            grid_max,
        } => {
            let (cfg, kv) = load_settings(cli.config.as_deref(), &sim)?;
            threshold_command(&cfg, &kv, reference, grid_step, grid_max)
        }
        Command::Patterns { n, count } => {
            let mut out = io::stdout().lock();
            for ranks in PatternIter::new(n, count) {
                let line: Vec<String> = ranks.ranks().iter().map(|r| r.to_string()).collect();
                writeln!(out, "{}", line.join(" "))?;
            }
            Ok(())
        }
        Command::UncodedBer { ebno, bits, seed } => {
            println!("ebno_db,bits,errors,ber,expected,deviation_sigmas");
            for (i, &e) in ebno.iter().enumerate() {
                let p = uncoded_ber(e, bits, seed, i)?;
                println!(
                    "{},{},{},{},{},{:.3}",
                    p.ebno_db,
                    p.bits,
                    p.errors,
                    p.ber,
                    p.expected,
                    p.deviation_sigmas()
                );
            }
            Ok(())
        }
    }
}
