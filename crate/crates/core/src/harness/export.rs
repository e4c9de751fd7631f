//! Result files: curve CSVs, reference curves, SVG plots and instance dumps.
//!
//! Floats are written with Rust's shortest round-trip formatting, so parsing
//! an emitted CSV recovers every value exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{CurvePoint, HarnessError, SimConfig, TrialRecord};

pub const CSV_HEADER: &str = "ebno_db,trials,block_errors,bler,ci95_lo,ci95_hi,avg_queries,\
avg_real_ops,avg_syndrome_xors,decoder,code,qmax,cmax,threshold,seed";

/// Column header of instance dumps. Vector fields are comma-separated
/// inside their tab-separated column; `w` is a 0/1 string.
pub const INSTANCE_HEADER: &str = "point\tebno_db\ttrial\ty\tllr\tw\tpi";

/// One CSV line. `threshold` is ε_T or θ and empty for ORBGRAND.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub ebno_db: f64,
    pub trials: u64,
    pub block_errors: u64,
    pub bler: f64,
    pub ci95_lo: f64,
    pub ci95_hi: f64,
    pub avg_queries: f64,
    pub avg_real_ops: f64,
    pub avg_syndrome_xors: f64,
    pub decoder: String,
    pub code: String,
    pub qmax: usize,
    pub cmax: usize,
    pub threshold: Option<f64>,
    pub seed: u64,
}

impl CsvRow {
    pub fn new(point: &CurvePoint, config: &SimConfig) -> Self {
        CsvRow {
            ebno_db: point.ebno_db,
            trials: point.trials,
            block_errors: point.block_errors,
            bler: point.bler,
            ci95_lo: point.ci95_lo,
            ci95_hi: point.ci95_hi,
            avg_queries: point.avg_queries,
            avg_real_ops: point.avg_real_ops,
            avg_syndrome_xors: point.avg_syndrome_xors,
            decoder: config.decoder.kind.to_string(),
            code: config.code.clone(),
            qmax: config.decoder.q_max,
            cmax: config.decoder.effective_c_max(),
            threshold: config.decoder.threshold(),
            seed: config.seed,
        }
    }

    pub fn point(&self) -> CurvePoint {
        CurvePoint {
            ebno_db: self.ebno_db,
            trials: self.trials,
            block_errors: self.block_errors,
            bler: self.bler,
            ci95_lo: self.ci95_lo,
            ci95_hi: self.ci95_hi,
            avg_queries: self.avg_queries,
            avg_real_ops: self.avg_real_ops,
            avg_syndrome_xors: self.avg_syndrome_xors,
        }
    }
}

/// Writes the curve as CSV. An empty point list gives a header-only file.
pub fn write_curve_csv<W: Write>(out: W, points: &[CurvePoint], config: &SimConfig) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for p in points {
        w.serialize(CsvRow::new(p, config))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_curve_csv(path: &Path) -> Result<Vec<CsvRow>, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(HarnessError::from)).collect()
}

/// Target BLER per Eb/N0, as used by the parameter optimizations.
#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceCurve {
    pub points: Vec<(f64, f64)>,
}

impl ReferenceCurve {
    pub fn from_points(points: &[CurvePoint]) -> Self {
        ReferenceCurve {
            points: points.iter().map(|p| (p.ebno_db, p.bler)).collect(),
        }
    }

    pub fn ebno_db(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }
}

/// Reads a reference curve from any CSV with `ebno_db` and `bler` columns.
pub fn read_reference_curve(path: &Path) -> Result<ReferenceCurve, HarnessError> {
    let mut r = csv::Reader::from_path(path)?;
    let headers = r.headers()?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| HarnessError::Reference(format!("missing `{name}` column")))
    };
    let (e_col, b_col) = (col("ebno_db")?, col("bler")?);
    let mut points = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let field = |c: usize| -> Result<f64, HarnessError> {
            rec.get(c)
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| HarnessError::Reference(format!("row {}: bad number", i + 2)))
        };
        points.push((field(e_col)?, field(b_col)?));
    }
    if points.is_empty() {
        return Err(HarnessError::Reference("no data rows".into()));
    }
    Ok(ReferenceCurve { points })
}

fn join<T: ToString>(values: impl IntoIterator<Item = T>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// Appends one trial to an instance dump.
pub fn write_instance_record<W: Write>(out: &mut W, rec: &TrialRecord<'_>) -> std::io::Result<()> {
    let inst = rec.instance;
    let w: String = inst.w.iter().map(|&b| char::from(b'0' + b)).collect();
    writeln!(
        out,
        "{}\t{}\t{}\t{}\t{}\t{}\t{}",
        rec.point,
        rec.ebno_db,
        rec.trial,
        join(&inst.y),
        join(&inst.llr),
        w,
        join(&inst.pi)
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SvgMetric {
    Bler,
    AvgRealOps,
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const MARGIN: f64 = 70.0;

/// Line plot over Eb/N0. BLER uses a log10 axis; zero-error points are
/// left out since they have no logarithm.
pub fn render_svg(points: &[CurvePoint], metric: SvgMetric, title: &str) -> String {
    let log = metric == SvgMetric::Bler;
    let data: Vec<(f64, f64)> = points
        .iter()
        .map(|p| match metric {
            SvgMetric::Bler => (p.ebno_db, p.bler),
            SvgMetric::AvgRealOps => (p.ebno_db, p.avg_real_ops),
        })
        .filter(|&(_, v)| !log || v > 0.0)
        .map(|(x, v)| (x, if log { v.log10() } else { v }))
        .collect();

    let (mut x0, mut x1) = bounds(data.iter().map(|d| d.0));
    let (mut y0, mut y1) = bounds(data.iter().map(|d| d.1));
    if log {
        y0 = y0.floor();
        y1 = y1.ceil().max(y0 + 1.0);
    } else {
        y0 = y0.min(0.0);
    }
    if x1 <= x0 {
        x0 -= 0.5;
        x1 += 0.5;
    }
    if y1 <= y0 {
        y1 = y0 + 1.0;
    }
    let sx = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let sy = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle">{}</text>"#, WIDTH / 2.0, escape(title));
    let (left, right, top, bottom) = (MARGIN, WIDTH - MARGIN, MARGIN, HEIGHT - MARGIN);
    let _ = writeln!(
        s,
        r#"<rect x="{left}" y="{top}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        right - left,
        bottom - top
    );

    for i in 0..=4 {
        let x = x0 + (x1 - x0) * i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">{:.2}</text>"#,
            sx(x),
            bottom + 18.0,
            x
        );
    }
    let y_ticks: Vec<f64> = if log {
        (y0 as i64..=y1 as i64).map(|e| e as f64).collect()
    } else {
        (0..=4).map(|i| y0 + (y1 - y0) * i as f64 / 4.0).collect()
    };
    for y in y_ticks {
        let label = if log { format!("1e{y}") } else { format!("{y:.1}") };
        let _ = writeln!(
            s,
            r##"<line x1="{left}" x2="{right}" y1="{0:.1}" y2="{0:.1}" stroke="#ddd"/><text x="{1:.1}" y="{2:.1}" text-anchor="end">{label}</text>"##,
            sy(y),
            left - 6.0,
            sy(y) + 4.0
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">Eb/N0 (dB)</text>"#,
        WIDTH / 2.0,
        HEIGHT - 20.0
    );
    let y_label = if log { "log10 BLER" } else { "average real operations" };
    let _ = writeln!(
        s,
        r#"<text x="18" y="{0}" text-anchor="middle" transform="rotate(-90 18 {0})">{y_label}</text>"#,
        HEIGHT / 2.0
    );

    if !data.is_empty() {
        let path = data
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", sx(x), sy(y)))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(s, r#"<polyline points="{path}" fill="none" stroke="steelblue" stroke-width="2"/>"#);
        for &(x, y) in &data {
            let _ = writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="steelblue"/>"#, sx(x), sy(y));
        }
    }
    s.push_str("</svg>\n");
    s
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo.is_finite() {
        (lo, hi)
    } else {
        (0.0, 1.0)
    }
}

fn escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes `bler.svg` and `ops.svg` into `dir` and returns their paths.
pub fn write_svgs(dir: &Path, points: &[CurvePoint], title: &str) -> Result<[PathBuf; 2], HarnessError> {
    fs::create_dir_all(dir)?;
    let bler = dir.join("bler.svg");
    let ops = dir.join("ops.svg");
    fs::write(&bler, render_svg(points, SvgMetric::Bler, title))?;
    fs::write(&ops, render_svg(points, SvgMetric::AvgRealOps, title))?;
    Ok([bler, ops])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ReceivedInstance;
    use crate::decoders::{DecodeResult, DecoderKind};
    use crate::complexity::OpTally;

    fn sample_points() -> Vec<CurvePoint> {
        vec![
            CurvePoint {
                ebno_db: 4.0,
                trials: 12345,
                block_errors: 100,
                bler: 100.0 / 12345.0,
                ci95_lo: 0.006_612_345_678_901_23,
                ci95_hi: 0.009_876_543_210_987_6,
                avg_queries: 17.123_456_789_012_3,
                avg_real_ops: 1_234.567_890_123_4,
                avg_syndrome_xors: 3.251_592_653_589_793,
            },
            CurvePoint {
                ebno_db: 5.5,
                trials: 999,
                block_errors: 0,
                bler: 0.0,
                ci95_lo: 0.0,
                ci95_hi: 0.003_8,
                avg_queries: 1.0 / 3.0,
                avg_real_ops: 2.0 / 3.0,
                avg_syndrome_xors: 11.0,
            },
        ]
    }

    #[test]
    fn empty_curve_is_header_only() {
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &[], &SimConfig::default()).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("curve.csv");
        let pts = sample_points();
        let cfg = SimConfig::default();
        write_curve_csv(fs::File::create(&path).unwrap(), &pts, &cfg).unwrap();
        let rows = read_curve_csv(&path).unwrap();
        assert_eq!(rows.len(), 2);
        for (row, p) in rows.iter().zip(&pts) {
            assert_eq!(&row.point(), p);
            assert_eq!(row.decoder, "ordept-lt");
            assert_eq!(row.threshold, Some(0.0));
        }
        let reference = read_reference_curve(&path).unwrap();
        assert_eq!(reference, ReferenceCurve::from_points(&pts));
    }

    #[test]
    fn orbgrand_rows_leave_threshold_empty() {
        let mut cfg = SimConfig::default();
        cfg.decoder.kind = DecoderKind::Orbgrand;
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &sample_points()[..1], &cfg).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let line = text.lines().nth(1).unwrap();
        assert!(line.ends_with(",orbgrand,bch-32-21,32768,1,,1"), "{line}");
    }

    #[test]
    fn reference_curve_by_column_name() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ref.csv");
        fs::write(&path, "bler,note,ebno_db\n0.1,x,3\n0.01,y,4.5\n").unwrap();
        let r = read_reference_curve(&path).unwrap();
        assert_eq!(r.points, vec![(3.0, 0.1), (4.5, 0.01)]);
        fs::write(&path, "ebno,bler\n3,0.1\n").unwrap();
        assert!(matches!(read_reference_curve(&path), Err(HarnessError::Reference(_))));
    }

    #[test]
    fn svg_labels_axes() {
        let svg = render_svg(&sample_points(), SvgMetric::Bler, "a < b");
        assert!(svg.contains("Eb/N0 (dB)"));
        assert!(svg.contains("log10 BLER"));
        assert!(svg.contains("a &lt; b"));
        assert!(svg.contains("1e-3"));
        // Only the nonzero point is drawn.
        assert_eq!(svg.matches("<circle").count(), 1);
        let ops = render_svg(&sample_points(), SvgMetric::AvgRealOps, "");
        assert_eq!(ops.matches("<circle").count(), 2);
        let empty = render_svg(&[], SvgMetric::Bler, "");
        assert!(empty.ends_with("</svg>\n"));
    }

    #[test]
    fn instance_dump_line() {
        let inst = ReceivedInstance::from_channel_output(vec![0.5, -1.0], 1.0);
        let result = DecodeResult::trivial(&inst.w, OpTally::new());
        let rec = TrialRecord {
            point: 2,
            ebno_db: 3.5,
            trial: 7,
            instance: &inst,
            result: &result,
            block_error: false,
        };
        let mut buf = Vec::new();
        write_instance_record(&mut buf, &rec).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "2\t3.5\t7\t0.5,-1\t1,-2\t01\t0,1\n");
        assert_eq!(INSTANCE_HEADER.split('\t').count(), 7);
    }
}
