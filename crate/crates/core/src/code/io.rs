//! Text format for codes.
//!
//! ```text
//! # comments and blank lines are ignored
//! n k
//! <n−k lines of n characters in {0,1}: the rows of H>
//! G
//! <k lines of n characters: the rows of a generator>   (optional section)
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use log::warn;

use super::{BitRow, CodeError, CodeSpec};

fn parse_row(line: &str, n: usize, lineno: usize) -> Result<BitRow, CodeError> {
    if line.chars().count() != n {
        return Err(CodeError::Parse {
            line: lineno,
            msg: format!("expected {n} columns, found {}", line.chars().count()),
        });
    }
    let mut row = BitRow::zeros(n);
    for (j, ch) in line.chars().enumerate() {
        match ch {
            '0' => {}
            '1' => row.set(j, true),
            other => {
                return Err(CodeError::Parse {
                    line: lineno,
                    msg: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(row)
}

/// Parses the text format. A rank-deficient H is reduced to an independent
/// subset of its rows with a warning; the resulting code then has a larger
/// dimension than declared and any supplied generator is discarded.
pub fn parse_code(name: &str, text: &str) -> Result<CodeSpec, CodeError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or(CodeError::Parse {
        line: 1,
        msg: "missing `n k` header".into(),
    })?;
    let dims: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|e| CodeError::Parse {
            line: hline,
            msg: format!("bad header: {e}"),
        })?;
    let [n, k] = dims[..] else {
        return Err(CodeError::Parse {
            line: hline,
            msg: "header must be `n k`".into(),
        });
    };
    if k == 0 || k >= n {
        return Err(CodeError::InvalidDimensions(format!("need 0 < k < n, got n={n}, k={k}")));
    }

    let mut h_rows = Vec::with_capacity(n - k);
    let mut g_rows: Option<Vec<BitRow>> = None;
    for (lineno, line) in lines {
        if line == "G" {
            if g_rows.is_some() {
                return Err(CodeError::Parse {
                    line: lineno,
                    msg: "duplicate G section".into(),
                });
            }
            g_rows = Some(Vec::with_capacity(k));
            continue;
        }
        let row = parse_row(line, n, lineno)?;
        match g_rows.as_mut() {
            Some(g) => g.push(row),
            None => h_rows.push(row),
        }
    }
    if h_rows.len() != n - k {
        return Err(CodeError::InvalidDimensions(format!(
            "expected {} rows of H, found {}",
            n - k,
            h_rows.len()
        )));
    }
    if let Some(g) = &g_rows {
        if g.len() != k {
            return Err(CodeError::InvalidDimensions(format!(
                "expected {k} rows of G, found {}",
                g.len()
            )));
        }
    }

    let (code, dropped) = CodeSpec::from_redundant_rows(name, h_rows, g_rows)?;
    if dropped > 0 {
        warn!(
            "{name}: H has {dropped} redundant row(s); using n−k = {} (k = {})",
            code.redundancy(),
            code.k()
        );
    }
    Ok(code)
}

pub fn load_code(path: &Path) -> Result<CodeSpec, CodeError> {
    let text = fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "code".into());
    parse_code(&name, &text)
}

pub fn write_code(code: &CodeSpec, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "{} {}", code.n(), code.k())?;
    let fmt_row = |r: &BitRow| -> String {
        r.to_bits().iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
    };
    for row in code.h_rows() {
        writeln!(out, "{}", fmt_row(row))?;
    }
    if let Some(g) = code.generator() {
        writeln!(out, "G")?;
        for row in g {
            writeln!(out, "{}", fmt_row(row))?;
        }
    }
    Ok(())
}

pub fn save_code(code: &CodeSpec, path: &Path) -> Result<(), CodeError> {
    let mut file = std::io::BufWriter::new(fs::File::create(path)?);
    write_code(code, &mut file)?;
    file.flush()?;
    Ok(())
}
