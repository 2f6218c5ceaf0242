//! Reporting surfaces: count-file parsing, the results CSV schema, and
//! SVG plots.

mod counts;
mod svg;

pub use counts::{parse_counts, read_counts_file};
pub use svg::{coverage_vs_n, length_ratio_box};

use crate::intervals::Method;
use crate::simulation::{ExperimentResult, KPolicy};
use crate::{Error, Result};
use std::io::Write;

/// Fixed header of the results CSV.
pub const CSV_HEADER: &str =
    "mu,theta,n,alpha,k_policy,method,coverage,median_length,sd_length,length_ratio,sd_ratio,errored_trials,seed";

/// One CSV row: a single (cell, method) pair.
///
/// Numeric fields are written with Rust's shortest round-trip formatting,
/// which is always plain decimal notation ('.' radix, no exponent), so
/// write -> read -> write is byte-stable.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub mu: f64,
    pub theta: f64,
    pub n: u64,
    pub alpha: f64,
    pub k_policy: KPolicy,
    pub method: Method,
    pub coverage: f64,
    pub median_length: f64,
    pub sd_length: f64,
    pub length_ratio: f64,
    pub sd_ratio: f64,
    pub errored_trials: u64,
    /// Master seed of the run; together with the parameter columns it
    /// reproduces the cell in isolation.
    pub seed: u64,
}

/// Expand an experiment result into one row per method.
pub fn rows_from_result(result: &ExperimentResult) -> Vec<ResultRow> {
    let spec = &result.spec;
    result
        .methods
        .iter()
        .map(|m| ResultRow {
            mu: spec.mu,
            theta: spec.theta,
            n: spec.n as u64,
            alpha: spec.alpha,
            k_policy: spec.k_policy,
            method: m.method,
            coverage: m.coverage,
            median_length: m.median_length,
            sd_length: m.sd_length,
            length_ratio: m.length_ratio,
            sd_ratio: m.sd_ratio,
            errored_trials: m.errored as u64,
            seed: spec.master_seed,
        })
        .collect()
}

/// Write header plus rows, '\n' line endings throughout.
pub fn write_csv<W: Write>(w: &mut W, rows: &[ResultRow]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.mu,
            r.theta,
            r.n,
            r.alpha,
            r.k_policy,
            r.method,
            r.coverage,
            r.median_length,
            r.sd_length,
            r.length_ratio,
            r.sd_ratio,
            r.errored_trials,
            r.seed
        )?;
    }
    Ok(())
}

/// Render rows to a CSV string.
pub fn csv_string(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(&mut buf, rows).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("csv output is ASCII")
}

fn parse_f64(tok: &str, line: usize, field: &str) -> Result<f64> {
    let v: f64 = tok
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad {field} value '{tok}'")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!(
            "line {line}: {field} must be finite, got '{tok}'"
        )));
    }
    Ok(v)
}

fn parse_u64(tok: &str, line: usize, field: &str) -> Result<u64> {
    tok.parse()
        .map_err(|_| Error::Parse(format!("line {line}: bad {field} value '{tok}'")))
}

/// Parse a results CSV produced by [`write_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == CSV_HEADER => {}
        Some((_, header)) => {
            return Err(Error::Parse(format!(
                "unexpected CSV header '{header}' (expected '{CSV_HEADER}')"
            )))
        }
        None => return Err(Error::Parse("empty CSV input".into())),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 13 {
            return Err(Error::Parse(format!(
                "line {lineno}: expected 13 fields, found {}",
                fields.len()
            )));
        }
        rows.push(ResultRow {
            mu: parse_f64(fields[0], lineno, "mu")?,
            theta: parse_f64(fields[1], lineno, "theta")?,
            n: parse_u64(fields[2], lineno, "n")?,
            alpha: parse_f64(fields[3], lineno, "alpha")?,
            k_policy: fields[4].parse()?,
            method: fields[5].parse()?,
            coverage: parse_f64(fields[6], lineno, "coverage")?,
            median_length: parse_f64(fields[7], lineno, "median_length")?,
            sd_length: parse_f64(fields[8], lineno, "sd_length")?,
            length_ratio: parse_f64(fields[9], lineno, "length_ratio")?,
            sd_ratio: parse_f64(fields[10], lineno, "sd_ratio")?,
            errored_trials: parse_u64(fields[11], lineno, "errored_trials")?,
            seed: parse_u64(fields[12], lineno, "seed")?,
        });
    }
    Ok(rows)
}
