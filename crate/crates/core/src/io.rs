//! Text formats for matrices and result records.
//!
//! Matrix file: first line holds the dimension `n`, followed by `n` rows of `n` decimal
//! literals separated by spaces. Values are written in shortest round-trip form, so a
//! save/load cycle reproduces every entry exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::config::RunConfig;
use crate::error::{QaeError, Result};
use crate::matrix::SymmetricMatrix;
use crate::workflow::ResultRecord;

pub fn parse_matrix(text: &str) -> Result<SymmetricMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, first) = lines
        .next()
        .ok_or_else(|| QaeError::parse(1, "empty matrix file"))?;
    let dim: usize = first
        .trim()
        .parse()
        .map_err(|e| QaeError::parse(1, format!("bad dimension `{}`: {e}", first.trim())))?;
    if dim == 0 {
        return Err(QaeError::parse(1, "dimension must be at least 1"));
    }
    let mut data = Vec::with_capacity(dim * dim);
    for row in 0..dim {
        let (idx, line) = lines
            .next()
            .ok_or_else(|| QaeError::parse(row + 2, format!("expected {dim} rows, found {row}")))?;
        let line_no = idx + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != dim {
            return Err(QaeError::parse(
                line_no,
                format!("expected {dim} values, found {}", tokens.len()),
            ));
        }
        for tok in tokens {
            let v: f64 = tok
                .parse()
                .map_err(|e| QaeError::parse(line_no, format!("bad value `{tok}`: {e}")))?;
            data.push(v);
        }
    }
    if let Some((idx, extra)) = lines.find(|(_, l)| !l.trim().is_empty()) {
        return Err(QaeError::parse(
            idx + 1,
            format!("unexpected content after {dim} rows: `{}`", extra.trim()),
        ));
    }
    SymmetricMatrix::new(dim, data)
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<SymmetricMatrix> {
    parse_matrix(&fs::read_to_string(path)?)
}

pub fn format_matrix(m: &SymmetricMatrix) -> String {
    let mut out = format!("{}\n", m.dim());
    for i in 0..m.dim() {
        let row: Vec<String> = m.row(i).iter().map(|v| v.to_string()).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn save_matrix(m: &SymmetricMatrix, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_matrix(m))?;
    Ok(())
}

/// `final_energy`, `repeats` and `coefficients` lines, then `[config]` and the echoed
/// configuration. The trace is written separately.
pub fn format_result(record: &ResultRecord) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "final_energy = {}", record.final_energy);
    let _ = writeln!(out, "repeats = {}", record.trace.len());
    let coeffs: Vec<String> = record
        .final_coefficients
        .values()
        .iter()
        .map(|v| v.to_string())
        .collect();
    let _ = writeln!(out, "coefficients = {}", coeffs.join(" "));
    out.push_str("[config]\n");
    out.push_str(&record.config_echo.to_text());
    out
}

pub fn write_result(record: &ResultRecord, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, format_result(record))?;
    Ok(())
}

/// Summary fields of a result file: energy, coefficients and configuration.
pub fn parse_result(text: &str, dim: usize) -> Result<(f64, Vec<f64>, RunConfig)> {
    let (head, config) = text
        .split_once("[config]\n")
        .ok_or_else(|| QaeError::parse(1, "missing [config] section"))?;
    let mut energy = None;
    let mut coeffs = None;
    for (idx, line) in head.lines().enumerate() {
        let Some((k, v)) = line.split_once('=') else {
            continue;
        };
        let bad = |e: std::num::ParseFloatError| QaeError::parse(idx + 1, e.to_string());
        match k.trim() {
            "final_energy" => energy = Some(v.trim().parse::<f64>().map_err(bad)?),
            "coefficients" => {
                coeffs = Some(
                    v.split_whitespace()
                        .map(|t| t.parse::<f64>().map_err(bad))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            _ => {}
        }
    }
    Ok((
        energy.ok_or_else(|| QaeError::parse(1, "missing final_energy"))?,
        coeffs.ok_or_else(|| QaeError::parse(1, "missing coefficients"))?,
        RunConfig::parse(config, dim)?,
    ))
}
