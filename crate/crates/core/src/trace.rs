//! Per-Repeat convergence records and their line-oriented text format.
//!
//! One line per Repeat, space-separated `key=value` fields in the order
//! `repeat_index lambda repeat_energy best_energy subspace_indices chain_break_fraction`,
//! optionally followed by `flags=a,b`. Floats are written in shortest round-trip form.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{QaeError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    /// 1-based.
    pub repeat_index: usize,
    /// Lagrange multiplier used during this Repeat.
    pub lambda: f64,
    /// Lowest Rayleigh quotient among this Repeat's candidates.
    pub repeat_energy: f64,
    /// Lowest energy seen up to and including this Repeat.
    pub best_energy: f64,
    pub subspace: Vec<usize>,
    pub chain_break_fraction: f64,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConvergenceTrace {
    records: Vec<TraceRecord>,
}

impl ConvergenceTrace {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: TraceRecord) {
        self.records.push(record);
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&TraceRecord> {
        self.records.last()
    }

    /// First Repeat whose best energy is within `tolerance` of `reference`.
    pub fn repeats_to_reach(&self, reference: f64, tolerance: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| (r.best_energy - reference).abs() <= tolerance)
            .map(|r| r.repeat_index)
    }

    pub fn mean_chain_break_fraction(&self) -> f64 {
        if self.records.is_empty() {
            return 0.0;
        }
        self.records.iter().map(|r| r.chain_break_fraction).sum::<f64>() / self.records.len() as f64
    }

    pub fn best_is_non_increasing(&self) -> bool {
        self.records
            .windows(2)
            .all(|w| w[1].best_energy <= w[0].best_energy)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            let subspace: Vec<String> = r.subspace.iter().map(ToString::to_string).collect();
            let _ = write!(
                out,
                "repeat_index={} lambda={} repeat_energy={} best_energy={} subspace_indices={} chain_break_fraction={}",
                r.repeat_index,
                r.lambda,
                r.repeat_energy,
                r.best_energy,
                subspace.join(","),
                r.chain_break_fraction
            );
            if !r.flags.is_empty() {
                let _ = write!(out, " flags={}", r.flags.join(","));
            }
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        const KEYS: [&str; 6] = [
            "repeat_index",
            "lambda",
            "repeat_energy",
            "best_energy",
            "subspace_indices",
            "chain_break_fraction",
        ];
        let mut trace = ConvergenceTrace::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<(&str, &str)> = line
                .split_whitespace()
                .map(|f| {
                    f.split_once('=')
                        .ok_or_else(|| QaeError::parse(line_no, format!("field `{f}` lacks `=`")))
                })
                .collect::<Result<_>>()?;
            if fields.len() < KEYS.len() || fields.len() > KEYS.len() + 1 {
                return Err(QaeError::parse(line_no, format!("expected 6 or 7 fields, got {}", fields.len())));
            }
            for (i, key) in KEYS.iter().enumerate() {
                if fields[i].0 != *key {
                    return Err(QaeError::parse(
                        line_no,
                        format!("field {} should be `{key}`, got `{}`", i + 1, fields[i].0),
                    ));
                }
            }
            let float = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| QaeError::parse(line_no, format!("bad number `{s}`: {e}")))
            };
            let subspace = if fields[4].1.is_empty() {
                Vec::new()
            } else {
                fields[4]
                    .1
                    .split(',')
                    .map(|s| {
                        s.parse::<usize>()
                            .map_err(|e| QaeError::parse(line_no, format!("bad index `{s}`: {e}")))
                    })
                    .collect::<Result<_>>()?
            };
            let flags = match fields.get(6) {
                Some(("flags", v)) => v.split(',').map(String::from).collect(),
                Some((k, _)) => return Err(QaeError::parse(line_no, format!("unexpected key `{k}`"))),
                None => Vec::new(),
            };
            trace.push(TraceRecord {
                repeat_index: fields[0]
                    .1
                    .parse()
                    .map_err(|e| QaeError::parse(line_no, format!("bad repeat index: {e}")))?,
                lambda: float(fields[1].1)?,
                repeat_energy: float(fields[2].1)?,
                best_energy: float(fields[3].1)?,
                subspace,
                chain_break_fraction: float(fields[5].1)?,
                flags,
            });
        }
        Ok(trace)
    }
}

pub fn write_trace(trace: &ConvergenceTrace, path: impl AsRef<Path>) -> Result<()> {
    if trace.is_empty() {
        return Err(QaeError::Validation("refusing to write an empty trace".into()));
    }
    fs::write(path, trace.to_text())?;
    Ok(())
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<ConvergenceTrace> {
    ConvergenceTrace::parse(&fs::read_to_string(path)?)
}
