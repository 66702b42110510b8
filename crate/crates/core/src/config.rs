//! Run configuration and its flat `key = value` file format.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use crate::decompose::Decomposer;
use crate::error::{QaeError, Result};
use crate::topology::TopologyKind;

/// Upper bound on the number of qubits in one sub-problem.
pub const MAX_SUBPROBLEM_VARS: usize = 256;

/// How the Lagrange multiplier follows the Repeats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LambdaUpdate {
    /// λ ← best energy found so far.
    Best,
    /// λ ← lowest energy of the previous Repeat alone.
    Repeat,
}

impl fmt::Display for LambdaUpdate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LambdaUpdate::Best => "best",
            LambdaUpdate::Repeat => "repeat",
        })
    }
}

impl FromStr for LambdaUpdate {
    type Err = QaeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "best" => Ok(LambdaUpdate::Best),
            "repeat" => Ok(LambdaUpdate::Repeat),
            other => Err(QaeError::Parameter(format!("unknown lambda_update `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Bits per coefficient.
    pub k: usize,
    /// Coefficients per sub-problem.
    pub gamma: usize,
    pub total_repeats: usize,
    pub reads_per_anneal: usize,
    pub chain_strength_factor: f64,
    pub topology: TopologyKind,
    pub seed: u64,
    pub precision_target: f64,
    pub decomposer: Decomposer,
    pub local_search: bool,
    /// Metropolis sweeps per read.
    pub sweeps: usize,
    /// Fixed inverse-temperature range; fitted to each sub-problem when `None`.
    pub beta_range: Option<(f64, f64)>,
    pub lambda_update: LambdaUpdate,
    /// Stop once the best energy has improved by less than `precision_target` for a
    /// full sweep over the coefficients.
    pub early_exit: bool,
    /// Grid side (or clique size) of the hardware graph; defaults to `gamma * k`.
    pub topology_size: Option<usize>,
}

impl RunConfig {
    /// Defaults for a `dim × dim` problem: K = 10, Γ ≈ √dim (3 for 9, 4 for 16), 30
    /// Repeats up to dimension 9 and 45 beyond.
    pub fn for_dim(dim: usize) -> Self {
        let root = (dim as f64).sqrt().round().max(1.0) as usize;
        let gamma = root.min(dim).max(1);
        RunConfig {
            k: 10,
            gamma,
            total_repeats: if dim <= 9 { 30 } else { 45 },
            reads_per_anneal: 1000,
            chain_strength_factor: 0.9,
            topology: TopologyKind::Complete,
            seed: 0,
            precision_target: 1e-5,
            decomposer: Decomposer::Perturbation,
            local_search: false,
            sweeps: 1000,
            beta_range: None,
            lambda_update: LambdaUpdate::Best,
            early_exit: false,
            topology_size: None,
        }
    }

    pub fn subproblem_vars(&self) -> usize {
        self.gamma * self.k
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        let bad = |m: String| Err(QaeError::Validation(m));
        if self.k == 0 {
            return bad("K must be positive".into());
        }
        if self.gamma == 0 || self.gamma > dim {
            return bad(format!("gamma {} must lie in 1..={dim}", self.gamma));
        }
        if self.subproblem_vars() > MAX_SUBPROBLEM_VARS {
            return bad(format!(
                "gamma*K = {} exceeds the {MAX_SUBPROBLEM_VARS}-variable sub-problem limit",
                self.subproblem_vars()
            ));
        }
        if self.total_repeats == 0 || self.reads_per_anneal == 0 || self.sweeps == 0 {
            return bad("total_repeats, reads_per_anneal and sweeps must be positive".into());
        }
        if !(0.5..=2.0).contains(&self.chain_strength_factor) {
            return bad(format!(
                "chain_strength_factor {} outside [0.5, 2.0]",
                self.chain_strength_factor
            ));
        }
        if !(self.precision_target > 0.0) {
            return bad("precision_target must be positive".into());
        }
        if let Some((lo, hi)) = self.beta_range {
            if !(lo > 0.0 && hi > lo && hi.is_finite()) {
                return bad(format!("beta range ({lo}, {hi}) must satisfy 0 < start < end"));
            }
        }
        if let Some(size) = self.topology_size {
            let needed = match self.topology {
                TopologyKind::Complete => self.subproblem_vars(),
                TopologyKind::GridLike => 2,
            };
            if size < needed {
                return bad(format!("topology_size {size} below required {needed}"));
            }
        }
        Ok(())
    }

    /// Parses a config file on top of [`RunConfig::for_dim`]. Blank lines and `#`
    /// comments are ignored; unknown keys are an error.
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        let mut cfg = RunConfig::for_dim(dim);
        let mut beta_start = None;
        let mut beta_end = None;
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| QaeError::parse(line_no, format!("expected key = value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            let err = |e: String| QaeError::parse(line_no, format!("{key}: {e}"));
            match key {
                "K" | "k" => cfg.k = num(value).map_err(err)?,
                "gamma" => cfg.gamma = num(value).map_err(err)?,
                "total_repeats" => cfg.total_repeats = num(value).map_err(err)?,
                "reads_per_anneal" => cfg.reads_per_anneal = num(value).map_err(err)?,
                "chain_strength_factor" => cfg.chain_strength_factor = num(value).map_err(err)?,
                "topology" => cfg.topology = value.parse().map_err(|e: QaeError| err(e.to_string()))?,
                "seed" => cfg.seed = num(value).map_err(err)?,
                "precision_target" => cfg.precision_target = num(value).map_err(err)?,
                "decomposer" => {
                    cfg.decomposer = value.parse().map_err(|e: QaeError| err(e.to_string()))?
                }
                "local_search" => cfg.local_search = num(value).map_err(err)?,
                "sweeps" => cfg.sweeps = num(value).map_err(err)?,
                "beta_start" => beta_start = Some(num::<f64>(value).map_err(err)?),
                "beta_end" => beta_end = Some(num::<f64>(value).map_err(err)?),
                "lambda_update" => {
                    cfg.lambda_update = value.parse().map_err(|e: QaeError| err(e.to_string()))?
                }
                "early_exit" => cfg.early_exit = num(value).map_err(err)?,
                "topology_size" => cfg.topology_size = Some(num(value).map_err(err)?),
                other => {
                    return Err(QaeError::parse(line_no, format!("unknown key `{other}`")));
                }
            }
        }
        cfg.beta_range = match (beta_start, beta_end) {
            (Some(a), Some(b)) => Some((a, b)),
            (None, None) => None,
            _ => {
                return Err(QaeError::Validation(
                    "beta_start and beta_end must be given together".into(),
                ))
            }
        };
        Ok(cfg)
    }

    /// Serializes to the format read by [`RunConfig::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "K = {}", self.k);
        let _ = writeln!(out, "gamma = {}", self.gamma);
        let _ = writeln!(out, "total_repeats = {}", self.total_repeats);
        let _ = writeln!(out, "reads_per_anneal = {}", self.reads_per_anneal);
        let _ = writeln!(out, "chain_strength_factor = {}", self.chain_strength_factor);
        let _ = writeln!(out, "topology = {}", self.topology);
        let _ = writeln!(out, "seed = {}", self.seed);
        let _ = writeln!(out, "precision_target = {}", self.precision_target);
        let _ = writeln!(out, "decomposer = {}", self.decomposer);
        let _ = writeln!(out, "local_search = {}", self.local_search);
        let _ = writeln!(out, "sweeps = {}", self.sweeps);
        if let Some((a, b)) = self.beta_range {
            let _ = writeln!(out, "beta_start = {a}");
            let _ = writeln!(out, "beta_end = {b}");
        }
        let _ = writeln!(out, "lambda_update = {}", self.lambda_update);
        let _ = writeln!(out, "early_exit = {}", self.early_exit);
        if let Some(size) = self.topology_size {
            let _ = writeln!(out, "topology_size = {size}");
        }
        out
    }
}

fn num<T: FromStr>(value: &str) -> std::result::Result<T, String>
where
    T::Err: fmt::Display,
{
    value.parse::<T>().map_err(|e| format!("cannot parse `{value}`: {e}"))
}
