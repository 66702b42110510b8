//! The Repeat loop: decomposition, embedding, annealing, composition and
//! post-processing, with the Lagrange multiplier and encoding schedules.

use log::{debug, warn};

use crate::config::{LambdaUpdate, RunConfig};
use crate::decompose::{
    default_priority, extract_subqubo, priority_list, select_subspace, Decomposer, PriorityList,
};
use crate::embedding::{chain_strength, embed, embed_apply, unembed, Embedding};
use crate::encoding::{scale_coefficients, CoefficientVector, EncodingState};
use crate::error::{check_len, QaeError, Result};
use crate::matrix::SymmetricMatrix;
use crate::qubo::{Assignment, QuboModel};
use crate::sampler::{refine_samples, AnnealSchedule, SampleSet, Sampler, SimulatedAnnealer};
use crate::topology::{build_topology, TopologyGraph, TopologyKind};
use crate::trace::{ConvergenceTrace, TraceRecord};

/// `aᵀHa / aᵀa`.
pub fn rayleigh_quotient(h: &SymmetricMatrix, a: &CoefficientVector) -> Result<f64> {
    check_len(h.dim(), a.len())?;
    let norm: f64 = a.values().iter().map(|x| x * x).sum();
    if norm == 0.0 {
        return Err(QaeError::Numerical("Rayleigh quotient of a zero vector".into()));
    }
    let ha = h.mul_vec(a.values());
    Ok(a.values().iter().zip(&ha).map(|(x, y)| x * y).sum::<f64>() / norm)
}

#[derive(Debug, Clone)]
pub struct ResultRecord {
    pub final_energy: f64,
    pub final_coefficients: CoefficientVector,
    pub trace: ConvergenceTrace,
    pub config_echo: RunConfig,
}

/// Simulated annealer whose inverse-temperature range is either fixed or fitted to each
/// model it is handed.
#[derive(Debug, Clone)]
pub struct FittedAnnealer {
    pub reads: usize,
    pub sweeps: usize,
    pub beta_range: Option<(f64, f64)>,
}

impl FittedAnnealer {
    pub fn from_config(cfg: &RunConfig) -> Self {
        FittedAnnealer {
            reads: cfg.reads_per_anneal,
            sweeps: cfg.sweeps,
            beta_range: cfg.beta_range,
        }
    }
}

impl Sampler for FittedAnnealer {
    fn sample(&self, model: &QuboModel, seed: u64) -> Result<SampleSet> {
        let schedule = match self.beta_range {
            Some((a, b)) => AnnealSchedule::new(self.sweeps, a, b)?,
            None => AnnealSchedule::for_model(model, self.sweeps)?,
        };
        SimulatedAnnealer::new(self.reads, schedule).sample(model, seed)
    }
}

fn mix_seed(seed: u64, stream: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Logical samples of one sub-problem plus the mean chain-break fraction.
struct SubSamples {
    set: SampleSet,
    chain_break_fraction: f64,
    flags: Vec<String>,
}

/// Configured QAE run over one matrix.
pub struct QaeSolver<'a> {
    h: &'a SymmetricMatrix,
    cfg: RunConfig,
    sampler: Box<dyn Sampler + 'a>,
    start: Option<(CoefficientVector, f64)>,
    topology: Option<TopologyGraph>,
    embedding: Option<Embedding>,
}

impl<'a> QaeSolver<'a> {
    pub fn new(h: &'a SymmetricMatrix, cfg: RunConfig) -> Result<Self> {
        cfg.validate(h.dim())?;
        let sampler = Box::new(FittedAnnealer::from_config(&cfg));
        Ok(QaeSolver {
            h,
            cfg,
            sampler,
            start: None,
            topology: None,
            embedding: None,
        })
    }

    /// Replaces the annealer used on every sub-problem.
    pub fn with_sampler(mut self, sampler: impl Sampler + 'a) -> Self {
        self.sampler = Box::new(sampler);
        self
    }

    /// Starts from `coefficients` (scaled before use) and multiplier `lambda` instead of
    /// the zero vector and `H_00`.
    pub fn with_start(mut self, coefficients: CoefficientVector, lambda: f64) -> Result<Self> {
        check_len(self.h.dim(), coefficients.len())?;
        self.start = Some((scale_coefficients(&coefficients)?, lambda));
        Ok(self)
    }

    pub fn run(mut self) -> Result<ResultRecord> {
        let h = self.h;
        let dim = h.dim();
        let cfg = self.cfg.clone();
        let plist = priority_list(h);
        let sweep_len = dim.div_ceil(cfg.gamma);

        let (mut best, mut lambda) = match self.start.take() {
            Some((a, lambda)) => (Some(a), lambda),
            None => (None, h.get(0, 0)),
        };
        let mut best_energy = match &best {
            Some(a) => rayleigh_quotient(h, a)?,
            None => f64::INFINITY,
        };
        let mut trace = ConvergenceTrace::new();
        let mut stalled = 0usize;

        for repeat in 1..=cfg.total_repeats {
            let mu = best
                .as_ref()
                .map(|a| a.values().to_vec())
                .unwrap_or_else(|| vec![0.0; dim]);
            let outcome = self.repeat(&plist, repeat, lambda, mu);
            let (repeat_energy, candidate, subspace, breaks, flags) = match outcome {
                Ok(v) => v,
                Err(e) => {
                    warn!("repeat {repeat} skipped: {e}");
                    continue;
                }
            };
            let previous = best_energy;
            if let Some(a) = candidate {
                if repeat_energy < best_energy {
                    best_energy = repeat_energy;
                    best = Some(a);
                }
            }
            trace.push(TraceRecord {
                repeat_index: repeat,
                lambda,
                repeat_energy,
                best_energy,
                subspace,
                chain_break_fraction: breaks,
                flags,
            });
            debug!("repeat {repeat}: lambda={lambda} repeat={repeat_energy} best={best_energy}");

            let next = match cfg.lambda_update {
                LambdaUpdate::Best => best_energy,
                LambdaUpdate::Repeat => repeat_energy,
            };
            if next.is_finite() {
                lambda = next;
            }

            if repeat > 1 && previous - best_energy < cfg.precision_target {
                stalled += 1;
            } else {
                stalled = 0;
            }
            if cfg.early_exit && stalled >= sweep_len {
                break;
            }
        }

        let final_coefficients = best.ok_or_else(|| {
            QaeError::Numerical("no Repeat produced a nonzero coefficient vector".into())
        })?;
        let final_energy = rayleigh_quotient(h, &final_coefficients)?;
        Ok(ResultRecord {
            final_energy,
            final_coefficients,
            trace,
            config_echo: cfg,
        })
    }

    #[allow(clippy::type_complexity)]
    fn repeat(
        &mut self,
        plist: &PriorityList,
        repeat: usize,
        lambda: f64,
        mu: Vec<f64>,
    ) -> Result<(f64, Option<CoefficientVector>, Vec<usize>, f64, Vec<String>)> {
        let h = self.h;
        let k = self.cfg.k;
        let enc = EncodingState::new(mu, k, repeat)?;
        let background = CoefficientVector::new(enc.mu().to_vec());

        // decomposition: sub-QUBO plus the full-problem variable of each sub variable
        let (sub, var_map, subspace) = match self.cfg.decomposer {
            Decomposer::Perturbation => {
                let subspace = select_subspace(plist, self.cfg.gamma, repeat)?;
                let sub = extract_subqubo(h, lambda, &enc, &subspace, &background)?;
                let var_map: Vec<usize> = subspace
                    .iter()
                    .flat_map(|&a| (0..k).map(move |b| a * k + b))
                    .collect();
                (sub, var_map, subspace)
            }
            Decomposer::EnergyImpact => {
                let full = crate::encoding::build_qubo(h, lambda, &enc)?;
                let zeros = vec![0u8; full.num_vars()];
                let mut qubits = default_priority(&full, &zeros)?;
                qubits.truncate(self.cfg.subproblem_vars().min(full.num_vars()));
                qubits.sort_unstable();
                let sub = full.restrict(&qubits, &zeros)?;
                let mut subspace: Vec<usize> = qubits.iter().map(|q| q / k).collect();
                subspace.dedup();
                (sub, qubits, subspace)
            }
        };

        // embedding + annealing
        let seed = mix_seed(self.cfg.seed, repeat as u64);
        let mut samples = self.anneal(&sub, seed)?;
        if self.cfg.local_search {
            samples.set = refine_samples(&sub, &samples.set)?;
        }

        // composition + post-processing
        let mut best_here: Option<(f64, CoefficientVector)> = None;
        let mut full_bits: Assignment = vec![0; enc.num_vars()];
        for sample in samples.set.iter() {
            for (local, &global) in var_map.iter().enumerate() {
                full_bits[global] = sample.assignment[local];
            }
            let merged = crate::encoding::decode_sample(&full_bits, &enc)?;
            for &global in &var_map {
                full_bits[global] = 0;
            }
            let Ok(scaled) = scale_coefficients(&merged) else {
                continue;
            };
            let e = rayleigh_quotient(h, &scaled)?;
            if best_here.as_ref().is_none_or(|(b, _)| e < *b) {
                best_here = Some((e, scaled));
            }
        }
        let (energy, coeffs) = match best_here {
            Some((e, a)) => (e, Some(a)),
            None => (f64::INFINITY, None),
        };
        Ok((energy, coeffs, subspace, samples.chain_break_fraction, samples.flags))
    }

    fn anneal(&mut self, sub: &QuboModel, seed: u64) -> Result<SubSamples> {
        if self.cfg.topology == TopologyKind::Complete {
            return Ok(SubSamples {
                set: self.sampler.sample(sub, seed)?,
                chain_break_fraction: 0.0,
                flags: Vec::new(),
            });
        }

        let mut flags = Vec::new();
        if self.topology.is_none() {
            let size = self.cfg.topology_size.unwrap_or(self.cfg.subproblem_vars());
            self.topology = Some(build_topology(self.cfg.topology, size)?);
        }
        let topo = self.topology.as_ref().expect("topology built above");
        let reusable = self
            .embedding
            .as_ref()
            .is_some_and(|e| e.validate(sub, topo).is_ok());
        if !reusable {
            self.embedding = Some(embed(sub, topo, self.cfg.seed)?);
        }
        let emb = self.embedding.as_ref().expect("embedding set above");

        if sub.quadratic().is_empty() {
            flags.push("chain_strength_fallback".to_string());
        }
        let strength = chain_strength(sub, self.cfg.chain_strength_factor)?;
        let hardware = embed_apply(sub, emb, topo, strength)?;
        let used = emb.used_nodes();
        let compact = hardware.restrict(&used, &vec![0u8; hardware.num_vars()])?;
        let raw = self.sampler.sample(&compact, seed)?;

        let mut logical = Vec::with_capacity(raw.total_count());
        let mut broken = 0.0;
        let mut node_bits = vec![0u8; topo.num_nodes()];
        for s in raw.iter() {
            for (i, &node) in used.iter().enumerate() {
                node_bits[node] = s.assignment[i];
            }
            let (q, fraction) = unembed(&node_bits, emb)?;
            broken += fraction * s.count as f64;
            logical.extend(std::iter::repeat_n(q, s.count));
        }
        let total = raw.total_count().max(1) as f64;
        Ok(SubSamples {
            set: SampleSet::from_assignments(sub, logical, raw.source()),
            chain_break_fraction: broken / total,
            flags,
        })
    }
}

/// Runs the full workflow with the annealer described by `cfg`.
pub fn run_qae(h: &SymmetricMatrix, cfg: &RunConfig) -> Result<ResultRecord> {
    QaeSolver::new(h, cfg.clone())?.run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::exact_diagonalize;

    #[test]
    fn rayleigh_basics() {
        let h = SymmetricMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        assert_eq!(rayleigh_quotient(&h, &vec![1.0, 0.0].into()).unwrap(), 2.0);
        let a = rayleigh_quotient(&h, &vec![0.3, -0.7].into()).unwrap();
        let b = rayleigh_quotient(&h, &vec![-0.6, 1.4].into()).unwrap();
        assert!((a - b).abs() < 1e-15);
        assert!(rayleigh_quotient(&h, &vec![0.0, 0.0].into()).is_err());
    }

    #[test]
    fn rayleigh_of_ground_state() {
        let h = crate::matrix::generate_ci_like_matrix(4, 1.0, 0.3, 5).unwrap();
        let eig = exact_diagonalize(&h).unwrap();
        let v = CoefficientVector::new(eig.ground_state().to_vec());
        assert!((rayleigh_quotient(&h, &v).unwrap() - eig.lowest()).abs() < 1e-12);
    }

    #[test]
    fn seeds_differ_per_stream() {
        assert_ne!(mix_seed(1, 1), mix_seed(1, 2));
        assert_ne!(mix_seed(1, 1), mix_seed(2, 1));
    }
}
