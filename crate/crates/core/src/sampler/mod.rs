//! QUBO minimizers behind a common [`Sampler`] interface.
//!
//! Every sampler returns a [`SampleSet`] whose energies are recomputed from the model
//! and whose entries are sorted by ascending energy.

mod anneal;
mod brute;
mod descent;

use std::collections::HashMap;
use std::fmt;

pub use anneal::{simulated_anneal, AnnealSchedule, SimulatedAnnealer};
pub use brute::{brute_force, brute_force_top_k, BruteForce, BRUTE_FORCE_MAX_VARS};
pub use descent::{refine_samples, steepest_descent};

use crate::error::Result;
use crate::qubo::{Assignment, QuboModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SamplerKind {
    SimulatedAnnealing,
    BruteForce,
    SteepestDescent,
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SamplerKind::SimulatedAnnealing => "simulated-annealing",
            SamplerKind::BruteForce => "brute-force",
            SamplerKind::SteepestDescent => "steepest-descent",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub assignment: Assignment,
    pub energy: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    samples: Vec<Sample>,
    source: SamplerKind,
}

impl SampleSet {
    /// Aggregates duplicate assignments, recomputes energies from `model` and sorts by
    /// energy (ties by assignment).
    pub fn from_assignments(
        model: &QuboModel,
        assignments: impl IntoIterator<Item = Assignment>,
        source: SamplerKind,
    ) -> Self {
        let mut counts: HashMap<Assignment, usize> = HashMap::new();
        for a in assignments {
            *counts.entry(a).or_insert(0) += 1;
        }
        let mut samples: Vec<Sample> = counts
            .into_iter()
            .map(|(assignment, count)| Sample {
                energy: model.energy_unchecked(&assignment),
                assignment,
                count,
            })
            .collect();
        samples.sort_by(|a, b| {
            a.energy
                .total_cmp(&b.energy)
                .then_with(|| a.assignment.cmp(&b.assignment))
        });
        SampleSet { samples, source }
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn source(&self) -> SamplerKind {
        self.source
    }

    pub fn best(&self) -> Option<&Sample> {
        self.samples.first()
    }

    /// Number of distinct assignments.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Total reads represented, counting duplicates.
    pub fn total_count(&self) -> usize {
        self.samples.iter().map(|s| s.count).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Sample> {
        self.samples.iter()
    }
}

/// Anything that can draw low-energy samples from a QUBO. A hardware backend would
/// implement this trait.
pub trait Sampler: Send + Sync {
    fn sample(&self, model: &QuboModel, seed: u64) -> Result<SampleSet>;
}
