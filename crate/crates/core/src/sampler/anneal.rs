use rand::rngs::SmallRng;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{SampleSet, Sampler, SamplerKind};
use crate::error::{QaeError, Result};
use crate::qubo::{Adjacency, Assignment, QuboModel};

/// Geometric inverse-temperature sweep from `beta_start` to `beta_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnealSchedule {
    sweeps: usize,
    beta_start: f64,
    beta_end: f64,
}

impl Default for AnnealSchedule {
    fn default() -> Self {
        AnnealSchedule {
            sweeps: 1000,
            beta_start: 0.1,
            beta_end: 10.0,
        }
    }
}

impl AnnealSchedule {
    pub fn new(sweeps: usize, beta_start: f64, beta_end: f64) -> Result<Self> {
        if sweeps == 0 {
            return Err(QaeError::Parameter("sweeps must be positive".into()));
        }
        if !(beta_start > 0.0 && beta_end > beta_start && beta_end.is_finite()) {
            return Err(QaeError::Parameter(format!(
                "need 0 < beta_start < beta_end, got {beta_start} and {beta_end}"
            )));
        }
        Ok(AnnealSchedule {
            sweeps,
            beta_start,
            beta_end,
        })
    }

    /// Range fitted to the model's bias magnitudes: the hottest sweep accepts the largest
    /// possible uphill flip with probability 1/2, the coldest accepts the smallest
    /// nonzero bias with probability 1/100.
    pub fn for_model(model: &QuboModel, sweeps: usize) -> Result<Self> {
        let adj = Adjacency::new(model);
        let mut max_delta = 0.0f64;
        let mut min_delta = f64::INFINITY;
        for (i, h) in model.linear().iter().enumerate() {
            let mut total = h.abs();
            let mut smallest = if *h != 0.0 { h.abs() } else { f64::INFINITY };
            for (_, w) in adj.of(i) {
                total += w.abs();
                if w != 0.0 {
                    smallest = smallest.min(w.abs());
                }
            }
            max_delta = max_delta.max(total);
            min_delta = min_delta.min(smallest);
        }
        if max_delta == 0.0 || !min_delta.is_finite() {
            return Ok(AnnealSchedule {
                sweeps,
                ..Default::default()
            });
        }
        let beta_start = std::f64::consts::LN_2 / max_delta;
        let mut beta_end = 100f64.ln() / min_delta;
        if beta_end <= beta_start {
            beta_end = beta_start * 100.0;
        }
        Self::new(sweeps, beta_start, beta_end)
    }

    pub fn sweeps(&self) -> usize {
        self.sweeps
    }

    pub fn beta_start(&self) -> f64 {
        self.beta_start
    }

    pub fn beta_end(&self) -> f64 {
        self.beta_end
    }

    pub fn betas(&self) -> Vec<f64> {
        if self.sweeps == 1 {
            return vec![self.beta_end];
        }
        let ratio = (self.beta_end / self.beta_start).ln() / (self.sweeps - 1) as f64;
        (0..self.sweeps)
            .map(|s| self.beta_start * (ratio * s as f64).exp())
            .collect()
    }
}

/// Seeded single-spin-flip Metropolis annealer.
#[derive(Debug, Clone)]
pub struct SimulatedAnnealer {
    pub reads: usize,
    pub schedule: AnnealSchedule,
    /// Recompute the full energy after every accepted flip and panic on drift above 1e-9.
    pub verify_bookkeeping: bool,
}

impl SimulatedAnnealer {
    pub fn new(reads: usize, schedule: AnnealSchedule) -> Self {
        SimulatedAnnealer {
            reads,
            schedule,
            verify_bookkeeping: false,
        }
    }
}

impl Sampler for SimulatedAnnealer {
    fn sample(&self, model: &QuboModel, seed: u64) -> Result<SampleSet> {
        if self.reads == 0 {
            return Err(QaeError::Parameter("reads must be positive".into()));
        }
        if model.num_vars() == 0 {
            return Err(QaeError::Parameter("model has no variables".into()));
        }
        let adj = Adjacency::new(model);
        let betas = self.schedule.betas();
        let reads: Vec<Assignment> = (0..self.reads)
            .into_par_iter()
            .map(|r| anneal_read(model, &adj, &betas, seed, r as u64, self.verify_bookkeeping))
            .collect();
        Ok(SampleSet::from_assignments(
            model,
            reads,
            SamplerKind::SimulatedAnnealing,
        ))
    }
}

pub fn simulated_anneal(
    model: &QuboModel,
    reads: usize,
    schedule: &AnnealSchedule,
    seed: u64,
) -> Result<SampleSet> {
    SimulatedAnnealer::new(reads, *schedule).sample(model, seed)
}

fn anneal_read(
    model: &QuboModel,
    adj: &Adjacency,
    betas: &[f64],
    seed: u64,
    read: u64,
    verify: bool,
) -> Assignment {
    // ChaCha streams give independent per-read seeds; the inner loop draws from a
    // faster generator seeded by them
    let mut seeder = ChaCha8Rng::seed_from_u64(seed);
    seeder.set_stream(read);
    let mut rng = SmallRng::from_rng(&mut seeder).expect("ChaCha never fails");
    let n = model.num_vars();
    let mut q: Assignment = (0..n).map(|_| rng.gen_range(0..=1u8)).collect();
    let mut field = adj.fields(model.linear(), &q);
    let mut energy = if verify {
        model.energy_unchecked(&q)
    } else {
        0.0
    };

    // +1 while the bit is 0, -1 once set: the flip delta is sign·field
    let mut sign: Vec<f64> = q.iter().map(|&b| if b == 0 { 1.0 } else { -1.0 }).collect();
    for &beta in betas {
        // exp(-40) is far below the resolution of a uniform f64 draw
        let cutoff = 40.0 / beta;
        for i in 0..n {
            let delta = sign[i] * field[i];
            if delta > 0.0 && (delta >= cutoff || rng.gen::<f64>() >= (-beta * delta).exp()) {
                continue;
            }
            let step = sign[i];
            sign[i] = -step;
            q[i] ^= 1;
            let (nb, wt) = adj.row(i);
            for (&j, &w) in nb.iter().zip(wt) {
                field[j] += step * w;
            }
            if verify {
                energy += delta;
                let exact = model.energy_unchecked(&q);
                assert!(
                    (energy - exact).abs() <= 1e-9,
                    "incremental energy {energy} drifted from {exact}"
                );
            }
        }
    }
    q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_betas() {
        let s = AnnealSchedule::new(3, 0.1, 10.0).unwrap();
        let b = s.betas();
        assert!((b[0] - 0.1).abs() < 1e-15);
        assert!((b[1] - 1.0).abs() < 1e-12);
        assert!((b[2] - 10.0).abs() < 1e-12);
        assert!(AnnealSchedule::new(0, 0.1, 1.0).is_err());
        assert!(AnnealSchedule::new(10, 1.0, 1.0).is_err());
    }

    #[test]
    fn zero_reads_rejected() {
        let m = QuboModel::from_parts(vec![-1.0], [], 0.0).unwrap();
        assert!(simulated_anneal(&m, 0, &AnnealSchedule::default(), 1).is_err());
    }

    #[test]
    fn fitted_schedule_spans_bias_scales() {
        let m = QuboModel::from_parts(vec![1e-6, 2.0], [((0, 1), -1.0)], 0.0).unwrap();
        let s = AnnealSchedule::for_model(&m, 100).unwrap();
        assert!((s.beta_start() - std::f64::consts::LN_2 / 3.0).abs() < 1e-12);
        assert!((s.beta_end() - 100f64.ln() / 1e-6).abs() < 1e-3);
    }
}
