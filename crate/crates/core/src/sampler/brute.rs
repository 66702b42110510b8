use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{SampleSet, Sampler, SamplerKind};
use crate::error::{QaeError, Result};
use crate::qubo::{Adjacency, QuboModel};

/// Refuse exhaustive enumeration beyond this many variables.
pub const BRUTE_FORCE_MAX_VARS: usize = 24;

/// Exhaustive enumeration keeping the `top_k` lowest-energy states (all when `None`).
#[derive(Debug, Clone, Default)]
pub struct BruteForce {
    pub top_k: Option<usize>,
}

impl Sampler for BruteForce {
    fn sample(&self, model: &QuboModel, _seed: u64) -> Result<SampleSet> {
        brute_force_top_k(model, self.top_k)
    }
}

/// Every assignment ranked by energy for up to 16 variables, otherwise the best 1024.
pub fn brute_force(model: &QuboModel) -> Result<SampleSet> {
    let top = if model.num_vars() <= 16 { None } else { Some(1024) };
    brute_force_top_k(model, top)
}

#[derive(PartialEq)]
struct Ranked(f64, u64);

impl Eq for Ranked {}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0).then(self.1.cmp(&other.1))
    }
}

pub fn brute_force_top_k(model: &QuboModel, top_k: Option<usize>) -> Result<SampleSet> {
    let n = model.num_vars();
    if n > BRUTE_FORCE_MAX_VARS {
        return Err(QaeError::Parameter(format!(
            "brute force refuses {n} variables (limit {BRUTE_FORCE_MAX_VARS})"
        )));
    }
    let keep = top_k.unwrap_or(usize::MAX).max(1);
    let adj = Adjacency::new(model);
    let mut q = vec![0u8; n];
    let mut field = model.linear().to_vec();
    let mut energy = model.offset();
    let mut gray = 0u64;
    let mut heap: BinaryHeap<Ranked> = BinaryHeap::new();
    let push = |heap: &mut BinaryHeap<Ranked>, e: f64, code: u64| {
        heap.push(Ranked(e, code));
        if heap.len() > keep {
            heap.pop();
        }
    };
    push(&mut heap, energy, 0);

    // Gray-code walk: step t flips bit trailing_zeros(t).
    for t in 1u64..(1u64 << n) {
        let i = t.trailing_zeros() as usize;
        let step = if q[i] == 0 { 1.0 } else { -1.0 };
        energy += step * field[i];
        q[i] ^= 1;
        gray ^= 1 << i;
        for (j, w) in adj.of(i) {
            field[j] += step * w;
        }
        push(&mut heap, energy, gray);
    }

    let assignments = heap
        .into_vec()
        .into_iter()
        .map(|Ranked(_, code)| (0..n).map(|i| ((code >> i) & 1) as u8).collect::<Vec<u8>>());
    Ok(SampleSet::from_assignments(
        model,
        assignments,
        SamplerKind::BruteForce,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_model_optimum_is_offset() {
        let mut m = QuboModel::new(3);
        m.add_offset(1.5);
        let s = brute_force(&m).unwrap();
        assert_eq!(s.best().unwrap().energy, 1.5);
        assert_eq!(s.len(), 8);
    }

    #[test]
    fn two_variable_example() {
        let m = QuboModel::from_parts(vec![1.0, 1.0], [((0, 1), -3.0)], 0.0).unwrap();
        let s = brute_force(&m).unwrap();
        let best = s.best().unwrap();
        assert_eq!(best.assignment, vec![1, 1]);
        assert_eq!(best.energy, -1.0);
    }

    #[test]
    fn refuses_large_models() {
        assert!(brute_force(&QuboModel::new(25)).is_err());
    }

    #[test]
    fn top_k_keeps_lowest() {
        let m = QuboModel::from_parts(vec![1.0, 2.0, 4.0], [], 0.0).unwrap();
        let s = brute_force_top_k(&m, Some(3)).unwrap();
        let e: Vec<f64> = s.iter().map(|x| x.energy).collect();
        assert_eq!(e, vec![0.0, 1.0, 2.0]);
    }
}
