use super::{SampleSet, SamplerKind};
use crate::error::{check_len, Result};
use crate::qubo::{Adjacency, Assignment, QuboModel};

/// Greedy single-bit descent: repeatedly flip the bit with the largest energy decrease
/// (lowest index on ties) until no flip lowers the energy.
pub fn steepest_descent(model: &QuboModel, start: &[u8]) -> Result<(Assignment, f64)> {
    check_len(model.num_vars(), start.len())?;
    let adj = Adjacency::new(model);
    let q = descend(model, &adj, start.to_vec());
    let e = model.energy_unchecked(&q);
    Ok((q, e))
}

fn descend(model: &QuboModel, adj: &Adjacency, mut q: Assignment) -> Assignment {
    let n = q.len();
    let mut field = adj.fields(model.linear(), &q);
    // Every step strictly lowers the energy; the cap only guards against rounding cycles.
    for _ in 0..(64 * n.max(1)) {
        let mut best = 0.0;
        let mut pick = None;
        for i in 0..n {
            let delta = if q[i] == 0 { field[i] } else { -field[i] };
            if delta < best {
                best = delta;
                pick = Some(i);
            }
        }
        let Some(i) = pick else { break };
        let step = if q[i] == 0 { 1.0 } else { -1.0 };
        q[i] ^= 1;
        for (j, w) in adj.of(i) {
            field[j] += step * w;
        }
    }
    q
}

/// Applies [`steepest_descent`] to every sample, keeping read counts.
pub fn refine_samples(model: &QuboModel, set: &SampleSet) -> Result<SampleSet> {
    if let Some(s) = set.samples().first() {
        check_len(model.num_vars(), s.assignment.len())?;
    }
    let adj = Adjacency::new(model);
    let refined = set.iter().flat_map(|s| {
        let q = descend(model, &adj, s.assignment.clone());
        std::iter::repeat_n(q, s.count)
    });
    Ok(SampleSet::from_assignments(
        model,
        refined.collect::<Vec<_>>(),
        SamplerKind::SteepestDescent,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_step_trace() {
        let m = QuboModel::from_parts(vec![-1.0, 2.0], [], 0.0).unwrap();
        let (q, e) = steepest_descent(&m, &[0, 1]).unwrap();
        assert_eq!(q, vec![1, 0]);
        assert_eq!(e, -1.0);
    }

    #[test]
    fn local_minimum_is_fixed_point() {
        let m = QuboModel::from_parts(vec![-1.0, 2.0], [((0, 1), 0.5)], 0.0).unwrap();
        let (q, _) = steepest_descent(&m, &[1, 0]).unwrap();
        assert_eq!(q, vec![1, 0]);
    }

    #[test]
    fn tie_breaks_to_lowest_index() {
        let m = QuboModel::from_parts(vec![-1.0, -1.0], [((0, 1), 5.0)], 0.0).unwrap();
        let (q, _) = steepest_descent(&m, &[0, 0]).unwrap();
        assert_eq!(q, vec![1, 0]);
    }

    #[test]
    fn length_mismatch() {
        assert!(steepest_descent(&QuboModel::new(2), &[0]).is_err());
    }
}
