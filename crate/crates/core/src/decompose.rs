//! Choosing which coefficients (or qubits) each Repeat optimizes, and building the
//! reduced QUBO for that choice.

use std::fmt;
use std::str::FromStr;

use crate::encoding::{functional_qubo, CoefficientVector, EncodingState};
use crate::error::{check_len, QaeError, Result};
use crate::matrix::SymmetricMatrix;
use crate::qubo::QuboModel;

/// Denominators below this are treated as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-12;
/// Ceiling applied to scores of degenerate configurations.
pub const SCORE_CAP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decomposer {
    /// Coefficients ranked once by their first-order perturbative weight.
    Perturbation,
    /// Qubits ranked every Repeat by the energy change of flipping them.
    EnergyImpact,
}

impl fmt::Display for Decomposer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decomposer::Perturbation => "perturbation",
            Decomposer::EnergyImpact => "energy-impact",
        })
    }
}

impl FromStr for Decomposer {
    type Err = QaeError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "perturbation" => Ok(Decomposer::Perturbation),
            "energy-impact" => Ok(Decomposer::EnergyImpact),
            other => Err(QaeError::Parameter(format!("unknown decomposer `{other}`"))),
        }
    }
}

/// Coefficient ordering with the reference configuration first.
#[derive(Debug, Clone, PartialEq)]
pub struct PriorityList {
    order: Vec<usize>,
    scores: Vec<f64>,
    degenerate: Vec<usize>,
}

impl PriorityList {
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Score per matrix index (not per position in `order`).
    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// Indices whose energy denominator was degenerate and whose score was capped.
    pub fn degenerate(&self) -> &[usize] {
        &self.degenerate
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Ranks configurations by the first-order perturbative estimate of their coefficient
/// in the reference state, `|H_α0 / (H_00 − H_αα)|`.
pub fn priority_list(h: &SymmetricMatrix) -> PriorityList {
    let n = h.dim();
    let mut scores = vec![0.0; n];
    let mut degenerate = Vec::new();
    scores[0] = f64::INFINITY;
    for (alpha, score) in scores.iter_mut().enumerate().skip(1) {
        let coupling = h.get(alpha, 0).abs();
        let denom = (h.get(0, 0) - h.get(alpha, alpha)).abs();
        *score = if denom < DEGENERACY_THRESHOLD {
            degenerate.push(alpha);
            (coupling / DEGENERACY_THRESHOLD).min(SCORE_CAP)
        } else {
            coupling / denom
        };
    }
    let mut order: Vec<usize> = (1..n).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order.insert(0, 0);
    PriorityList {
        order,
        scores,
        degenerate,
    }
}

/// Qubits ordered by descending `|ΔF|` of a single flip from `current` (lowest index
/// first on ties).
pub fn default_priority(model: &QuboModel, current: &[u8]) -> Result<Vec<usize>> {
    check_len(model.num_vars(), current.len())?;
    let impact: Vec<f64> = (0..model.num_vars())
        .map(|i| model.flip_delta(current, i).abs())
        .collect();
    let mut order: Vec<usize> = (0..model.num_vars()).collect();
    order.sort_by(|&a, &b| impact[b].total_cmp(&impact[a]).then(a.cmp(&b)));
    Ok(order)
}

/// Cyclic window of `gamma` entries of the priority order for a 1-based Repeat index.
pub fn select_subspace(pl: &PriorityList, gamma: usize, repeat_index: usize) -> Result<Vec<usize>> {
    let n = pl.len();
    if gamma == 0 || gamma > n {
        return Err(QaeError::Parameter(format!("gamma {gamma} must lie in 1..={n}")));
    }
    if repeat_index == 0 {
        return Err(QaeError::Parameter("repeat index is 1-based".into()));
    }
    let start = ((repeat_index - 1) * gamma) % n;
    Ok((0..gamma).map(|i| pl.order[(start + i) % n]).collect())
}

/// QUBO over the bit blocks of `subspace` with every other coefficient held at
/// `frozen`. Block `j` of the result encodes coefficient `subspace[j]`; at any bits its
/// energy equals the full functional with the non-subspace coefficients fixed.
pub fn extract_subqubo(
    h: &SymmetricMatrix,
    lambda: f64,
    enc: &EncodingState,
    subspace: &[usize],
    frozen: &CoefficientVector,
) -> Result<QuboModel> {
    if subspace.is_empty() {
        return Err(QaeError::Parameter("subspace is empty".into()));
    }
    check_len(h.dim(), enc.dim())?;
    check_len(h.dim(), frozen.len())?;
    let mut seen = vec![false; h.dim()];
    for &a in subspace {
        if a >= h.dim() || std::mem::replace(&mut seen[a], true) {
            return Err(QaeError::Parameter(format!("bad or repeated subspace index {a}")));
        }
    }
    Ok(functional_qubo(h, lambda, enc, subspace, frozen.values()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{build_qubo, decode_coefficient, energy_functional};

    fn h3() -> SymmetricMatrix {
        SymmetricMatrix::from_rows(&[
            vec![-10.0, 0.5, 0.01],
            vec![0.5, -5.0, 0.0],
            vec![0.01, 0.0, -4.0],
        ])
        .unwrap()
    }

    #[test]
    fn perturbative_scores() {
        let pl = priority_list(&h3());
        assert_eq!(pl.order(), &[0, 1, 2]);
        assert_eq!(pl.scores()[0], f64::INFINITY);
        assert!((pl.scores()[1] - 0.1).abs() < 1e-15);
        assert!((pl.scores()[2] - 0.01 / 6.0).abs() < 1e-15);
        assert!(pl.degenerate().is_empty());
    }

    #[test]
    fn diagonal_matrix_keeps_index_order() {
        let pl = priority_list(&SymmetricMatrix::diagonal(&[1.0, 3.0, 2.0, 5.0]).unwrap());
        assert_eq!(pl.order(), &[0, 1, 2, 3]);
        assert!(pl.scores()[1..].iter().all(|s| *s == 0.0));
    }

    #[test]
    fn degenerate_denominator_is_capped() {
        let h = SymmetricMatrix::from_rows(&[vec![1.0, 0.3], vec![0.3, 1.0]]).unwrap();
        let pl = priority_list(&h);
        assert_eq!(pl.degenerate(), &[1]);
        assert_eq!(pl.scores()[1], 0.3 / DEGENERACY_THRESHOLD);
        let big = SymmetricMatrix::from_rows(&[vec![1.0, 5.0], vec![5.0, 1.0]]).unwrap();
        assert_eq!(priority_list(&big).scores()[1], SCORE_CAP);
    }

    #[test]
    fn energy_impact_order() {
        let m = QuboModel::from_parts(vec![-5.0, 0.1], [], 0.0).unwrap();
        assert_eq!(default_priority(&m, &[0, 0]).unwrap(), vec![0, 1]);
        assert_eq!(default_priority(&QuboModel::new(3), &[0, 0, 0]).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn cyclic_windows() {
        let h = SymmetricMatrix::diagonal(&(0..9).map(|i| i as f64).collect::<Vec<_>>()).unwrap();
        let pl = priority_list(&h);
        assert_eq!(select_subspace(&pl, 3, 1).unwrap(), vec![0, 1, 2]);
        assert_eq!(select_subspace(&pl, 3, 2).unwrap(), vec![3, 4, 5]);
        assert_eq!(select_subspace(&pl, 3, 4).unwrap(), vec![0, 1, 2]);
        assert_eq!(select_subspace(&pl, 4, 3).unwrap(), vec![8, 0, 1, 2]);
        assert!(select_subspace(&pl, 0, 1).is_err());
        assert!(select_subspace(&pl, 10, 1).is_err());
    }

    #[test]
    fn full_subspace_equals_full_qubo() {
        let h = h3();
        let enc = EncodingState::new(vec![-1.0, 0.2, -0.1], 3, 2).unwrap();
        let full = build_qubo(&h, -9.5, &enc).unwrap();
        let frozen = CoefficientVector::new(enc.mu().to_vec());
        let sub = extract_subqubo(&h, -9.5, &enc, &[0, 1, 2], &frozen).unwrap();
        assert_eq!(sub, full);
    }

    #[test]
    fn frozen_coefficient_matches_functional() {
        let h = SymmetricMatrix::from_rows(&[vec![1.0, 0.4], vec![0.4, 2.0]]).unwrap();
        let enc = EncodingState::new(vec![0.3, -0.2], 1, 1).unwrap();
        let v = 0.77;
        let frozen = CoefficientVector::new(vec![0.0, v]);
        let sub = extract_subqubo(&h, 1.3, &enc, &[0], &frozen).unwrap();
        for q in 0..2u8 {
            let a0 = decode_coefficient(&[q], 0.3, 1.0);
            let expect = energy_functional(&h, 1.3, &[a0, v]).unwrap();
            assert!((sub.energy(&[q]).unwrap() - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_or_bad_subspace() {
        let h = h3();
        let enc = EncodingState::initial(3, 2).unwrap();
        let frozen = CoefficientVector::zeros(3);
        assert!(extract_subqubo(&h, 0.0, &enc, &[], &frozen).is_err());
        assert!(extract_subqubo(&h, 0.0, &enc, &[1, 1], &frozen).is_err());
        assert!(extract_subqubo(&h, 0.0, &enc, &[3], &frozen).is_err());
    }

    #[test]
    fn zero_background_equals_submatrix_qubo() {
        let h = h3();
        let enc = EncodingState::initial(3, 3).unwrap();
        let sub = extract_subqubo(&h, -7.0, &enc, &[0, 2], &CoefficientVector::zeros(3)).unwrap();
        let block = SymmetricMatrix::from_rows(&[vec![-10.0, 0.01], vec![0.01, -4.0]]).unwrap();
        let direct = build_qubo(&block, -7.0, &EncodingState::initial(2, 3).unwrap()).unwrap();
        assert_eq!(sub, direct);
    }
}
