//! Floating qubit encoding of expansion coefficients and the QUBO form of the
//! Lagrangian energy functional `ε(a) = Σ a_α a_β (H_αβ − λ δ_αβ)`.
//!
//! Coefficient `α` is represented by `K` bits around a running estimate `μ_α`:
//!
//! ```text
//! a_α = μ_α + σ · Σ_k f_k 2^{-k} q_k,   f_0 = -1, f_k = 1 (k > 0)
//! ```
//!
//! Bit `k` of coefficient `α` is variable `α·K + k` of the QUBO.

use crate::error::{check_len, QaeError, Result};
use crate::matrix::SymmetricMatrix;
use crate::qubo::QuboModel;

/// Shift scale for iteration `i` (1-based): `2^{(1 - i)/2}`.
pub fn sigma_for_iteration(i: usize) -> f64 {
    assert!(i >= 1, "iterations are 1-based");
    // Integer exponents stay exact; odd ones pick up one factor of 1/√2.
    let steps = (i - 1) as i32;
    let half = (-(steps / 2) as f64).exp2();
    if steps % 2 == 0 {
        half
    } else {
        half * std::f64::consts::FRAC_1_SQRT_2
    }
}

/// Signed weight `f_k 2^{-k}` of bit `k`.
#[inline]
pub fn bit_weight(k: usize) -> f64 {
    let w = (-(k as f64)).exp2();
    if k == 0 {
        -w
    } else {
        w
    }
}

/// Encoding parameters for one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct EncodingState {
    mu: Vec<f64>,
    sigma: f64,
    bits: usize,
    iteration: usize,
}

impl EncodingState {
    pub fn new(mu: Vec<f64>, bits: usize, iteration: usize) -> Result<Self> {
        if bits == 0 {
            return Err(QaeError::Parameter("bits per coefficient must be positive".into()));
        }
        if iteration == 0 {
            return Err(QaeError::Parameter("iteration index is 1-based".into()));
        }
        if let Some(v) = mu.iter().find(|v| !(v.abs() <= 1.0)) {
            return Err(QaeError::Parameter(format!("mu value {v} outside [-1, 1]")));
        }
        Ok(EncodingState {
            mu,
            sigma: sigma_for_iteration(iteration),
            bits,
            iteration,
        })
    }

    /// State with an arbitrary positive scale instead of the per-iteration schedule;
    /// `iteration()` reports 0.
    pub fn with_sigma(mu: Vec<f64>, bits: usize, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(QaeError::Parameter(format!("sigma {sigma} must be positive")));
        }
        let mut state = Self::new(mu, bits, 1)?;
        state.sigma = sigma;
        state.iteration = 0;
        Ok(state)
    }

    /// Initial state: every coefficient estimate is zero.
    pub fn initial(dim: usize, bits: usize) -> Result<Self> {
        Self::new(vec![0.0; dim], bits, 1)
    }

    pub fn mu(&self) -> &[f64] {
        &self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }

    pub fn num_vars(&self) -> usize {
        self.mu.len() * self.bits
    }

    /// Smallest representable change of a coefficient.
    pub fn resolution(&self) -> f64 {
        self.sigma * (-((self.bits - 1) as f64)).exp2()
    }

    /// Interval `[μ_α − σ, μ_α + σ(1 − 2^{1−K})]` reachable by coefficient `alpha`.
    pub fn range(&self, alpha: usize) -> (f64, f64) {
        let hi = if self.bits == 1 {
            0.0
        } else {
            1.0 - (1.0 - self.bits as f64).exp2()
        };
        (self.mu[alpha] - self.sigma, self.mu[alpha] + self.sigma * hi)
    }
}

/// Expansion coefficients of the trial vector in the matrix basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector(Vec<f64>);

impl CoefficientVector {
    pub fn new(values: Vec<f64>) -> Self {
        CoefficientVector(values)
    }

    pub fn zeros(dim: usize) -> Self {
        CoefficientVector(vec![0.0; dim])
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|v| *v == 0.0)
    }
}

impl From<Vec<f64>> for CoefficientVector {
    fn from(v: Vec<f64>) -> Self {
        CoefficientVector(v)
    }
}

/// `μ + σ (−q_0 + Σ_{k≥1} 2^{−k} q_k)`.
pub fn decode_coefficient(bits: &[u8], mu_alpha: f64, sigma: f64) -> f64 {
    let correction: f64 = bits
        .iter()
        .enumerate()
        .filter(|(_, &b)| b != 0)
        .map(|(k, _)| bit_weight(k))
        .sum();
    mu_alpha + sigma * correction
}

pub fn decode_sample(assignment: &[u8], enc: &EncodingState) -> Result<CoefficientVector> {
    check_len(enc.num_vars(), assignment.len())?;
    Ok(CoefficientVector(
        assignment
            .chunks(enc.bits)
            .zip(&enc.mu)
            .map(|(bits, &mu)| decode_coefficient(bits, mu, enc.sigma))
            .collect(),
    ))
}

/// `ε(a) = Σ_αβ a_α a_β (H_αβ − λ δ_αβ)`.
pub fn energy_functional(h: &SymmetricMatrix, lambda: f64, a: &[f64]) -> Result<f64> {
    check_len(h.dim(), a.len())?;
    let ha = h.mul_vec(a);
    Ok(a.iter()
        .zip(&ha)
        .map(|(x, hx)| x * hx - lambda * x * x)
        .sum())
}

/// QUBO of the energy functional over every coefficient.
pub fn build_qubo(h: &SymmetricMatrix, lambda: f64, enc: &EncodingState) -> Result<QuboModel> {
    check_len(h.dim(), enc.dim())?;
    let all: Vec<usize> = (0..h.dim()).collect();
    Ok(functional_qubo(h, lambda, enc, &all, enc.mu()))
}

/// QUBO over the bit blocks of `free` coefficients (block `j` of the result encodes
/// coefficient `free[j]`), with every other coefficient pinned to `pinned[β]`.
///
/// The expansion point is `c_β = μ_β` for free coefficients and `pinned[β]` otherwise, so
/// that at bits `q`:
/// quadratic `(j,n),(l,m)` = `2σ² w_n w_m H'_{αβ}` (halved and folded into linear when
/// it is the same variable), linear `(j,n)` = `2σ w_n Σ_β c_β H'_{αβ}` and offset
/// `cᵀ H' c`, with `w_k = f_k 2^{-k}` and `H' = H − λI`.
pub(crate) fn functional_qubo(
    h: &SymmetricMatrix,
    lambda: f64,
    enc: &EncodingState,
    free: &[usize],
    pinned: &[f64],
) -> QuboModel {
    let k_bits = enc.bits();
    let sigma = enc.sigma();
    let dim = h.dim();
    let shifted = |a: usize, b: usize| h.get(a, b) - if a == b { lambda } else { 0.0 };

    let mut is_free = vec![false; dim];
    for &a in free {
        is_free[a] = true;
    }
    let center: Vec<f64> = (0..dim)
        .map(|b| if is_free[b] { enc.mu()[b] } else { pinned[b] })
        .collect();

    let weights: Vec<f64> = (0..k_bits).map(bit_weight).collect();
    let mut model = QuboModel::new(free.len() * k_bits);

    let mut offset = 0.0;
    for a in 0..dim {
        for b in 0..dim {
            offset += center[a] * center[b] * shifted(a, b);
        }
    }
    model.add_offset(offset);

    for (j, &alpha) in free.iter().enumerate() {
        let grad: f64 = (0..dim).map(|b| center[b] * shifted(alpha, b)).sum();
        for (n, wn) in weights.iter().enumerate() {
            model.add_linear(j * k_bits + n, 2.0 * sigma * wn * grad);
        }
        for (l, &beta) in free.iter().enumerate().skip(j) {
            let hp = shifted(alpha, beta);
            if hp == 0.0 {
                continue;
            }
            for (n, wn) in weights.iter().enumerate() {
                for (m, wm) in weights.iter().enumerate() {
                    let (u, v) = (j * k_bits + n, l * k_bits + m);
                    let base = sigma * sigma * wn * wm * hp;
                    if j == l {
                        if n == m {
                            model.add_linear(u, base);
                        } else if n < m {
                            model.add_quadratic(u, v, 2.0 * base);
                        }
                    } else {
                        model.add_quadratic(u, v, 2.0 * base);
                    }
                }
            }
        }
    }
    model
}

/// Rescales `a` so its largest-magnitude entry (lowest index on ties) becomes exactly −1.
pub fn scale_coefficients(a: &CoefficientVector) -> Result<CoefficientVector> {
    let mut max_abs = 0.0;
    let mut sign = 1.0;
    for &v in a.values() {
        if v.abs() > max_abs {
            max_abs = v.abs();
            sign = v.signum();
        }
    }
    if max_abs == 0.0 || !max_abs.is_finite() {
        return Err(QaeError::Numerical(
            "cannot scale an all-zero or non-finite coefficient vector".into(),
        ));
    }
    Ok(CoefficientVector(
        a.values().iter().map(|v| -sign * (v / max_abs)).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_schedule() {
        assert_eq!(sigma_for_iteration(1), 1.0);
        assert_eq!(sigma_for_iteration(2), std::f64::consts::FRAC_1_SQRT_2);
        assert_eq!(sigma_for_iteration(3), 0.5);
        // K = 10 resolution: 2^-14.5 at i = 12, first below 1e-5 at i = 17
        assert_eq!(sigma_for_iteration(12) * (-9f64).exp2(), (-14.5f64).exp2());
        assert!(sigma_for_iteration(16) * (-9f64).exp2() > 1e-5);
        assert!(sigma_for_iteration(17) * (-9f64).exp2() < 1e-5);
        for i in 1..40 {
            let expect = 2f64.powf((1.0 - i as f64) / 2.0);
            assert!((sigma_for_iteration(i) - expect).abs() <= 1e-15 * expect);
        }
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_coefficient(&[0, 0, 0], 0.5, 0.25), 0.5);
        assert_eq!(decode_coefficient(&[1, 0, 0], 0.0, 1.0), -1.0);
        assert_eq!(decode_coefficient(&[0, 1, 1], 0.25, 0.5), 0.625);
    }

    #[test]
    fn decode_sample_blocks() {
        let enc = EncodingState::new(vec![0.0, 0.0], 2, 1).unwrap();
        let a = decode_sample(&[1, 0, 0, 1], &enc).unwrap();
        assert_eq!(a.values(), &[-1.0, 0.5]);
        let zero = decode_sample(&[0, 0, 0, 0], &enc).unwrap();
        assert_eq!(zero.values(), enc.mu());
        assert!(decode_sample(&[0, 0, 0], &enc).is_err());
    }

    #[test]
    fn single_qubit_qubo() {
        let h = SymmetricMatrix::from_rows(&[vec![2.0]]).unwrap();
        let enc = EncodingState::new(vec![0.0], 1, 1).unwrap();
        let m = build_qubo(&h, 1.0, &enc).unwrap();
        assert_eq!(m.linear(), &[1.0]);
        assert!(m.quadratic().is_empty());
        assert_eq!(m.offset(), 0.0);
        assert_eq!(m.energy(&[0]).unwrap(), 0.0);
        assert_eq!(m.energy(&[1]).unwrap(), 1.0);
    }

    #[test]
    fn vanishing_functional() {
        let h = SymmetricMatrix::from_rows(&[vec![-3.5]]).unwrap();
        let enc = EncodingState::new(vec![0.0], 6, 2).unwrap();
        let m = build_qubo(&h, -3.5, &enc).unwrap();
        assert!(m.linear().iter().all(|v| *v == 0.0));
        assert!(m.quadratic().is_empty());
        assert_eq!(m.offset(), 0.0);
    }

    #[test]
    fn shift_invariance() {
        let h = SymmetricMatrix::from_rows(&[
            vec![1.0, 0.25, -0.5],
            vec![0.25, 2.0, 0.125],
            vec![-0.5, 0.125, 3.0],
        ])
        .unwrap();
        let enc = EncodingState::new(vec![-1.0, 0.5, 0.25], 3, 3).unwrap();
        let a = build_qubo(&h, 0.5, &enc).unwrap();
        let b = build_qubo(&h.shifted(4.0), 4.5, &enc).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn scaling_rule() {
        let s = scale_coefficients(&vec![0.5, 0.25].into()).unwrap();
        assert_eq!(s.values(), &[-1.0, -0.5]);
        let s = scale_coefficients(&vec![-1.0, 0.3].into()).unwrap();
        assert_eq!(s.values(), &[-1.0, 0.3]);
        let s = scale_coefficients(&vec![0.7, -0.7].into()).unwrap();
        assert_eq!(s.values(), &[-1.0, 1.0]);
        assert!(scale_coefficients(&vec![0.0, 0.0].into()).is_err());
    }

    #[test]
    fn mu_outside_unit_interval_rejected() {
        assert!(EncodingState::new(vec![1.5], 3, 1).is_err());
        assert!(EncodingState::new(vec![0.0], 0, 1).is_err());
        assert!(EncodingState::new(vec![0.0], 3, 0).is_err());
    }
}
