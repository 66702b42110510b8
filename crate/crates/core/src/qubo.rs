//! Quadratic unconstrained binary optimization models.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use crate::error::{check_len, QaeError, Result};

/// A binary assignment; every entry is 0 or 1.
pub type Assignment = Vec<u8>;

/// `offset + Σ linear[i]·q_i + Σ_{i<j} quadratic[(i, j)]·q_i·q_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboModel {
    linear: Vec<f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
    offset: f64,
}

impl QuboModel {
    pub fn new(num_vars: usize) -> Self {
        QuboModel {
            linear: vec![0.0; num_vars],
            quadratic: BTreeMap::new(),
            offset: 0.0,
        }
    }

    pub fn from_parts(
        linear: Vec<f64>,
        quadratic: impl IntoIterator<Item = ((usize, usize), f64)>,
        offset: f64,
    ) -> Result<Self> {
        let mut model = QuboModel {
            linear,
            quadratic: BTreeMap::new(),
            offset,
        };
        for ((i, j), w) in quadratic {
            if i >= model.num_vars() || j >= model.num_vars() {
                return Err(QaeError::Parameter(format!(
                    "coupling ({i}, {j}) outside {} variables",
                    model.num_vars()
                )));
            }
            model.add_quadratic(i, j, w);
        }
        Ok(model)
    }

    #[inline]
    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Couplings keyed by `(i, j)` with `i < j`.
    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.quadratic.get(&key).copied().unwrap_or(0.0)
    }

    pub fn add_linear(&mut self, i: usize, bias: f64) {
        self.linear[i] += bias;
    }

    pub fn add_offset(&mut self, value: f64) {
        self.offset += value;
    }

    /// Adds a coupling; a self-pair folds into the linear bias since `q² = q`.
    pub fn add_quadratic(&mut self, i: usize, j: usize, w: f64) {
        if i == j {
            self.linear[i] += w;
            return;
        }
        let key = if i < j { (i, j) } else { (j, i) };
        *self.quadratic.entry(key).or_insert(0.0) += w;
    }

    /// Drops couplings that are exactly zero.
    pub fn prune_zeros(&mut self) {
        self.quadratic.retain(|_, w| *w != 0.0);
    }

    pub fn energy(&self, assignment: &[u8]) -> Result<f64> {
        check_len(self.num_vars(), assignment.len())?;
        Ok(self.energy_unchecked(assignment))
    }

    pub(crate) fn energy_unchecked(&self, q: &[u8]) -> f64 {
        let lin: f64 = self
            .linear
            .iter()
            .zip(q)
            .filter(|(_, &b)| b != 0)
            .map(|(h, _)| h)
            .sum();
        let quad: f64 = self
            .quadratic
            .iter()
            .filter(|((i, j), _)| q[*i] != 0 && q[*j] != 0)
            .map(|(_, w)| w)
            .sum();
        self.offset + lin + quad
    }

    /// Energy change caused by flipping variable `i` in `q`.
    pub fn flip_delta(&self, q: &[u8], i: usize) -> f64 {
        let mut field = self.linear[i];
        for (&(a, b), &w) in &self.quadratic {
            if (a == i && q[b] != 0) || (b == i && q[a] != 0) {
                field += w;
            }
        }
        if q[i] == 0 {
            field
        } else {
            -field
        }
    }

    /// Largest absolute linear or quadratic bias.
    pub fn max_abs_bias(&self) -> f64 {
        self.linear
            .iter()
            .chain(self.quadratic.values())
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Model over `vars` (in the given order) with every other variable fixed to `fixed[v]`.
    pub fn restrict(&self, vars: &[usize], fixed: &[u8]) -> Result<QuboModel> {
        check_len(self.num_vars(), fixed.len())?;
        let mut local = vec![usize::MAX; self.num_vars()];
        for (k, &v) in vars.iter().enumerate() {
            if v >= self.num_vars() || local[v] != usize::MAX {
                return Err(QaeError::Parameter(format!("bad or repeated variable {v}")));
            }
            local[v] = k;
        }
        let mut sub = QuboModel::new(vars.len());
        sub.offset = self.offset;
        for (v, &h) in self.linear.iter().enumerate() {
            match local[v] {
                usize::MAX if fixed[v] != 0 => sub.offset += h,
                usize::MAX => {}
                k => sub.linear[k] += h,
            }
        }
        for (&(i, j), &w) in &self.quadratic {
            match (local[i], local[j]) {
                (usize::MAX, usize::MAX) => {
                    if fixed[i] != 0 && fixed[j] != 0 {
                        sub.offset += w;
                    }
                }
                (usize::MAX, k) => {
                    if fixed[i] != 0 {
                        sub.linear[k] += w;
                    }
                }
                (k, usize::MAX) => {
                    if fixed[j] != 0 {
                        sub.linear[k] += w;
                    }
                }
                (a, b) => sub.add_quadratic(a, b, w),
            }
        }
        Ok(sub)
    }

    /// Plain-text dump: one `var i bias` line per variable, one `pair i j coupling` line
    /// per coupling, then `offset value`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, h) in self.linear.iter().enumerate() {
            let _ = writeln!(out, "var {i} {h:e}");
        }
        for (&(i, j), w) in &self.quadratic {
            let _ = writeln!(out, "pair {i} {j} {w:e}");
        }
        let _ = writeln!(out, "offset {:e}", self.offset);
        out
    }
}

impl fmt::Display for QuboModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}

/// Evaluates `model` at `assignment`.
pub fn qubo_energy(model: &QuboModel, assignment: &[u8]) -> Result<f64> {
    model.energy(assignment)
}

/// Compressed adjacency for samplers that touch neighbours in inner loops.
#[derive(Debug, Clone)]
pub(crate) struct Adjacency {
    start: Vec<usize>,
    neighbor: Vec<usize>,
    weight: Vec<f64>,
}

impl Adjacency {
    pub(crate) fn new(model: &QuboModel) -> Self {
        let n = model.num_vars();
        let mut degree = vec![0usize; n];
        for &(i, j) in model.quadratic.keys() {
            degree[i] += 1;
            degree[j] += 1;
        }
        let mut start = vec![0usize; n + 1];
        for i in 0..n {
            start[i + 1] = start[i] + degree[i];
        }
        let mut fill = start.clone();
        let total = start[n];
        let mut neighbor = vec![0usize; total];
        let mut weight = vec![0.0; total];
        for (&(i, j), &w) in &model.quadratic {
            neighbor[fill[i]] = j;
            weight[fill[i]] = w;
            fill[i] += 1;
            neighbor[fill[j]] = i;
            weight[fill[j]] = w;
            fill[j] += 1;
        }
        Adjacency {
            start,
            neighbor,
            weight,
        }
    }

    #[inline]
    pub(crate) fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let r = self.start[i]..self.start[i + 1];
        (&self.neighbor[r.clone()], &self.weight[r])
    }

    #[inline]
    pub(crate) fn of(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.start[i]..self.start[i + 1];
        self.neighbor[r.clone()]
            .iter()
            .copied()
            .zip(self.weight[r].iter().copied())
    }

    /// Local fields `h_i + Σ_j w_ij q_j` for every variable.
    pub(crate) fn fields(&self, linear: &[f64], q: &[u8]) -> Vec<f64> {
        (0..linear.len())
            .map(|i| {
                linear[i]
                    + self
                        .of(i)
                        .filter(|(j, _)| q[*j] != 0)
                        .map(|(_, w)| w)
                        .sum::<f64>()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_assignment_gives_offset() {
        let m = QuboModel::from_parts(vec![1.0, -2.0], [((0, 1), 3.0)], 0.25).unwrap();
        assert_eq!(m.energy(&[0, 0]).unwrap(), 0.25);
        assert_eq!(m.energy(&[1, 1]).unwrap(), 0.25 + 1.0 - 2.0 + 3.0);
    }

    #[test]
    fn single_variable() {
        let m = QuboModel::from_parts(vec![-1.0], [], 0.0).unwrap();
        assert_eq!(qubo_energy(&m, &[1]).unwrap(), -1.0);
    }

    #[test]
    fn length_mismatch() {
        let m = QuboModel::new(3);
        assert!(matches!(
            m.energy(&[0, 1]),
            Err(QaeError::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn self_pair_folds_into_linear() {
        let mut m = QuboModel::new(2);
        m.add_quadratic(1, 1, 2.5);
        assert!(m.quadratic().is_empty());
        assert_eq!(m.linear(), &[0.0, 2.5]);
    }

    #[test]
    fn random_six_variable_matches_term_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let lin: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut pairs = Vec::new();
        for i in 0..6 {
            for j in (i + 1)..6 {
                pairs.push(((i, j), rng.gen_range(-1.0..1.0)));
            }
        }
        let m = QuboModel::from_parts(lin.clone(), pairs.clone(), 0.5).unwrap();
        for mask in 0u32..64 {
            let q: Vec<u8> = (0..6).map(|i| ((mask >> i) & 1) as u8).collect();
            let mut expect = 0.5;
            for i in 0..6 {
                expect += lin[i] * q[i] as f64;
            }
            for ((i, j), w) in &pairs {
                expect += w * (q[*i] * q[*j]) as f64;
            }
            assert!((m.energy(&q).unwrap() - expect).abs() < 1e-12);
            for i in 0..6 {
                let mut f = q.clone();
                f[i] ^= 1;
                let d = m.energy(&f).unwrap() - m.energy(&q).unwrap();
                assert!((m.flip_delta(&q, i) - d).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn restrict_matches_full_energy() {
        let m = QuboModel::from_parts(
            vec![1.0, -2.0, 0.5, 0.3],
            [((0, 1), 3.0), ((1, 2), -1.0), ((0, 3), 0.7), ((2, 3), 2.0)],
            0.1,
        )
        .unwrap();
        let fixed = vec![0, 1, 0, 1];
        let sub = m.restrict(&[2, 0], &fixed).unwrap();
        for a in 0..2u8 {
            for b in 0..2u8 {
                let full = vec![b, 1, a, 1];
                assert!((sub.energy(&[a, b]).unwrap() - m.energy(&full).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dump_lists_all_terms() {
        let m = QuboModel::from_parts(vec![1.0, 2.0], [((0, 1), -3.0)], 0.0).unwrap();
        let d = m.dump();
        assert_eq!(d.lines().count(), 4);
        assert!(d.contains("pair 0 1 -3e0"));
    }
}
