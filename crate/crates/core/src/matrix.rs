//! Dense real symmetric Hamiltonian matrices and a synthetic CI-like generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QaeError, Result};

/// Largest tolerated `|H[i][j] - H[j][i]|` before input is rejected.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Dense real symmetric matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    /// Validates `data` (row-major, `dim * dim` entries) and repairs asymmetry up to
    /// [`SYMMETRY_TOLERANCE`] by averaging mirrored entries.
    pub fn new(dim: usize, mut data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(QaeError::Validation("matrix dimension must be at least 1".into()));
        }
        if data.len() != dim * dim {
            return Err(QaeError::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(QaeError::Validation(format!(
                "non-finite entry at ({}, {})",
                pos / dim,
                pos % dim
            )));
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                let (a, b) = (data[i * dim + j], data[j * dim + i]);
                let asym = (a - b).abs();
                if asym > SYMMETRY_TOLERANCE {
                    return Err(QaeError::Validation(format!(
                        "asymmetry {asym:e} between ({i}, {j}) and ({j}, {i})"
                    )));
                }
                let avg = 0.5 * (a + b);
                data[i * dim + j] = avg;
                data[j * dim + i] = avg;
            }
        }
        Ok(SymmetricMatrix { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != dim) {
            return Err(QaeError::Validation(format!(
                "row {bad} has {} entries, expected {dim}",
                rows[bad].len()
            )));
        }
        Self::new(dim, rows.concat())
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let dim = values.len();
        let mut data = vec![0.0; dim * dim];
        for (i, v) in values.iter().enumerate() {
            data[i * dim + i] = *v;
        }
        Self::new(dim, data)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::diagonal(&vec![1.0; dim])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Infinity norm (maximum absolute row sum).
    pub fn norm_inf(&self) -> f64 {
        (0..self.dim)
            .map(|i| self.row(i).iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.dim)
            .map(|i| self.row(i).iter().zip(v).map(|(h, x)| h * x).sum())
            .collect()
    }

    /// `H + shift * I`.
    pub fn shifted(&self, shift: f64) -> SymmetricMatrix {
        let mut out = self.clone();
        for i in 0..self.dim {
            out.data[i * self.dim + i] += shift;
        }
        out
    }

    /// Symmetric permutation `P H Pᵀ` where row `i` of the result is row `perm[i]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Result<SymmetricMatrix> {
        crate::error::check_len(self.dim, perm.len())?;
        let mut seen = vec![false; self.dim];
        for &p in perm {
            if p >= self.dim || std::mem::replace(&mut seen[p], true) {
                return Err(QaeError::Parameter("not a permutation".into()));
            }
        }
        let n = self.dim;
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = self.get(perm[i], perm[j]);
            }
        }
        Ok(SymmetricMatrix { dim: n, data })
    }

    /// Principal submatrix on `indices`, in the given order.
    pub fn submatrix(&self, indices: &[usize]) -> Result<SymmetricMatrix> {
        if indices.is_empty() {
            return Err(QaeError::Parameter("empty index set".into()));
        }
        let mut seen = vec![false; self.dim];
        for &p in indices {
            if p >= self.dim || std::mem::replace(&mut seen[p], true) {
                return Err(QaeError::Parameter(format!("bad or repeated index {p}")));
            }
        }
        let n = indices.len();
        let mut data = Vec::with_capacity(n * n);
        for &i in indices {
            data.extend(indices.iter().map(|&j| self.get(i, j)));
        }
        Ok(SymmetricMatrix { dim: n, data })
    }
}

/// Builds a matrix with the structure of a small CI problem: a dominant reference
/// configuration at index 0, strictly increasing diagonal energies spaced by at least
/// `gap`, and off-diagonal couplings bounded by `coupling_scale` that decay away from
/// the reference.
///
/// The output is a pure function of the arguments.
pub fn generate_ci_like_matrix(
    dim: usize,
    gap: f64,
    coupling_scale: f64,
    seed: u64,
) -> Result<SymmetricMatrix> {
    if dim < 2 {
        return Err(QaeError::Parameter("dim must be at least 2".into()));
    }
    if !(gap > 0.0 && gap.is_finite()) {
        return Err(QaeError::Parameter("gap must be positive".into()));
    }
    if !(coupling_scale >= 0.0) || coupling_scale >= 0.5 * gap {
        return Err(QaeError::Parameter(format!(
            "coupling_scale {coupling_scale} must be non-negative and below gap/2 = {}",
            0.5 * gap
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = vec![0.0; dim * dim];

    let mut energy = 0.0;
    for i in 0..dim {
        if i > 0 {
            energy += gap * (1.0 + 0.5 * rng.gen::<f64>());
        }
        data[i * dim + i] = energy;
    }
    for i in 0..dim {
        for j in (i + 1)..dim {
            let decay = 1.0 / (1.0 + 0.5 * i as f64);
            let v = coupling_scale * decay * rng.gen_range(-1.0..=1.0);
            data[i * dim + j] = v;
            data[j * dim + i] = v;
        }
    }
    SymmetricMatrix::new(dim, data)
}
