//! Exact diagonalization by cyclic Jacobi rotations; the reference the annealing
//! workflow is checked against.

use crate::error::{QaeError, Result};
use crate::matrix::SymmetricMatrix;

/// Largest matrix accepted by [`exact_diagonalize`].
pub const MAX_JACOBI_DIM: usize = 64;
const MAX_SWEEPS: usize = 100;

/// Ascending eigenvalues with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenResult {
    eigenvalues: Vec<f64>,
    /// `vectors[k]` is the eigenvector of `eigenvalues[k]`.
    vectors: Vec<Vec<f64>>,
}

impl EigenResult {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvector(&self, k: usize) -> &[f64] {
        &self.vectors[k]
    }

    pub fn eigenvectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    pub fn lowest(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn ground_state(&self) -> &[f64] {
        &self.vectors[0]
    }

    /// `max_k ‖H v_k − e_k v_k‖∞`.
    pub fn max_residual(&self, h: &SymmetricMatrix) -> f64 {
        self.eigenvalues
            .iter()
            .zip(&self.vectors)
            .map(|(e, v)| {
                h.mul_vec(v)
                    .iter()
                    .zip(v)
                    .map(|(hv, x)| (hv - e * x).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// `max_{j,k} |v_j · v_k − δ_jk|`.
    pub fn max_orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (j, a) in self.vectors.iter().enumerate() {
            for (k, b) in self.vectors.iter().enumerate().skip(j) {
                let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                let target = if j == k { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

pub fn exact_diagonalize(h: &SymmetricMatrix) -> Result<EigenResult> {
    let n = h.dim();
    if n > MAX_JACOBI_DIM {
        return Err(QaeError::Parameter(format!(
            "Jacobi diagonalization limited to {MAX_JACOBI_DIM}x{MAX_JACOBI_DIM}, got {n}"
        )));
    }
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| h.row(i).to_vec()).collect();
    // columns of v accumulate the rotations
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    let scale = h.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut converged = n < 2 || scale == 0.0;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|p| ((p + 1)..n).map(move |q| (p, q)))
            .map(|(p, q)| a[p][q] * a[p][q])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-17 * scale {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a[p][q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (upper, lower) = a.split_at_mut(q);
                for (apk, aqk) in upper[p].iter_mut().zip(lower[0].iter_mut()) {
                    let (x, y) = (*apk, *aqk);
                    *apk = c * x - s * y;
                    *aqk = s * x + c * y;
                }
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    if !converged {
        return Err(QaeError::Numerical(format!(
            "Jacobi rotations did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[x][x].total_cmp(&a[y][y]).then(x.cmp(&y)));
    let eigenvalues = order.iter().map(|&k| a[k][k]).collect();
    let vectors = order
        .iter()
        .map(|&k| (0..n).map(|i| v[i][k]).collect())
        .collect();
    Ok(EigenResult {
        eigenvalues,
        vectors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let h = SymmetricMatrix::from_rows(&[vec![3.0, 0.5], vec![0.5, 3.0]]).unwrap();
        let r = exact_diagonalize(&h).unwrap();
        assert!((r.eigenvalues()[0] - 2.5).abs() < 1e-14);
        assert!((r.eigenvalues()[1] - 3.5).abs() < 1e-14);
    }

    #[test]
    fn identity() {
        let r = exact_diagonalize(&SymmetricMatrix::identity(5).unwrap()).unwrap();
        assert!(r.eigenvalues().iter().all(|e| *e == 1.0));
        assert_eq!(r.max_orthonormality_error(), 0.0);
    }

    #[test]
    fn one_by_one() {
        let h = SymmetricMatrix::from_rows(&[vec![-2.5]]).unwrap();
        assert_eq!(exact_diagonalize(&h).unwrap().lowest(), -2.5);
    }

    #[test]
    fn rejects_oversized() {
        assert!(exact_diagonalize(&SymmetricMatrix::identity(65).unwrap()).is_err());
    }
}
