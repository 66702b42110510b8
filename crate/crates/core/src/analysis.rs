//! Post-run arithmetic: splittings, relative errors, run statistics and the classical
//! λ scan.

use crate::eigen::exact_diagonalize;
use crate::encoding::CoefficientVector;
use crate::error::{QaeError, Result};
use crate::matrix::SymmetricMatrix;
use crate::workflow::rayleigh_quotient;

/// Splitting between two levels, `upper − lower`.
pub fn fine_structure_splitting(lower: f64, upper: f64) -> f64 {
    upper - lower
}

/// `(reference − value) / reference × 100`.
pub fn delta_percent(reference: f64, value: f64) -> Result<f64> {
    if reference == 0.0 {
        return Err(QaeError::Numerical("relative error against a zero reference".into()));
    }
    Ok((reference - value) / reference * 100.0)
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(QaeError::Parameter("no values".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Ok((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, var.sqrt()))
}

pub fn median(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(QaeError::Parameter("no values".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    Ok(if v.len() % 2 == 1 { v[m] } else { 0.5 * (v[m - 1] + v[m]) })
}

/// One point of a λ scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanPoint {
    pub lambda: f64,
    /// Rayleigh quotient of the functional's stationary point at this λ.
    pub energy: f64,
    /// Whether the stationary point is a true minimum (λ below the spectrum of the
    /// block that excludes the reference configuration).
    pub bounded: bool,
}

/// For each λ on an evenly spaced grid, minimizes `aᵀ(H − λ)a` with `a_0 = −1` held
/// fixed, solving the remaining block exactly, and reports the Rayleigh quotient of the
/// minimizer. The curve touches the lowest eigenvalue at λ = E_0.
pub fn lambda_scan(
    h: &SymmetricMatrix,
    lambda_min: f64,
    lambda_max: f64,
    steps: usize,
) -> Result<Vec<ScanPoint>> {
    if steps == 0 {
        return Err(QaeError::Parameter("steps must be positive".into()));
    }
    if !(lambda_min.is_finite() && lambda_max.is_finite() && lambda_min <= lambda_max) {
        return Err(QaeError::Parameter(format!(
            "bad λ range [{lambda_min}, {lambda_max}]"
        )));
    }
    let n = h.dim();
    let rest: Vec<usize> = (1..n).collect();
    let eig = if n > 1 {
        Some(exact_diagonalize(&h.submatrix(&rest)?)?)
    } else {
        None
    };
    let coupling: Vec<f64> = rest.iter().map(|&b| h.get(b, 0)).collect();

    let mut out = Vec::with_capacity(steps);
    for s in 0..steps {
        let lambda = if steps == 1 {
            lambda_min
        } else {
            lambda_min + (lambda_max - lambda_min) * s as f64 / (steps - 1) as f64
        };
        let mut a = vec![0.0; n];
        a[0] = -1.0;
        let mut bounded = true;
        if let Some(eig) = &eig {
            bounded = lambda < eig.lowest();
            // x = (H_rr − λ)⁻¹ H_r0 · (−a_0) in the eigenbasis of H_rr
            for (e, v) in eig.eigenvalues().iter().zip(eig.eigenvectors()) {
                let gap = e - lambda;
                if gap.abs() < 1e-14 {
                    return Err(QaeError::Numerical(format!(
                        "λ = {lambda} hits an eigenvalue of the excited block"
                    )));
                }
                let proj: f64 = v.iter().zip(&coupling).map(|(x, c)| x * c).sum::<f64>() / gap;
                for (i, x) in v.iter().enumerate() {
                    a[i + 1] += proj * x;
                }
            }
        }
        let energy = rayleigh_quotient(h, &CoefficientVector::new(a))?;
        out.push(ScanPoint {
            lambda,
            energy,
            bounded,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn splitting_and_delta() {
        assert!((fine_structure_splitting(-507.679395, -507.515951) - 0.163444).abs() < 1e-9);
        assert_eq!(delta_percent(-2.0, -1.0).unwrap(), 50.0);
        assert!(delta_percent(0.0, 1.0).is_err());
    }

    #[test]
    fn stats() {
        assert_eq!(mean_std(&[2.0]).unwrap(), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-15);
        assert_eq!(median(&[3.0, 1.0, 2.0]).unwrap(), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]).unwrap(), 2.5);
    }

    #[test]
    fn scan_of_scalar_is_flat() {
        let h = SymmetricMatrix::from_rows(&[vec![-3.25]]).unwrap();
        let pts = lambda_scan(&h, -5.0, 0.0, 7).unwrap();
        assert_eq!(pts.len(), 7);
        assert!(pts.iter().all(|p| p.energy == -3.25));
    }

    #[test]
    fn scan_touches_ground_state() {
        let h = crate::matrix::generate_ci_like_matrix(6, 1.0, 0.3, 3).unwrap();
        let e0 = exact_diagonalize(&h).unwrap().lowest();
        let pt = lambda_scan(&h, e0, e0, 1).unwrap();
        assert!((pt[0].energy - e0).abs() < 1e-12);
        assert!(pt[0].bounded);
    }
}
