//! Symmetric eigendecomposition by cyclic Jacobi rotations.

use crate::error::{Error, Result};
use crate::linalg::matrix::{Matrix, SymMatrix};

pub const DEFAULT_EIG_TOL: f64 = 1e-14;
pub const MAX_SWEEPS: usize = 100;

/// Orthogonal eigenbasis (columns of `q`) and eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct EigDecomposition {
    q: Matrix,
    lambda: Vec<f64>,
}

impl EigDecomposition {
    pub fn identity(n: usize) -> Self {
        Self { q: Matrix::identity(n), lambda: vec![1.0; n] }
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    pub fn q(&self) -> &Matrix {
        &self.q
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.lambda
    }

    pub fn into_eigenvalues(self) -> Vec<f64> {
        self.lambda
    }

    pub fn max(&self) -> f64 {
        self.lambda[0]
    }

    pub fn min(&self) -> f64 {
        self.lambda[self.lambda.len() - 1]
    }

    /// `Q·diag(λ)·Qᵀ`.
    pub fn reconstruct(&self) -> SymMatrix {
        self.assemble(&self.lambda)
    }

    /// Functional calculus: `Q·diag(h(λᵢ))·Qᵀ`.
    pub fn map(&self, h: impl Fn(f64) -> f64) -> Result<SymMatrix> {
        let values = self.mapped_values(h)?;
        Ok(self.assemble(&values))
    }

    /// Like [`EigDecomposition::map`] for a fallible scalar function.
    pub fn try_map(&self, h: impl Fn(f64) -> Result<f64>) -> Result<SymMatrix> {
        let values = self.lambda.iter().map(|&l| h(l)).collect::<Result<Vec<_>>>()?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain { eigenvalue: self.lambda[i] });
        }
        Ok(self.assemble(&values))
    }

    fn mapped_values(&self, h: impl Fn(f64) -> f64) -> Result<Vec<f64>> {
        self.lambda
            .iter()
            .map(|&l| {
                let v = h(l);
                if v.is_finite() {
                    Ok(v)
                } else {
                    Err(Error::Domain { eigenvalue: l })
                }
            })
            .collect()
    }

    /// Same eigenbasis, spectrum replaced by `h(λ)` and re-sorted.
    pub(crate) fn map_spectrum(&self, h: impl Fn(f64) -> f64) -> Self {
        let values: Vec<f64> = self.lambda.iter().map(|&l| h(l)).collect();
        Self::sorted(self.q.clone(), values)
    }

    fn sorted(q: Matrix, values: Vec<f64>) -> Self {
        let n = values.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let lambda = order.iter().map(|&k| values[k]).collect();
        let q = Matrix::from_fn(n, |i, j| q.get(i, order[j]));
        Self { q, lambda }
    }

    /// Only the upper triangle is accumulated and mirrored, so the result is
    /// exactly symmetric.
    fn assemble(&self, values: &[f64]) -> SymMatrix {
        let n = self.dim();
        let q = &self.q;
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in i..n {
                let mut s = 0.0;
                for (k, v) in values.iter().enumerate() {
                    s += q.get(i, k) * v * q.get(j, k);
                }
                m.set(i, j, s);
                m.set(j, i, s);
            }
        }
        SymMatrix::symmetrize(m)
    }
}

/// Eigendecomposition of a symmetric matrix.
///
/// Cyclic Jacobi with threshold pivoting: during the first three sweeps only
/// pivots above `0.2·off/n²` are rotated. Iteration stops once the
/// off-diagonal Frobenius norm drops to `tol·‖A‖_F`.
pub fn sym_eig(a: &SymMatrix, tol: f64) -> Result<EigDecomposition> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("eigensolver tolerance must be positive, got {tol}")));
    }
    let n = a.dim();
    let mut m = a.as_matrix().as_slice().to_vec();
    let mut v = Matrix::identity(n);
    let target = tol * a.frobenius();

    let off_norm = |m: &[f64]| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                s += m[p * n + q] * m[p * n + q];
            }
        }
        (2.0 * s).sqrt()
    };

    for sweep in 0..=MAX_SWEEPS {
        let off = off_norm(&m);
        if off <= target {
            let lambda = (0..n).map(|i| m[i * n + i]).collect();
            return Ok(EigDecomposition::sorted(v, lambda));
        }
        if sweep == MAX_SWEEPS {
            return Err(Error::EigenNonConvergence { sweeps: MAX_SWEEPS, residual: off });
        }
        let threshold = if sweep < 3 { 0.2 * off / (n * n) as f64 } else { 0.0 };

        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p * n + q];
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let g = 100.0 * apq.abs();
                // Negligible against both diagonal entries: drop it.
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    m[p * n + q] = 0.0;
                    m[q * n + p] = 0.0;
                    continue;
                }
                if apq.abs() <= threshold || apq == 0.0 {
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_infinite() {
                    0.5 / theta
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                m[p * n + p] = app - t * apq;
                m[q * n + q] = aqq + t * apq;
                m[p * n + q] = 0.0;
                m[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = m[r * n + p];
                    let arq = m[r * n + q];
                    let new_rp = c * arp - s * arq;
                    let new_rq = s * arp + c * arq;
                    m[r * n + p] = new_rp;
                    m[p * n + r] = new_rp;
                    m[r * n + q] = new_rq;
                    m[q * n + r] = new_rq;
                }
                for r in 0..n {
                    let vrp = v.get(r, p);
                    let vrq = v.get(r, q);
                    v.set(r, p, c * vrp - s * vrq);
                    v.set(r, q, s * vrp + c * vrq);
                }
            }
        }
    }
    unreachable!("loop returns on the final sweep")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orthogonality_error(q: &Matrix) -> f64 {
        (&q.transpose() * q).max_abs_diff(&Matrix::identity(q.dim()))
    }

    #[test]
    fn identity_input() {
        let e = sym_eig(&SymMatrix::identity(3), DEFAULT_EIG_TOL).unwrap();
        assert_eq!(e.eigenvalues(), &[1.0, 1.0, 1.0]);
        assert_eq!(e.q(), &Matrix::identity(3));
    }

    #[test]
    fn diagonal_input_sorted_with_permutation_basis() {
        let e = sym_eig(&SymMatrix::from_diagonal(&[3.0, 1.0, 2.0]).unwrap(), DEFAULT_EIG_TOL).unwrap();
        assert_eq!(e.eigenvalues(), &[3.0, 2.0, 1.0]);
        for j in 0..3 {
            let ones = (0..3).filter(|&i| e.q().get(i, j).abs() == 1.0).count();
            let zeros = (0..3).filter(|&i| e.q().get(i, j) == 0.0).count();
            assert_eq!((ones, zeros), (1, 2));
        }
    }

    #[test]
    fn two_by_two_characteristic_roots() {
        // det([[2-l,1],[1,2-l]]) = (2-l)^2 - 1 = 0  =>  l = 3, 1
        let a = SymMatrix::from_row_major(2, vec![2.0, 1.0, 1.0, 2.0]).unwrap();
        let e = sym_eig(&a, DEFAULT_EIG_TOL).unwrap();
        assert!((e.eigenvalues()[0] - 3.0).abs() < 1e-14);
        assert!((e.eigenvalues()[1] - 1.0).abs() < 1e-14);
        assert!(orthogonality_error(e.q()) <= 1e-12);
        assert!(e.reconstruct().max_abs_diff(&a) <= 1e-10 * (1.0 + a.max_abs()));
    }

    #[test]
    fn zero_matrix() {
        let e = sym_eig(&SymMatrix::zeros(4), DEFAULT_EIG_TOL).unwrap();
        assert!(e.eigenvalues().iter().all(|&l| l == 0.0));
    }

    #[test]
    fn rejects_bad_tolerance() {
        assert!(sym_eig(&SymMatrix::identity(2), 0.0).is_err());
    }

    #[test]
    fn deterministic() {
        let a = SymMatrix::from_row_major(3, vec![4.0, 1.0, -2.0, 1.0, 0.5, 3.0, -2.0, 3.0, 1.0]).unwrap();
        let e1 = sym_eig(&a, DEFAULT_EIG_TOL).unwrap();
        let e2 = sym_eig(&a, DEFAULT_EIG_TOL).unwrap();
        assert_eq!(e1, e2);
    }

    #[test]
    fn map_reports_domain_errors() {
        let a = SymMatrix::from_diagonal(&[1.0, -1.0]).unwrap();
        let e = sym_eig(&a, DEFAULT_EIG_TOL).unwrap();
        match e.map(f64::ln) {
            Err(Error::Domain { eigenvalue }) => assert_eq!(eigenvalue, -1.0),
            other => panic!("expected domain error, got {other:?}"),
        }
    }
}
