use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};
use crate::linalg::eig::{sym_eig, EigDecomposition, DEFAULT_EIG_TOL};

/// Minimum eigenvalue accepted for an SPD matrix, relative to the largest.
pub const SPD_FLOOR: f64 = 1e-12;

/// Pivot floor, relative to the largest entry, below which a matrix is singular.
pub const SINGULAR_FLOOR: f64 = 1e-12;

/// Dense square matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    /// Builds an `n x n` matrix from `n * n` row-major values.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidMatrix("dimension must be positive".into()));
        }
        if data.len() != n * n {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for a {n}x{n} matrix, found {}",
                n * n,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix(format!("entry ({}, {}) is not finite", pos / n, pos % n)));
        }
        Ok(Self { n, data })
    }

    pub fn from_diagonal(values: &[f64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n);
        for (i, &v) in values.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self.get(j, i))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Matrix) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += self.data[i * n + j] * other.data[j * n + i];
            }
        }
        acc
    }

    /// Max-norm distance to another matrix of the same size.
    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        assert_eq!(self.n, other.n, "dimension mismatch");
        self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let other_row = &other.data[k * n..(k + 1) * n];
                for (o, b) in row.iter_mut().zip(other_row) {
                    *o += a * b;
                }
            }
        }
        Matrix { n, data: out }
    }

    /// LU factorization with partial pivoting.
    pub fn lu(&self) -> Lu {
        let n = self.n;
        let mut lu = self.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let (p, pmax) =
                (k..n)
                    .map(|i| (i, lu[i * n + k].abs()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            min_pivot = min_pivot.min(pmax);
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[k * n + k];
            if pivot == 0.0 {
                continue;
            }
            for i in k + 1..n {
                let factor = lu[i * n + k] / pivot;
                lu[i * n + k] = factor;
                for j in k + 1..n {
                    lu[i * n + j] -= factor * lu[k * n + j];
                }
            }
        }
        Lu { n, lu, perm, sign, min_pivot, scale: self.max_abs() }
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.lu().inverse()
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Matrix").field("n", &self.n).field("rows", &self.to_rows()).finish()
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Matrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        Matrix { n: self.n, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }
}

/// Result of [`Matrix::lu`].
#[derive(Debug, Clone)]
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    sign: f64,
    min_pivot: f64,
    scale: f64,
}

impl Lu {
    pub fn det(&self) -> f64 {
        (0..self.n).fold(self.sign, |d, i| d * self.lu[i * self.n + i])
    }

    pub fn min_pivot(&self) -> f64 {
        self.min_pivot
    }

    pub fn is_singular(&self) -> bool {
        !(self.min_pivot > SINGULAR_FLOOR * self.scale)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        if self.is_singular() {
            return Err(Error::Singular { pivot: self.min_pivot });
        }
        let n = self.n;
        let mut inv = Matrix::zeros(n);
        let mut col = vec![0.0; n];
        for j in 0..n {
            for (i, c) in col.iter_mut().enumerate() {
                *c = if self.perm[i] == j { 1.0 } else { 0.0 };
            }
            for i in 0..n {
                let mut s = col[i];
                for k in 0..i {
                    s -= self.lu[i * n + k] * col[k];
                }
                col[i] = s;
            }
            for i in (0..n).rev() {
                let mut s = col[i];
                for k in i + 1..n {
                    s -= self.lu[i * n + k] * col[k];
                }
                col[i] = s / self.lu[i * n + i];
            }
            for i in 0..n {
                inv.set(i, j, col[i]);
            }
        }
        Ok(inv)
    }
}

/// Real symmetric matrix. Entries are exactly symmetric and finite.
#[derive(Clone, PartialEq)]
pub struct SymMatrix(Matrix);

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self(Matrix::zeros(n))
    }

    pub fn identity(n: usize) -> Self {
        Self(Matrix::identity(n))
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        Self::from_matrix(Matrix::from_diagonal(values))
    }

    /// Builds from row-major data, replacing each off-diagonal pair by its average.
    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        Self::from_matrix(Matrix::from_row_major(n, data)?)
    }

    /// Symmetrizes `(M + Mᵀ)/2`.
    pub fn from_matrix(m: Matrix) -> Result<Self> {
        if m.n == 0 {
            return Err(Error::InvalidMatrix("dimension must be positive".into()));
        }
        if m.data.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix("non-finite entry".into()));
        }
        Ok(Self::symmetrize(m))
    }

    pub(crate) fn symmetrize(mut m: Matrix) -> Self {
        let n = m.n;
        for i in 0..n {
            for j in i + 1..n {
                let avg = 0.5 * (m.data[i * n + j] + m.data[j * n + i]);
                m.data[i * n + j] = avg;
                m.data[j * n + i] = avg;
            }
        }
        Self(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.0.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }

    pub fn as_matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn to_row_major(&self) -> Vec<f64> {
        self.0.data.clone()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.0.to_rows()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    pub fn frobenius(&self) -> f64 {
        self.0.frobenius()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }

    pub fn max_abs_diff(&self, other: &SymMatrix) -> f64 {
        self.0.max_abs_diff(&other.0)
    }

    /// Relative Frobenius distance `‖self − other‖_F / max(‖other‖_F, tiny)`.
    pub fn rel_diff(&self, other: &SymMatrix) -> f64 {
        (&self.0 - &other.0).frobenius() / other.frobenius().max(f64::MIN_POSITIVE)
    }

    pub fn eig(&self) -> Result<EigDecomposition> {
        sym_eig(self, DEFAULT_EIG_TOL)
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(self.eig()?.into_eigenvalues())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eig()?.min())
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("SymMatrix").field(&self.0.to_rows()).finish()
    }
}

impl Add for &SymMatrix {
    type Output = SymMatrix;
    fn add(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &SymMatrix {
    type Output = SymMatrix;
    fn sub(self, rhs: &SymMatrix) -> SymMatrix {
        SymMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &SymMatrix {
    type Output = Matrix;
    fn mul(self, rhs: &SymMatrix) -> Matrix {
        self.0.matmul(&rhs.0)
    }
}

/// Symmetric positive-definite matrix together with its eigendecomposition.
#[derive(Clone)]
pub struct SpdMatrix {
    sym: SymMatrix,
    eig: EigDecomposition,
}

impl SpdMatrix {
    /// Rejects matrices whose smallest eigenvalue is at or below
    /// [`SPD_FLOOR`] times the largest.
    pub fn new(sym: SymMatrix) -> Result<Self> {
        let eig = sym.eig()?;
        Self::check_floor(&eig)?;
        Ok(Self { sym, eig })
    }

    pub fn from_row_major(n: usize, data: Vec<f64>) -> Result<Self> {
        Self::new(SymMatrix::from_row_major(n, data)?)
    }

    pub fn from_diagonal(values: &[f64]) -> Result<Self> {
        Self::new(SymMatrix::from_diagonal(values)?)
    }

    pub fn identity(n: usize) -> Self {
        Self { sym: SymMatrix::identity(n), eig: EigDecomposition::identity(n) }
    }

    /// Builds `Q·diag(λ)·Qᵀ` keeping the supplied spectral data.
    pub(crate) fn from_spectral(eig: EigDecomposition) -> Result<Self> {
        Self::check_floor(&eig)?;
        let sym = eig.reconstruct();
        Ok(Self { sym, eig })
    }

    fn check_floor(eig: &EigDecomposition) -> Result<()> {
        let (min, max) = (eig.min(), eig.max());
        if !(max > 0.0) || !(min > SPD_FLOOR * max) {
            return Err(Error::Conditioning { min, max });
        }
        Ok(())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.sym.dim()
    }

    pub fn as_sym(&self) -> &SymMatrix {
        &self.sym
    }

    pub fn as_matrix(&self) -> &Matrix {
        self.sym.as_matrix()
    }

    pub fn into_sym(self) -> SymMatrix {
        self.sym
    }

    pub fn eig(&self) -> &EigDecomposition {
        &self.eig
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eig.min()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eig.max()
    }

    pub fn frobenius(&self) -> f64 {
        self.sym.frobenius()
    }

    pub fn rel_diff(&self, other: &SpdMatrix) -> f64 {
        self.sym.rel_diff(&other.sym)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.sym.to_rows()
    }

    /// `X⁻¹` sharing this eigenbasis.
    pub fn inverse(&self) -> SpdMatrix {
        Self::from_spectral(self.eig.map_spectrum(|l| 1.0 / l)).expect("inverse of an SPD matrix is SPD")
    }
}

impl fmt::Debug for SpdMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("SpdMatrix").field(&self.sym.to_rows()).finish()
    }
}

impl PartialEq for SpdMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.sym == other.sym
    }
}

impl TryFrom<SymMatrix> for SpdMatrix {
    type Error = Error;
    fn try_from(sym: SymMatrix) -> Result<Self> {
        Self::new(sym)
    }
}
