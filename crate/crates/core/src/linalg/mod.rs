//! Dense real symmetric linear algebra.
//!
//! Every matrix function goes through the eigendecomposition: for symmetric
//! `A = Q·diag(λ)·Qᵀ` we set `h(A) = Q·diag(h(λ))·Qᵀ`. The geometry of the
//! SPD cone enters through congruences `CᵀAC` and the trace metric
//! `⟨U, V⟩_X = Tr X⁻¹UX⁻¹V`.

mod eig;
mod matrix;

pub use eig::{sym_eig, EigDecomposition, DEFAULT_EIG_TOL, MAX_SWEEPS};
pub use matrix::{Lu, Matrix, SpdMatrix, SymMatrix, SINGULAR_FLOOR, SPD_FLOOR};

use crate::error::{Error, Result};

/// Default cap on matrix dimension for problem ingestion.
pub const DEFAULT_MAX_DIM: usize = 64;

/// `h(A)` by functional calculus on the stored eigenbasis of `a`.
pub fn apply_fun(a: &SpdMatrix, h: impl Fn(f64) -> f64) -> Result<SymMatrix> {
    a.eig().map(h)
}

/// `h(A)` for an arbitrary symmetric matrix.
pub fn apply_fun_sym(a: &SymMatrix, h: impl Fn(f64) -> f64) -> Result<SymMatrix> {
    a.eig()?.map(h)
}

/// `(A^{1/2}, A^{-1/2})`, both sharing the eigenbasis of `a`.
pub fn sqrt_and_invsqrt(a: &SpdMatrix) -> Result<(SpdMatrix, SpdMatrix)> {
    let sqrt = SpdMatrix::from_spectral(a.eig().map_spectrum(f64::sqrt))?;
    let inv_sqrt = SpdMatrix::from_spectral(a.eig().map_spectrum(|l| 1.0 / l.sqrt()))?;
    Ok((sqrt, inv_sqrt))
}

/// `CᵀAC`, symmetrized.
pub fn congruence(c: &Matrix, a: &SymMatrix) -> Result<SymMatrix> {
    if c.dim() != a.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: c.dim() });
    }
    let lu = c.lu();
    if lu.is_singular() {
        return Err(Error::Singular { pivot: lu.min_pivot() });
    }
    let prod = &(&c.transpose() * a.as_matrix()) * c;
    SymMatrix::from_matrix(prod)
}

/// Congruence of an SPD matrix; the result is re-checked against the SPD floor.
pub fn congruence_spd(c: &Matrix, a: &SpdMatrix) -> Result<SpdMatrix> {
    SpdMatrix::new(congruence(c, a.as_sym())?)
}

/// `X^{1/2}·M·X^{1/2}`-style sandwich `S·M·S` for symmetric `S`, symmetrized.
pub(crate) fn sandwich(s: &SymMatrix, m: &SymMatrix) -> SymMatrix {
    let prod = &(s * m) * s.as_matrix();
    SymMatrix::symmetrize(prod)
}

/// `QᵀMQ`.
pub(crate) fn to_basis(q: &Matrix, m: &SymMatrix) -> SymMatrix {
    SymMatrix::symmetrize(&(&q.transpose() * m.as_matrix()) * q)
}

/// `QMQᵀ`.
pub(crate) fn from_basis(q: &Matrix, m: &SymMatrix) -> SymMatrix {
    SymMatrix::symmetrize(&(q * m.as_matrix()) * &q.transpose())
}

/// `diag(s)·M·diag(s)`.
pub(crate) fn diag_scale(m: &SymMatrix, s: &[f64]) -> SymMatrix {
    let m = m.as_matrix();
    SymMatrix::symmetrize(Matrix::from_fn(s.len(), |i, j| s[i] * m.get(i, j) * s[j]))
}

/// `Λ^{-1/2}·QᵀAQ·Λ^{-1/2}` for `X = QΛQᵀ`, which is `Qᵀ·X^{-1/2}AX^{-1/2}·Q`.
///
/// Whitening by a diagonal scaling in the eigenbasis of `X` only perturbs
/// entries relatively, so the small eigenvalues survive an ill-conditioned `X`
/// far better than with an explicit product by `X^{-1/2}`.
pub(crate) fn whiten_in_basis(x: &EigDecomposition, a: &SymMatrix) -> SymMatrix {
    let inv_sqrt: Vec<f64> = x.eigenvalues().iter().map(|l| 1.0 / l.sqrt()).collect();
    diag_scale(&to_basis(x.q(), a), &inv_sqrt)
}

/// Inverse of [`whiten_in_basis`]: `Q·Λ^{1/2}MΛ^{1/2}·Qᵀ`.
pub(crate) fn unwhiten_from_basis(x: &EigDecomposition, m: &SymMatrix) -> SymMatrix {
    let sqrt: Vec<f64> = x.eigenvalues().iter().map(|l| l.sqrt()).collect();
    from_basis(x.q(), &diag_scale(m, &sqrt))
}

/// Trace metric `Tr X⁻¹UX⁻¹V` of the SPD manifold at `x`.
pub fn trace_inner(x: &SpdMatrix, u: &SymMatrix, v: &SymMatrix) -> f64 {
    assert_eq!(x.dim(), u.dim(), "dimension mismatch");
    assert_eq!(x.dim(), v.dim(), "dimension mismatch");
    let x_inv = x.inverse();
    let left = x_inv.as_sym() * u;
    let right = x_inv.as_sym() * v;
    left.trace_product(&right)
}

/// Norm induced by [`trace_inner`].
pub fn metric_norm(x: &SpdMatrix, u: &SymMatrix) -> f64 {
    trace_inner(x, u, u).max(0.0).sqrt()
}
