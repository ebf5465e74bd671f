//! Weighted multivariate operator means of symmetric positive-definite matrices.
//!
//! A strictly decreasing generating function `g` with `g(1) = 0` defines the
//! mean `X_g(ω; A₁,…,A_k)` as the unique minimizer of the geodesically convex
//! trace functional `Σ ωᵢ Tr f(X^{-1/2}AᵢX^{-1/2})`, where `g(t) = −t·f'(t)`.
//! Its Riemannian gradient is the weighted sum of operator perspectives
//! `Σ ωᵢ X^{1/2} g(X^{-1/2}AᵢX^{-1/2}) X^{1/2}`.
//!
//! * [`linalg`]: dense symmetric matrices, Jacobi eigendecomposition, functional calculus.
//! * [`generators`]: the registry of `(f, g)` pairs and transform utilities.
//! * [`calculus`]: geometric mean, perspective, objective and gradient.
//! * [`solver`]: gradient descent and the two-matrix representing function.
//! * [`verify`]: seeded property suites with JSON reports.

pub mod calculus;
pub mod error;
pub mod generators;
pub mod linalg;
pub mod random;
pub mod solver;
pub mod verify;

pub use calculus::{geometric_mean, gradient, perspective, trace_objective, MeanProblem};
pub use error::{Error, Result};
pub use generators::{registry_get, Classification, Generator, GeneratorSpec};
pub use linalg::{Matrix, SpdMatrix, SymMatrix};
pub use solver::{
    bivariate_mean, closed_form_phi, representing_phi, solve_mean, InitStrategy, SolveReport, SolverConfig, Termination,
};
pub use verify::{CheckParams, PropertyReport, Suite, SuiteReport};
