//! Computing the operator mean `X_g(ω; A₁,…,A_k)`.
//!
//! The general path is Riemannian gradient descent on the SPD manifold with
//! the geodesic retraction
//!
//! ```text
//! X ← X^{1/2} exp(−s·X^{-1/2} G X^{-1/2}) X^{1/2},   G = Σ ωᵢ 𝒫_g(Aᵢ, X)
//! ```
//!
//! and Armijo backtracking on the trace objective. For two matrices and a
//! classified generator the mean is also available in closed form as the
//! perspective of the scalar representing function, see [`bivariate`].

pub mod bivariate;

pub use bivariate::{bivariate_mean, closed_form_phi, representing_phi, PHI_RESIDUAL_TOL};

use serde::{Deserialize, Serialize};

use crate::calculus::{evaluate, MeanProblem, PointEvaluation};
use crate::error::{Error, Result};
use crate::generators::Classification;
use crate::linalg::{sandwich, SpdMatrix, SymMatrix};

/// Armijo steps below this length end the solve as stalled.
pub const STALL_STEP: f64 = 1e-16;
/// Slack allowed on the arithmetic-mean bounds.
pub const BOUND_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub enum InitStrategy {
    /// `Σ ωᵢAᵢ`.
    Arithmetic,
    /// `exp(Σ ωᵢ log Aᵢ)`.
    LogEuclidean,
    Custom(SpdMatrix),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub grad_tol: f64,
    pub max_iters: usize,
    pub initial_step: f64,
    pub armijo_beta: f64,
    pub armijo_sigma: f64,
    pub init: InitStrategy,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            max_iters: 500,
            initial_step: 1.0,
            armijo_beta: 0.5,
            armijo_sigma: 1e-4,
            init: InitStrategy::Arithmetic,
        }
    }
}

impl SolverConfig {
    pub fn with_grad_tol(mut self, grad_tol: f64) -> Self {
        self.grad_tol = grad_tol;
        self
    }

    pub fn with_init(mut self, init: InitStrategy) -> Self {
        self.init = init;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.grad_tol > 0.0) {
            return Err(Error::Config(format!("grad_tol must be positive, got {}", self.grad_tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::Config("max_iters must be positive".into()));
        }
        if !(self.initial_step > 0.0 && self.initial_step.is_finite()) {
            return Err(Error::Config(format!("initial_step must be positive, got {}", self.initial_step)));
        }
        if !(self.armijo_beta > 0.0 && self.armijo_beta < 1.0) {
            return Err(Error::Config(format!("armijo_beta must lie in (0, 1), got {}", self.armijo_beta)));
        }
        if !(self.armijo_sigma > 0.0 && self.armijo_sigma < 0.5) {
            return Err(Error::Config(format!("armijo_sigma must lie in (0, 1/2), got {}", self.armijo_sigma)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    GradientTol,
    MaxIters,
    Stalled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundRelation {
    /// `X ≤ Σ ωᵢAᵢ` (operator-convex generator).
    BelowArithmetic,
    /// `X ≥ Σ ωᵢAᵢ` (operator-concave generator).
    AboveArithmetic,
}

/// Arithmetic-mean bound at a solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsCheck {
    pub relation: BoundRelation,
    /// Smallest eigenvalue of the signed difference.
    pub min_eigenvalue_slack: f64,
    pub holds: bool,
}

/// Signed arithmetic-mean bound for `x` as a solution of `problem`, if the
/// generator is classified.
pub fn bounds_check(problem: &MeanProblem, x: &SpdMatrix) -> Result<Option<BoundsCheck>> {
    let relation = match problem.generator().classification() {
        Classification::OperatorConvex => BoundRelation::BelowArithmetic,
        Classification::OperatorConcave => BoundRelation::AboveArithmetic,
        Classification::Unclassified => return Ok(None),
    };
    let arith = problem.arithmetic_mean();
    let diff = match relation {
        BoundRelation::BelowArithmetic => &arith - x.as_sym(),
        BoundRelation::AboveArithmetic => x.as_sym() - &arith,
    };
    let slack = diff.min_eigenvalue()?;
    Ok(Some(BoundsCheck { relation, min_eigenvalue_slack: slack, holds: slack >= -BOUND_TOL }))
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub solution: SpdMatrix,
    /// Accepted descent steps.
    pub iterations: usize,
    /// `‖∇F‖_X` at every visited iterate, starting with the initial point.
    pub grad_norms: Vec<f64>,
    pub objective_values: Option<Vec<f64>>,
    pub converged: bool,
    pub termination: Termination,
    pub bounds: Option<BoundsCheck>,
}

impl SolveReport {
    pub fn final_grad_norm(&self) -> f64 {
        *self.grad_norms.last().expect("at least one evaluation")
    }
}

fn initial_point(problem: &MeanProblem, init: &InitStrategy) -> Result<SpdMatrix> {
    match init {
        InitStrategy::Arithmetic => SpdMatrix::new(problem.arithmetic_mean()),
        InitStrategy::LogEuclidean => problem.log_euclidean_mean(),
        InitStrategy::Custom(x) => {
            if x.dim() != problem.dim() {
                return Err(Error::DimensionMismatch { expected: problem.dim(), found: x.dim() });
            }
            Ok(x.clone())
        }
    }
}

/// Minimizes `F_𝒜(X) = Σ ωᵢ Tr f(X^{-1/2}AᵢX^{-1/2})` by Riemannian gradient descent.
///
/// Convergence means `‖∇F‖_X ≤ grad_tol`. Running out of iterations or of
/// step length is reported through [`SolveReport::termination`], not as an
/// error.
pub fn solve_mean(problem: &MeanProblem, config: &SolverConfig) -> Result<SolveReport> {
    config.validate()?;
    let use_f = problem.generator().has_f();
    let mut x = initial_point(problem, &config.init)?;
    let mut eval = evaluate(problem, &x, use_f)?;
    let mut grad_norms = Vec::new();
    let mut objective_values = use_f.then(Vec::new);
    let mut iterations = 0;
    let mut trial_step = config.initial_step;

    let termination = loop {
        let grad_norm = eval.grad_norm();
        grad_norms.push(grad_norm);
        if let (Some(values), Some(f)) = (objective_values.as_mut(), eval.objective) {
            values.push(f);
        }
        if grad_norm <= config.grad_tol {
            break Termination::GradientTol;
        }
        if iterations >= config.max_iters {
            break Termination::MaxIters;
        }
        match line_search(problem, config, &eval, use_f, trial_step)? {
            Some(step) => {
                trial_step = barzilai_borwein(&eval, &step).unwrap_or(config.initial_step);
                x = step.point;
                eval = step.eval;
                iterations += 1;
            }
            None => break Termination::Stalled,
        }
    };

    let bounds = bounds_check(problem, &x)?;
    Ok(SolveReport {
        solution: x,
        iterations,
        grad_norms,
        objective_values,
        converged: termination == Termination::GradientTol,
        termination,
        bounds,
    })
}

struct AcceptedStep {
    length: f64,
    /// `exp(−s·H/2)` for the whitened gradient `H` at the previous point.
    half_step: SymMatrix,
    point: SpdMatrix,
    eval: PointEvaluation,
}

/// Relative noise floor assumed for objective values.
const OBJECTIVE_NOISE: f64 = 1e-12;
/// Largest `s·max|λ(H)|` allowed in one step, so `X` changes by at most `e⁶`
/// along any direction.
const MAX_EXPONENT: f64 = 6.0;
/// Safety factor on the first-order rounding estimate of the objective.
const NOISE_FACTOR: f64 = 8.0;

/// Backtracking along the geodesic in direction `−∇F`, starting at `trial`.
///
/// With an objective the Armijo condition `F(X⁺) ≤ F(X) − σ·s·‖∇F‖²_X` is
/// used while the required decrease is above the noise floor of `F`. Below
/// it, and for generators without an objective, a step is accepted when the
/// gradient norm shrinks (and `F`, if known, rises by no more than its noise).
fn line_search(
    problem: &MeanProblem,
    config: &SolverConfig,
    eval: &PointEvaluation,
    use_f: bool,
    trial: f64,
) -> Result<Option<AcceptedStep>> {
    let direction = eval.whitened_gradient.eig()?;
    let grad_norm = eval.grad_norm();
    let sq_norm = grad_norm * grad_norm;
    let noise = eval.objective.map(|f| OBJECTIVE_NOISE * (1.0 + f.abs()) + NOISE_FACTOR * eval.objective_noise);
    let detectable = |s: f64| noise.is_some_and(|nz| config.armijo_sigma * s * sq_norm > nz);
    // A short trial step must not push the test into the noise regime while
    // a longer one, up to the default step, would give a measurable decrease.
    // Caps how far one step may stretch `X` along any eigendirection.
    let spread = direction.max().abs().max(direction.min().abs());
    let max_step = if spread > 0.0 { MAX_EXPONENT / spread } else { f64::INFINITY };
    let mut step = trial.min(max_step);
    if let Some(nz) = noise {
        let shortest_detectable = 2.0 * nz / (config.armijo_sigma * sq_norm);
        if !detectable(step) && shortest_detectable <= config.initial_step.min(max_step) {
            step = shortest_detectable;
        }
    }
    while step >= STALL_STEP {
        let half_step = direction.map(|l| (-0.5 * step * l).exp())?;
        let moved = direction.map(|l| (-step * l).exp());
        let candidate = moved.and_then(|m| SpdMatrix::new(sandwich(eval.sqrt.as_sym(), &m)));
        let next = candidate.and_then(|x| evaluate(problem, &x, use_f).map(|e| (x, e)));
        let (candidate, next) = match next {
            Ok(pair) => pair,
            Err(_) => {
                step *= config.armijo_beta;
                continue;
            }
        };
        let accept = match (eval.objective, next.objective) {
            (Some(f), Some(f_next)) => {
                let decrease = config.armijo_sigma * step * sq_norm;
                if detectable(step) {
                    f_next <= f - decrease
                } else {
                    f_next <= f + noise.expect("objective present") && next.grad_norm() < grad_norm
                }
            }
            _ => next.grad_norm() < grad_norm,
        };
        if accept {
            return Ok(Some(AcceptedStep { length: step, half_step, point: candidate, eval: next }));
        }
        step *= config.armijo_beta;
    }
    Ok(None)
}

/// Barzilai–Borwein step length for the next iteration.
///
/// Writing the new point as `L·Lᵀ` with `L = X^{1/2}exp(−sH/2)`, parallel
/// transport along the geodesic is the identity in `L`-whitened coordinates,
/// so the gradient difference is `K·H⁺·Kᵀ − H` with `K = L⁻¹·(X⁺)^{1/2}`.
fn barzilai_borwein(prev: &PointEvaluation, step: &AcceptedStep) -> Option<f64> {
    let h = prev.whitened_gradient.as_matrix();
    let k = &(step.half_step.as_matrix() * prev.inv_sqrt.as_matrix()) * step.eval.sqrt.as_matrix();
    let transported = &(&k * step.eval.whitened_gradient.as_matrix()) * &k.transpose();
    let y = &transported - h;
    let s = h.scale(-step.length);
    let sy = s.trace_product(&y);
    let yy = y.trace_product(&y);
    if !(sy > 0.0 && yy > 0.0) {
        return None;
    }
    let bb = sy / yy;
    bb.is_finite().then(|| bb.clamp(1e-10, 1e10))
}

/// Whitened gradient `Σ ωᵢ g(X^{-1/2}AᵢX^{-1/2})` at `x`; zero exactly at the mean.
pub fn critical_point_residual(problem: &MeanProblem, x: &SpdMatrix) -> Result<SymMatrix> {
    Ok(evaluate(problem, x, false)?.whitened_gradient)
}
