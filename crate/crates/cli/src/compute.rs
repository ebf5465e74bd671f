use opmeans_core::solver::BoundsCheck;
use opmeans_core::{solve_mean, MeanProblem, SolverConfig, Termination};
use serde::Serialize;

use crate::error::Result;

/// JSON payload of `opmeans compute`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComputeOutput {
    pub dim: usize,
    /// Row-major `dim²` entries.
    pub solution: Vec<f64>,
    pub iterations: usize,
    pub grad_norm: f64,
    pub converged: bool,
    pub termination: Termination,
    pub bounds_check: Option<BoundsCheck>,
}

pub fn compute(problem: &MeanProblem, config: &SolverConfig) -> Result<ComputeOutput> {
    let report = solve_mean(problem, config)?;
    Ok(ComputeOutput {
        dim: problem.dim(),
        solution: report.solution.as_sym().to_row_major(),
        iterations: report.iterations,
        grad_norm: report.final_grad_norm(),
        converged: report.converged,
        termination: report.termination,
        bounds_check: report.bounds,
    })
}
