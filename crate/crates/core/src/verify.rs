//! Seeded property suites with machine-readable reports.
//!
//! Every sample draws from its own generator seeded by `(seed, index)`, so a
//! report depends only on its parameters and never on thread scheduling.
//! Theorem checks count violations, which must be zero; probes and searches
//! only report what they find. Solver failures are always counted apart from
//! violations.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::calculus::{geometric_mean, gradient, trace_objective, MeanProblem};
use crate::error::{Error, Result};
use crate::generators::{default_generators, Classification, Generator};
use crate::linalg::{congruence_spd, sandwich, sqrt_and_invsqrt, trace_inner, SpdMatrix, SymMatrix, DEFAULT_MAX_DIM};
use crate::random::{
    random_invertible, random_psd, random_spd, random_symmetric_unit, random_weights, sample_rng, SampleRng,
};
use crate::solver::{bivariate_mean, solve_mean, SolverConfig, BOUND_TOL};

/// Slack allowed on majorization partial sums and on the trace gap.
pub const MAJORIZATION_TOL: f64 = 1e-9;
/// Largest dimension accepted by [`check_majorization`].
pub const MAJORIZATION_MAX_DIM: usize = 8;
/// Relative deviation allowed between congruent solutions.
pub const CONGRUENCE_TOL: f64 = 1e-7;
/// Condition number cap for random congruences.
pub const CONGRUENCE_MAX_COND: f64 = 100.0;
/// Relative slack allowed on geodesic convexity of the objective.
pub const CONVEXITY_TOL: f64 = 1e-9;
/// Finite-difference error allowed relative to `1 + |F|`.
pub const GRADIENT_TOL: f64 = 1e-6;
pub const FD_STEP: f64 = 1e-5;
pub const FD_DIRECTIONS: usize = 20;
/// `(k, n)` cycled through by [`check_gradient`].
pub const GRADIENT_INSTANCES: [(usize, usize); 3] = [(1, 2), (3, 3), (4, 5)];
/// A monotonicity candidate needs an eigenvalue below `−MONOTONICITY_TOL`.
pub const MONOTONICITY_TOL: f64 = 1e-8;
/// Solver tolerance used to re-verify monotonicity witnesses.
pub const REVERIFY_GRAD_TOL: f64 = 1e-12;
const REVERIFY_MAX_ITERS: usize = 5000;
/// Slack allowed before a convexity-probe sample counts as a finding.
pub const PROBE_TOL: f64 = 1e-9;

/// Interior bin edges of the slack histogram.
pub const HISTOGRAM_EDGES: [f64; 6] = [-1e-3, -1e-6, -1e-9, 1e-9, 1e-6, 1e-3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    /// Must hold; any violation fails the suite.
    Theorem,
    /// Samples a conjecture; findings are reported only.
    Probe,
    /// Looks for a counterexample; finding one or not are both valid outcomes.
    Search,
}

/// Counts of slack values per bin; `counts[i]` covers `[edges[i-1], edges[i])`
/// with open-ended outer bins.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlackHistogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

impl SlackHistogram {
    fn from_values(values: &[f64]) -> Self {
        let mut counts = vec![0; HISTOGRAM_EDGES.len() + 1];
        for &v in values {
            counts[HISTOGRAM_EDGES.iter().filter(|&&e| v >= e).count()] += 1;
        }
        let min = values.iter().copied().reduce(f64::min);
        let max = values.iter().copied().reduce(f64::max);
        Self { edges: HISTOGRAM_EDGES.to_vec(), counts, min, max }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
    pub kind: CheckKind,
    pub samples: usize,
    pub violations: usize,
    /// Samples that could not be checked (solver non-convergence or a
    /// numerical error), never counted as violations.
    pub solver_failures: usize,
    /// Largest defect over checked samples; positive values are on the wrong
    /// side of the property.
    pub worst_gap: f64,
    pub witness: Option<Value>,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram: Option<SlackHistogram>,
}

impl PropertyReport {
    /// False only for a theorem check with violations.
    pub fn passed(&self) -> bool {
        self.kind != CheckKind::Theorem || self.violations == 0
    }
}

/// Shared parameters of the property checks.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckParams {
    pub samples: usize,
    pub seed: u64,
    /// Dimensions drawn uniformly per sample.
    pub dims: Vec<usize>,
    /// Largest number of matrices per random problem (at least 2).
    pub max_k: usize,
    /// Cap on entries of `dims`.
    pub max_dim: usize,
    pub solver: SolverConfig,
}

impl Default for CheckParams {
    fn default() -> Self {
        Self {
            samples: 200,
            seed: 42,
            dims: vec![2, 3, 4],
            max_k: 3,
            max_dim: DEFAULT_MAX_DIM,
            solver: SolverConfig::default(),
        }
    }
}

impl CheckParams {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, seed, ..Self::default() }
    }

    pub fn with_dims(mut self, dims: Vec<usize>) -> Self {
        self.dims = dims;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.is_empty() {
            return Err(Error::Config("dims must not be empty".into()));
        }
        if let Some(&n) = self.dims.iter().find(|&&n| n == 0 || n > self.max_dim) {
            return Err(Error::Config(format!("dimension {n} outside 1..={}", self.max_dim)));
        }
        if self.max_k < 2 {
            return Err(Error::Config(format!("max_k must be at least 2, got {}", self.max_k)));
        }
        self.solver.validate()
    }

    fn dim(&self, rng: &mut SampleRng) -> usize {
        self.dims[rng.random_range(0..self.dims.len())]
    }

    fn k(&self, rng: &mut SampleRng) -> usize {
        rng.random_range(2..=self.max_k)
    }
}

/// `p ∈ {0.1, 0.2, …, 0.9}`.
pub fn default_p_grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

pub fn generator_label(generator: &Generator) -> String {
    match generator.spec() {
        Some(spec) => match (spec.p, spec.lambda) {
            (Some(p), _) => format!("{}(p={p})", spec.name),
            (_, Some(l)) => format!("{}(lambda={l})", spec.name),
            _ => spec.name,
        },
        None => generator.name().to_string(),
    }
}

fn spd_json(a: &SpdMatrix) -> Value {
    json!(a.as_sym().to_row_major())
}

/// Problem in the same layout as problem files.
pub fn problem_json(problem: &MeanProblem) -> Value {
    json!({
        "dim": problem.dim(),
        "matrices": problem.matrices().iter().map(spd_json).collect::<Vec<_>>(),
        "weights": problem.weights(),
        "generator": problem.generator().spec().map(|s| json!(s)).unwrap_or_else(|| json!({"name": problem.generator().name()})),
    })
}

enum Outcome {
    Checked { defect: f64, witness: Option<Value> },
    Failed(String),
}

impl Outcome {
    fn checked(defect: f64, violated: bool, witness: impl FnOnce() -> Value) -> Self {
        Outcome::Checked { defect, witness: violated.then(witness) }
    }
}

fn run_samples<F>(samples: usize, seed: u64, sample: F) -> Vec<Outcome>
where
    F: Fn(usize, &mut SampleRng) -> Result<Outcome> + Sync,
{
    (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(seed, i as u64);
            sample(i, &mut rng).unwrap_or_else(|e| Outcome::Failed(e.to_string()))
        })
        .collect()
}

struct Tally {
    violations: usize,
    failures: usize,
    worst_gap: f64,
    witness: Option<Value>,
    notes: Vec<String>,
}

fn tally(outcomes: Vec<Outcome>) -> Tally {
    let mut t = Tally { violations: 0, failures: 0, worst_gap: f64::NEG_INFINITY, witness: None, notes: Vec::new() };
    for (i, outcome) in outcomes.into_iter().enumerate() {
        match outcome {
            Outcome::Checked { defect, witness } => {
                t.worst_gap = t.worst_gap.max(defect);
                if let Some(w) = witness {
                    t.violations += 1;
                    if t.witness.is_none() {
                        t.witness = Some(json!({"sample": i, "inputs": w}));
                    }
                }
            }
            Outcome::Failed(msg) => {
                if t.failures == 0 {
                    t.notes.push(format!("first failure at sample {i}: {msg}"));
                }
                t.failures += 1;
            }
        }
    }
    if !t.worst_gap.is_finite() {
        t.worst_gap = 0.0;
    }
    t
}

fn report(
    property: &str,
    generator: Option<&Generator>,
    kind: CheckKind,
    params: &CheckParams,
    tolerances: &[(&str, f64)],
    t: Tally,
) -> PropertyReport {
    PropertyReport {
        property: property.into(),
        generator: generator.map(generator_label),
        kind,
        samples: params.samples,
        violations: t.violations,
        solver_failures: t.failures,
        worst_gap: t.worst_gap,
        witness: t.witness,
        seed: params.seed,
        tolerances: tolerances.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        notes: t.notes,
        histogram: None,
    }
}

fn random_problem(rng: &mut SampleRng, generator: &Generator, n: usize, k: usize) -> Result<MeanProblem> {
    let weights = random_weights(rng, k);
    let matrices = (0..k).map(|_| random_spd(rng, n)).collect();
    MeanProblem::new(weights, matrices, generator.clone())
}

fn require_classified(generator: &Generator) -> Result<()> {
    if generator.classification().is_classified() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("generator '{}' is not classified", generator.name())))
    }
}

fn require_concave(generator: &Generator) -> Result<()> {
    if generator.classification() == Classification::OperatorConcave {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("generator '{}' is not operator concave", generator.name())))
    }
}

fn require_f(generator: &Generator) -> Result<()> {
    if generator.has_f() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!("generator '{}' has no objective integrand f", generator.name())))
    }
}

/// Majorization data for one `(X, Y, p)`: smallest partial-sum slack of the
/// eigenvalues of `p·log X + (1−p)·log Y` over those of `log(X #_p Y)`, and
/// the absolute trace gap.
pub fn majorization_gaps(x: &SpdMatrix, y: &SpdMatrix, p: f64) -> Result<(f64, f64)> {
    let m = geometric_mean(x, y, p)?;
    let lhs: Vec<f64> = m.eig().eigenvalues().iter().map(|l| l.ln()).collect();
    let log_x = x.eig().map(f64::ln)?;
    let log_y = y.eig().map(f64::ln)?;
    let rhs = (&log_x.scale(p) + &log_y.scale(1.0 - p)).eigenvalues()?;
    let (mut sl, mut sr) = (0.0, 0.0);
    let mut min_slack = f64::INFINITY;
    for i in 0..lhs.len() {
        sl += lhs[i];
        sr += rhs[i];
        if i + 1 < lhs.len() {
            min_slack = min_slack.min(sr - sl);
        }
    }
    Ok((if min_slack.is_finite() { min_slack } else { 0.0 }, (sl - sr).abs()))
}

/// Eigenvalues of `log(X #_p Y)` are majorized by those of `p·log X + (1−p)·log Y`.
pub fn check_majorization(params: &CheckParams, p_grid: &[f64]) -> Result<PropertyReport> {
    params.validate()?;
    if let Some(&n) = params.dims.iter().find(|&&n| n > MAJORIZATION_MAX_DIM) {
        return Err(Error::DimensionCap { dim: n, cap: MAJORIZATION_MAX_DIM });
    }
    if let Some(&p) = p_grid.iter().find(|&&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::Config(format!("p = {p} outside [0, 1]")));
    }
    let outcomes = run_samples(params.samples, params.seed, |_, rng| {
        let n = params.dim(rng);
        let x = random_spd(rng, n);
        let y = random_spd(rng, n);
        let mut worst = f64::NEG_INFINITY;
        let mut bad = None;
        for &p in p_grid {
            let (slack, trace_gap) = majorization_gaps(&x, &y, p)?;
            let defect = (-slack).max(trace_gap);
            worst = worst.max(defect);
            if bad.is_none() && (slack < -MAJORIZATION_TOL || trace_gap > MAJORIZATION_TOL) {
                bad = Some((p, slack, trace_gap));
            }
        }
        Ok(Outcome::checked(worst.max(0.0), bad.is_some(), || {
            let (p, slack, trace_gap) = bad.expect("violated");
            json!({"x": spd_json(&x), "y": spd_json(&y), "p": p, "slack": slack, "trace_gap": trace_gap})
        }))
    });
    Ok(report(
        "majorization",
        None,
        CheckKind::Theorem,
        params,
        &[("partial_sum_slack", MAJORIZATION_TOL), ("trace_gap", MAJORIZATION_TOL)],
        tally(outcomes),
    ))
}

/// `Cᵀ X_g(Aᵢ) C = X_g(CᵀAᵢC)` for random `C` with condition number at most 100.
pub fn check_congruence_invariance(generator: &Generator, params: &CheckParams) -> Result<PropertyReport> {
    params.validate()?;
    require_classified(generator)?;
    let outcomes = run_samples(params.samples, params.seed, |_, rng| {
        let n = params.dim(rng);
        let k = params.k(rng);
        let problem = random_problem(rng, generator, n, k)?;
        let c = random_invertible(rng, n, CONGRUENCE_MAX_COND);
        let moved = problem.congruent(&c)?;
        let base = solve_mean(&problem, &params.solver)?;
        let image = solve_mean(&moved, &params.solver)?;
        if !(base.converged && image.converged) {
            return Ok(Outcome::Failed(format!(
                "solver did not converge ({:?}, {:?})",
                base.termination, image.termination
            )));
        }
        let expected = congruence_spd(&c, &base.solution)?;
        let dev = (expected.as_sym() - image.solution.as_sym()).frobenius() / expected.frobenius();
        Ok(Outcome::checked(
            dev,
            dev > CONGRUENCE_TOL,
            || json!({"problem": problem_json(&problem), "c": c.as_slice(), "relative_deviation": dev}),
        ))
    });
    Ok(report(
        "congruence-invariance",
        Some(generator),
        CheckKind::Theorem,
        params,
        &[("relative_deviation", CONGRUENCE_TOL), ("solver_grad_tol", params.solver.grad_tol)],
        tally(outcomes),
    ))
}

/// `X_g ≤ Σ ωᵢAᵢ` for operator-convex and `X_g ≥ Σ ωᵢAᵢ` for operator-concave `g`.
pub fn check_mean_bounds(generator: &Generator, params: &CheckParams) -> Result<PropertyReport> {
    params.validate()?;
    require_classified(generator)?;
    let outcomes = run_samples(params.samples, params.seed, |_, rng| {
        let n = params.dim(rng);
        let k = params.k(rng);
        let problem = random_problem(rng, generator, n, k)?;
        let solved = solve_mean(&problem, &params.solver)?;
        if !solved.converged {
            return Ok(Outcome::Failed(format!("solver did not converge ({:?})", solved.termination)));
        }
        let bounds = solved.bounds.expect("classified generator");
        let slack = bounds.min_eigenvalue_slack;
        Ok(Outcome::checked(
            -slack,
            slack < -BOUND_TOL,
            || json!({"problem": problem_json(&problem), "relation": bounds.relation, "slack": slack}),
        ))
    });
    Ok(report(
        "mean-bounds",
        Some(generator),
        CheckKind::Theorem,
        params,
        &[("min_eigenvalue_slack", BOUND_TOL), ("solver_grad_tol", params.solver.grad_tol)],
        tally(outcomes),
    ))
}

/// `F(X #_p Y) ≤ p·F(X) + (1−p)·F(Y)` for the aggregated trace objective.
///
/// The gap is measured relative to `1 + |p·F(X) + (1−p)·F(Y)|`.
pub fn check_geodesic_convexity(generator: &Generator, params: &CheckParams) -> Result<PropertyReport> {
    params.validate()?;
    require_f(generator)?;
    let outcomes = run_samples(params.samples, params.seed, |_, rng| {
        let n = params.dim(rng);
        let k = rng.random_range(1..=params.max_k);
        let problem = random_problem(rng, generator, n, k)?;
        let x = random_spd(rng, n);
        let y = random_spd(rng, n);
        let p: f64 = rng.random();
        let lhs = trace_objective(&problem, &geometric_mean(&x, &y, p)?)?;
        let rhs = p * trace_objective(&problem, &x)? + (1.0 - p) * trace_objective(&problem, &y)?;
        let gap = (lhs - rhs) / (1.0 + rhs.abs());
        Ok(Outcome::checked(
            gap,
            gap > CONVEXITY_TOL,
            || json!({"problem": problem_json(&problem), "x": spd_json(&x), "y": spd_json(&y), "p": p, "lhs": lhs, "rhs": rhs}),
        ))
    });
    Ok(report(
        "geodesic-convexity",
        Some(generator),
        CheckKind::Theorem,
        params,
        &[("relative_gap", CONVEXITY_TOL)],
        tally(outcomes),
    ))
}

/// Largest `|ΔF/2s − ⟨∇F, V⟩_X| / (1 + |F|)` over `directions` random
/// `V = X^{1/2}WX^{1/2}` with `‖W‖_F = 1`, using central differences along
/// `X + sV`.
pub fn gradient_fd_error(problem: &MeanProblem, x: &SpdMatrix, rng: &mut SampleRng, directions: usize) -> Result<f64> {
    let f = trace_objective(problem, x)?;
    let grad = gradient(problem, x)?;
    let (sqrt, _) = sqrt_and_invsqrt(x)?;
    let mut worst = 0.0f64;
    for _ in 0..directions {
        let w = random_symmetric_unit(rng, x.dim());
        let v = sandwich(sqrt.as_sym(), &w);
        let plus = SpdMatrix::new(x.as_sym() + &v.scale(FD_STEP))?;
        let minus = SpdMatrix::new(x.as_sym() - &v.scale(FD_STEP))?;
        let fd = (trace_objective(problem, &plus)? - trace_objective(problem, &minus)?) / (2.0 * FD_STEP);
        let exact = trace_inner(x, &grad, &v);
        worst = worst.max((fd - exact).abs() / (1.0 + f.abs()));
    }
    Ok(worst)
}

/// Gradient against finite differences of the objective. Sample `i` uses the
/// `(k, n)` instance `GRADIENT_INSTANCES[i mod 3]`; `dims` is not consulted.
pub fn check_gradient(generator: &Generator, params: &CheckParams) -> Result<PropertyReport> {
    params.validate()?;
    require_f(generator)?;
    let outcomes = run_samples(params.samples, params.seed, |i, rng| {
        let (k, n) = GRADIENT_INSTANCES[i % GRADIENT_INSTANCES.len()];
        let problem = random_problem(rng, generator, n, k)?;
        let x = random_spd(rng, n);
        let err = gradient_fd_error(&problem, &x, rng, FD_DIRECTIONS)?;
        Ok(Outcome::checked(
            err,
            err > GRADIENT_TOL,
            || json!({"problem": problem_json(&problem), "x": spd_json(&x), "error": err}),
        ))
    });
    Ok(report(
        "gradient",
        Some(generator),
        CheckKind::Theorem,
        params,
        &[("relative_error", GRADIENT_TOL), ("fd_step", FD_STEP)],
        tally(outcomes),
    ))
}

/// Smallest eigenvalue of `X_g(A₁+Δ, A₂) − X_g(A₁, A₂)` with equal weights,
/// both means by the two-matrix reduction.
pub fn monotonicity_gap(generator: &Generator, a1: &SpdMatrix, a2: &SpdMatrix, delta: &SymMatrix) -> Result<f64> {
    let raised = SpdMatrix::new(a1.as_sym() + delta)?;
    let before = bivariate_mean(generator, (0.5, 0.5), a1, a2)?;
    let after = bivariate_mean(generator, (0.5, 0.5), &raised, a2)?;
    (after.as_sym() - before.as_sym()).min_eigenvalue()
}

/// The same quantity with both means from [`solve_mean`]; `None` if either
/// solve does not converge.
pub fn monotonicity_gap_solved(
    generator: &Generator,
    a1: &SpdMatrix,
    a2: &SpdMatrix,
    delta: &SymMatrix,
    config: &SolverConfig,
) -> Result<Option<f64>> {
    let raised = SpdMatrix::new(a1.as_sym() + delta)?;
    let before = solve_mean(&MeanProblem::uniform(vec![a1.clone(), a2.clone()], generator.clone())?, config)?;
    let after = solve_mean(&MeanProblem::uniform(vec![raised, a2.clone()], generator.clone())?, config)?;
    if !(before.converged && after.converged) {
        return Ok(None);
    }
    Ok(Some((after.solution.as_sym() - before.solution.as_sym()).min_eigenvalue()?))
}

/// Searches random 2×2 pairs `(A₁, A₂)` and `Δ ⪰ 0` for a failure of
/// `X_g(A₁+Δ, A₂) ≥ X_g(A₁, A₂)`.
///
/// All `samples` trials run. Candidates are re-verified in order by
/// [`solve_mean`] at gradient tolerance `1e-12`; the first that still shows an
/// eigenvalue below `−1e-8` becomes the witness. `violations` is 1 if a
/// witness was confirmed and 0 otherwise.
pub fn search_monotonicity_violation(generator: &Generator, params: &CheckParams) -> Result<PropertyReport> {
    params.validate()?;
    require_concave(generator)?;
    let samples: Vec<Result<(f64, SpdMatrix, SpdMatrix, SymMatrix)>> = (0..params.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(params.seed, i as u64);
            let a1 = random_spd(&mut rng, 2);
            let a2 = random_spd(&mut rng, 2);
            let delta = random_psd(&mut rng, 2);
            Ok((monotonicity_gap(generator, &a1, &a2, &delta)?, a1, a2, delta))
        })
        .collect();

    let config = SolverConfig {
        grad_tol: REVERIFY_GRAD_TOL,
        max_iters: params.solver.max_iters.max(REVERIFY_MAX_ITERS),
        ..params.solver.clone()
    };
    let mut t = Tally { violations: 0, failures: 0, worst_gap: 0.0, witness: None, notes: Vec::new() };
    let (mut candidates, mut rejected) = (0usize, 0usize);
    for (i, sample) in samples.into_iter().enumerate() {
        let (gap, a1, a2, delta) = match sample {
            Ok(s) => s,
            Err(e) => {
                if t.failures == 0 {
                    t.notes.push(format!("first failure at sample {i}: {e}"));
                }
                t.failures += 1;
                continue;
            }
        };
        t.worst_gap = t.worst_gap.max(-gap);
        if !(gap < -MONOTONICITY_TOL) {
            continue;
        }
        candidates += 1;
        if t.witness.is_some() {
            continue;
        }
        match monotonicity_gap_solved(generator, &a1, &a2, &delta, &config) {
            Ok(Some(solved)) if solved < -MONOTONICITY_TOL => {
                t.violations = 1;
                t.witness = Some(json!({
                    "sample": i,
                    "a1": spd_json(&a1),
                    "a2": spd_json(&a2),
                    "delta": delta.to_row_major(),
                    "weights": [0.5, 0.5],
                    "min_eigenvalue": gap,
                    "min_eigenvalue_reverified": solved,
                }));
            }
            Ok(Some(_)) => rejected += 1,
            Ok(None) | Err(_) => t.failures += 1,
        }
    }
    t.notes.push(format!("trials: {}", params.samples));
    t.notes.push(format!("candidates: {candidates}"));
    if rejected > 0 {
        t.notes.push(format!("candidates rejected on re-verification: {rejected}"));
    }
    if t.witness.is_none() {
        t.notes.push("no witness found in budget".into());
    }
    Ok(report(
        "monotonicity-search",
        Some(generator),
        CheckKind::Search,
        params,
        &[("negative_eigenvalue", MONOTONICITY_TOL), ("reverify_grad_tol", REVERIFY_GRAD_TOL)],
        t,
    ))
}

/// Smallest eigenvalue of `½X_g(𝒜) + ½X_g(ℬ) − X_g(½𝒜 + ½ℬ)` for pairs `𝒜`, `ℬ`.
pub fn convexity_slack(
    generator: &Generator,
    weights: (f64, f64),
    a: (&SpdMatrix, &SpdMatrix),
    b: (&SpdMatrix, &SpdMatrix),
) -> Result<f64> {
    let xa = bivariate_mean(generator, weights, a.0, a.1)?;
    let xb = bivariate_mean(generator, weights, b.0, b.1)?;
    let mid = |u: &SpdMatrix, v: &SpdMatrix| SpdMatrix::new((u.as_sym() + v.as_sym()).scale(0.5));
    let xm = bivariate_mean(generator, weights, &mid(a.0, b.0)?, &mid(a.1, b.1)?)?;
    (&(xa.as_sym() + xb.as_sym()).scale(0.5) - xm.as_sym()).min_eigenvalue()
}

/// Samples joint convexity of the two-matrix mean. Negative slack is a
/// finding about an open question, not a failure.
pub fn probe_mean_convexity(generator: &Generator, params: &CheckParams) -> Result<PropertyReport> {
    params.validate()?;
    require_concave(generator)?;
    let results: Vec<Result<(f64, Value)>> = (0..params.samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(params.seed, i as u64);
            let n = params.dim(&mut rng);
            let w1: f64 = rng.random_range(0.05..0.95);
            let m: Vec<SpdMatrix> = (0..4).map(|_| random_spd(&mut rng, n)).collect();
            let slack = convexity_slack(generator, (w1, 1.0 - w1), (&m[0], &m[1]), (&m[2], &m[3]))?;
            let inputs = json!({
                "weights": [w1, 1.0 - w1],
                "a": [spd_json(&m[0]), spd_json(&m[1])],
                "b": [spd_json(&m[2]), spd_json(&m[3])],
                "slack": slack,
            });
            Ok((slack, inputs))
        })
        .collect();
    let mut slacks = Vec::with_capacity(results.len());
    let outcomes = results
        .into_iter()
        .map(|r| match r {
            Ok((slack, inputs)) => {
                slacks.push(slack);
                Outcome::checked(-slack, slack < -PROBE_TOL, || inputs)
            }
            Err(e) => Outcome::Failed(e.to_string()),
        })
        .collect();
    let mut rep = report(
        "convexity-probe",
        Some(generator),
        CheckKind::Probe,
        params,
        &[("min_eigenvalue_slack", PROBE_TOL)],
        tally(outcomes),
    );
    rep.notes.push("sampled evidence only; does not settle the conjecture either way".into());
    rep.histogram = Some(SlackHistogram::from_values(&slacks));
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Majorization,
    Congruence,
    Bounds,
    GeodesicConvexity,
    Gradient,
    MonotonicitySearch,
    ConvexityProbe,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 8] = [
        "majorization",
        "congruence",
        "bounds",
        "geodesic-convexity",
        "gradient",
        "monotonicity-search",
        "convexity-probe",
        "all",
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Majorization => "majorization",
            Suite::Congruence => "congruence",
            Suite::Bounds => "bounds",
            Suite::GeodesicConvexity => "geodesic-convexity",
            Suite::Gradient => "gradient",
            Suite::MonotonicitySearch => "monotonicity-search",
            Suite::ConvexityProbe => "convexity-probe",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "majorization" => Suite::Majorization,
            "congruence" => Suite::Congruence,
            "bounds" => Suite::Bounds,
            "geodesic-convexity" => Suite::GeodesicConvexity,
            "gradient" => Suite::Gradient,
            "monotonicity-search" => Suite::MonotonicitySearch,
            "convexity-probe" => Suite::ConvexityProbe,
            "all" => Suite::All,
            other => {
                return Err(Error::Config(format!(
                    "unknown suite '{other}' (expected one of {})",
                    Suite::NAMES.join(", ")
                )))
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    pub dims: Vec<usize>,
    /// Every theorem check has zero violations.
    pub passed: bool,
    pub reports: Vec<PropertyReport>,
}

/// Hyper-mean used by the search and the probe.
pub fn hyper_mean_generator() -> Generator {
    Generator::power_concave(2.0).expect("valid")
}

/// Runs a suite over the default generators.
pub fn run_suite(suite: Suite, params: &CheckParams) -> Result<SuiteReport> {
    params.validate()?;
    let generators = default_generators();
    let each = |check: fn(&Generator, &CheckParams) -> Result<PropertyReport>| -> Result<Vec<PropertyReport>> {
        generators.iter().map(|g| check(g, params)).collect()
    };
    let single = |suite| -> Result<Vec<PropertyReport>> {
        Ok(match suite {
            Suite::Majorization => vec![check_majorization(params, &default_p_grid())?],
            Suite::Congruence => each(check_congruence_invariance)?,
            Suite::Bounds => each(check_mean_bounds)?,
            Suite::GeodesicConvexity => each(check_geodesic_convexity)?,
            Suite::Gradient => each(check_gradient)?,
            Suite::MonotonicitySearch => vec![search_monotonicity_violation(&hyper_mean_generator(), params)?],
            Suite::ConvexityProbe => vec![probe_mean_convexity(&hyper_mean_generator(), params)?],
            Suite::All => unreachable!("expanded below"),
        })
    };
    let reports = match suite {
        Suite::All => {
            let mut all = Vec::new();
            for s in [
                Suite::Majorization,
                Suite::Congruence,
                Suite::Bounds,
                Suite::GeodesicConvexity,
                Suite::Gradient,
                Suite::MonotonicitySearch,
                Suite::ConvexityProbe,
            ] {
                all.extend(single(s)?);
            }
            all
        }
        s => single(s)?,
    };
    Ok(SuiteReport {
        suite: suite.name().into(),
        seed: params.seed,
        samples: params.samples,
        dims: params.dims.clone(),
        passed: reports.iter().all(PropertyReport::passed),
        reports,
    })
}
