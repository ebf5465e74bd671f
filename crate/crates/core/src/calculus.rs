//! Weighted geometric mean, operator perspective, the trace objective and
//! its Riemannian gradient.

use crate::error::{Error, Result};
use crate::generators::Generator;
use crate::linalg::{
    congruence_spd, from_basis, sandwich, sqrt_and_invsqrt, unwhiten_from_basis, whiten_in_basis, EigDecomposition,
    Matrix, SpdMatrix, SymMatrix, DEFAULT_MAX_DIM,
};

/// Tolerance on `Σ ωᵢ = 1`.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Weights, SPD matrices and generator defining `argmin_X Σ ωᵢ Tr f(X^{-1/2}AᵢX^{-1/2})`.
#[derive(Debug, Clone)]
pub struct MeanProblem {
    weights: Vec<f64>,
    matrices: Vec<SpdMatrix>,
    generator: Generator,
}

impl MeanProblem {
    pub fn new(weights: Vec<f64>, matrices: Vec<SpdMatrix>, generator: Generator) -> Result<Self> {
        Self::with_dim_cap(weights, matrices, generator, DEFAULT_MAX_DIM)
    }

    pub fn with_dim_cap(
        weights: Vec<f64>,
        matrices: Vec<SpdMatrix>,
        generator: Generator,
        max_dim: usize,
    ) -> Result<Self> {
        if matrices.is_empty() {
            return Err(Error::Config("a mean problem needs at least one matrix".into()));
        }
        if weights.len() != matrices.len() {
            return Err(Error::Config(format!("{} weights given for {} matrices", weights.len(), matrices.len())));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(Error::Config(format!("weights must be non-negative and finite, found {w}")));
        }
        let total: f64 = weights.iter().sum();
        if !((total - 1.0).abs() <= WEIGHT_SUM_TOL) {
            return Err(Error::Config(format!("weights must sum to 1, sum is {total}")));
        }
        let n = matrices[0].dim();
        if n > max_dim {
            return Err(Error::DimensionCap { dim: n, cap: max_dim });
        }
        if let Some(m) = matrices.iter().find(|m| m.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, found: m.dim() });
        }
        Ok(Self { weights, matrices, generator })
    }

    /// Equal weights `1/k`.
    pub fn uniform(matrices: Vec<SpdMatrix>, generator: Generator) -> Result<Self> {
        let k = matrices.len().max(1);
        Self::new(vec![1.0 / k as f64; matrices.len()], matrices, generator)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn matrices(&self) -> &[SpdMatrix] {
        &self.matrices
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].dim()
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn with_generator(&self, generator: Generator) -> Self {
        Self { generator, ..self.clone() }
    }

    /// `Σ ωᵢAᵢ`.
    pub fn arithmetic_mean(&self) -> SymMatrix {
        let n = self.dim();
        let mut acc = SymMatrix::zeros(n);
        for (w, a) in self.weights.iter().zip(&self.matrices) {
            acc = &acc + &a.as_sym().scale(*w);
        }
        acc
    }

    /// `exp(Σ ωᵢ log Aᵢ)`.
    pub fn log_euclidean_mean(&self) -> Result<SpdMatrix> {
        let n = self.dim();
        let mut acc = SymMatrix::zeros(n);
        for (w, a) in self.weights.iter().zip(&self.matrices) {
            acc = &acc + &a.eig().map(f64::ln)?.scale(*w);
        }
        SpdMatrix::from_spectral(acc.eig()?.map_spectrum(f64::exp))
    }

    /// The problem with every `Aᵢ` replaced by `CᵀAᵢC`.
    pub fn congruent(&self, c: &Matrix) -> Result<Self> {
        let matrices = self.matrices.iter().map(|a| congruence_spd(c, a)).collect::<Result<_>>()?;
        Ok(Self { matrices, ..self.clone() })
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `X #_p Y = Y^{1/2}(Y^{-1/2}XY^{-1/2})^p Y^{1/2}` for `0 ≤ p ≤ 1`.
pub fn geometric_mean(x: &SpdMatrix, y: &SpdMatrix, p: f64) -> Result<SpdMatrix> {
    check_dims(y.dim(), x.dim())?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Config(format!("geometric mean weight must lie in [0, 1], got {p}")));
    }
    if p == 0.0 {
        return Ok(y.clone());
    }
    let inner = whiten_in_basis(y.eig(), x.as_sym());
    let powered = inner.eig()?.map(|t| t.powf(p))?;
    SpdMatrix::new(unwhiten_from_basis(y.eig(), &powered))
}

/// Operator perspective `𝒫_g(A, X) = X^{1/2} g(X^{-1/2}AX^{-1/2}) X^{1/2}`.
pub fn perspective(g: &Generator, a: &SpdMatrix, x: &SpdMatrix) -> Result<SymMatrix> {
    check_dims(x.dim(), a.dim())?;
    let inner = whiten_in_basis(x.eig(), a.as_sym()).eig()?;
    let mapped = inner.map(|t| g.g(t))?;
    Ok(unwhiten_from_basis(x.eig(), &mapped))
}

/// Objective value and whitened gradient at one point, sharing `X^{±1/2}`.
#[derive(Debug, Clone)]
pub struct PointEvaluation {
    pub sqrt: SpdMatrix,
    pub inv_sqrt: SpdMatrix,
    /// `X^{-1/2} ∇F X^{-1/2} = Σ ωᵢ g(X^{-1/2}AᵢX^{-1/2})`.
    pub whitened_gradient: SymMatrix,
    pub objective: Option<f64>,
    /// First-order rounding estimate for `objective`: eigenvalue errors of
    /// the whitened matrices propagated through `f' = −g/t`.
    pub objective_noise: f64,
}

impl PointEvaluation {
    /// Riemannian gradient `Σ ωᵢ 𝒫_g(Aᵢ, X)`.
    pub fn gradient(&self) -> SymMatrix {
        sandwich(self.sqrt.as_sym(), &self.whitened_gradient)
    }

    /// Trace-metric norm `‖∇F‖_X = ‖X^{-1/2}∇F X^{-1/2}‖_F`.
    pub fn grad_norm(&self) -> f64 {
        self.whitened_gradient.frobenius()
    }
}

/// Evaluates the gradient and, if requested and available, the objective at `x`.
pub fn evaluate(problem: &MeanProblem, x: &SpdMatrix, with_objective: bool) -> Result<PointEvaluation> {
    check_dims(problem.dim(), x.dim())?;
    let (sqrt, inv_sqrt) = sqrt_and_invsqrt(x)?;
    let generator = problem.generator();
    let want_f = with_objective && generator.has_f();
    let n = x.dim();
    let mut whitened = SymMatrix::zeros(n);
    let mut objective = 0.0;
    let mut noise = 0.0;
    for (w, a) in problem.weights().iter().zip(problem.matrices()) {
        if *w == 0.0 {
            continue;
        }
        let inner: EigDecomposition = whiten_in_basis(x.eig(), a.as_sym()).eig()?;
        whitened = &whitened + &inner.map(|t| generator.g(t))?.scale(*w);
        if want_f {
            let tr = trace_of_f(generator, &inner)?;
            objective += w * tr;
            // Forming X^{-1/2}AX^{-1/2} perturbs its eigenvalues by about
            // ε·‖A‖/λ_min(X), which can far exceed ε·‖X^{-1/2}AX^{-1/2}‖.
            let shift = f64::EPSILON * (n as f64) * (a.max_eigenvalue() / x.min_eigenvalue() + inner.max().abs());
            let spread: f64 = inner.eigenvalues().iter().map(|&t| (generator.g(t) / t).abs()).sum();
            noise += w * (f64::EPSILON * tr.abs() + shift * spread);
        }
    }
    Ok(PointEvaluation {
        sqrt,
        inv_sqrt,
        whitened_gradient: from_basis(x.eig().q(), &whitened),
        objective: want_f.then_some(objective),
        objective_noise: noise,
    })
}

fn trace_of_f(generator: &Generator, inner: &EigDecomposition) -> Result<f64> {
    let mut sum = 0.0;
    for &t in inner.eigenvalues() {
        let v = generator.f(t).expect("f present");
        if !v.is_finite() {
            return Err(Error::Domain { eigenvalue: t });
        }
        sum += v;
    }
    Ok(sum)
}

/// `F_𝒜(X) = Σ ωᵢ Tr f(X^{-1/2}AᵢX^{-1/2})`.
pub fn trace_objective(problem: &MeanProblem, x: &SpdMatrix) -> Result<f64> {
    if !problem.generator().has_f() {
        return Err(Error::Unsupported(format!(
            "generator '{}' has no objective integrand f",
            problem.generator().name()
        )));
    }
    check_dims(problem.dim(), x.dim())?;
    let mut total = 0.0;
    for (w, a) in problem.weights().iter().zip(problem.matrices()) {
        if *w == 0.0 {
            continue;
        }
        let inner = whiten_in_basis(x.eig(), a.as_sym()).eig()?;
        total += w * trace_of_f(problem.generator(), &inner)?;
    }
    Ok(total)
}

/// Riemannian gradient `∇F_𝒜(X) = Σ ωᵢ 𝒫_g(Aᵢ, X)` in the trace metric.
pub fn gradient(problem: &MeanProblem, x: &SpdMatrix) -> Result<SymMatrix> {
    Ok(evaluate(problem, x, false)?.gradient())
}
