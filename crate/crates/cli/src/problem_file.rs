use std::path::Path;

use opmeans_core::linalg::DEFAULT_MAX_DIM;
use opmeans_core::{GeneratorSpec, InitStrategy, MeanProblem, SolverConfig, SpdMatrix, SymMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Largest `|aᵢⱼ − aⱼᵢ|` accepted before symmetrizing, relative to `max(1, max|aᵢⱼ|)`.
pub const SYMMETRY_TOL: f64 = 1e-9;

/// Environment variable overriding the dimension cap.
pub const MAX_DIM_ENV: &str = "OPMEANS_MAX_DIM";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum InitName {
    Arithmetic,
    LogEuclidean,
}

impl From<InitName> for InitStrategy {
    fn from(name: InitName) -> Self {
        match name {
            InitName::Arithmetic => InitStrategy::Arithmetic,
            InitName::LogEuclidean => InitStrategy::LogEuclidean,
        }
    }
}

/// A mean problem as stored on disk. Matrices are row-major `dim²` arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub dim: usize,
    pub matrices: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    pub generator: GeneratorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grad_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init_strategy: Option<InitName>,
}

impl ProblemFile {
    /// Parses JSON; syntax and schema errors carry the line and column.
    pub fn from_json(text: &str, origin: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            let full = e.to_string();
            let suffix = format!(" at line {} column {}", e.line(), e.column());
            CliError::Parse {
                path: origin.to_string(),
                line: e.line(),
                column: e.column(),
                message: full.strip_suffix(&suffix).unwrap_or(&full).to_string(),
            }
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text, &path.display().to_string())
    }

    /// Validates every matrix and builds the problem under the given dimension cap.
    pub fn to_problem(&self, max_dim: usize) -> Result<MeanProblem> {
        if self.dim == 0 {
            return Err(CliError::Invalid("dim must be at least 1".into()));
        }
        if self.dim > max_dim {
            return Err(opmeans_core::Error::DimensionCap { dim: self.dim, cap: max_dim }.into());
        }
        let matrices = self
            .matrices
            .iter()
            .enumerate()
            .map(|(i, data)| parse_matrix(self.dim, data).map_err(|e| prefix(i, e)))
            .collect::<Result<Vec<_>>>()?;
        let generator = self.generator.build()?;
        Ok(MeanProblem::with_dim_cap(self.weights.clone(), matrices, generator, max_dim)?)
    }

    /// File overrides applied on top of `base`.
    pub fn solver_config(&self, base: SolverConfig) -> SolverConfig {
        let mut config = base;
        if let Some(tol) = self.grad_tol {
            config.grad_tol = tol;
        }
        if let Some(iters) = self.max_iters {
            config.max_iters = iters;
        }
        if let Some(init) = self.init_strategy {
            config.init = init.into();
        }
        config
    }
}

fn prefix(index: usize, e: CliError) -> CliError {
    CliError::Invalid(format!("matrices[{index}]: {e}"))
}

fn parse_matrix(n: usize, data: &[f64]) -> Result<SpdMatrix> {
    if data.len() != n * n {
        return Err(CliError::Invalid(format!("expected {} entries, found {}", n * n, data.len())));
    }
    let scale = data.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut sym = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (data[i * n + j], data[j * n + i]);
            if !((a - b).abs() <= SYMMETRY_TOL * scale) {
                return Err(CliError::Invalid(format!("not symmetric: entry ({i}, {j}) = {a} but ({j}, {i}) = {b}")));
            }
            sym.push(if i == j { a } else { 0.5 * (a + b) });
        }
    }
    Ok(SpdMatrix::new(SymMatrix::from_row_major(n, sym)?)?)
}

/// Dimension cap from `OPMEANS_MAX_DIM`, or the library default.
pub fn max_dim_from_env() -> Result<usize> {
    match std::env::var(MAX_DIM_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&d| d > 0)
            .ok_or_else(|| CliError::Usage(format!("{MAX_DIM_ENV} must be a positive integer, got '{v}'"))),
        Err(_) => Ok(DEFAULT_MAX_DIM),
    }
}
