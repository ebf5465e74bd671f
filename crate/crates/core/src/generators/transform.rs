use std::sync::Arc;

use rand::Rng;
use serde::Serialize;

use super::{decreasing_defect, dyadic_grid, ScalarFn, G_AT_ONE_TOL};
use crate::error::{Error, Result};
use crate::random::{log_uniform, sample_rng};

/// Absolute tolerance of the quadrature behind [`build_f_from_g`].
pub const QUADRATURE_TOL: f64 = 1e-12;
const MAX_DEPTH: u32 = 40;

/// A pair `(f, g = −t·f')` together with whether `g` generates a mean.
#[derive(Clone)]
pub struct TransformRow {
    pub label: String,
    pub f: ScalarFn,
    pub g: ScalarFn,
    /// Why `g` is not a mean generator as written, if it is not.
    pub defect: Option<String>,
    /// Registry entry derived from this row, if any.
    pub registry_name: Option<&'static str>,
}

impl TransformRow {
    pub fn is_mean_generator(&self) -> bool {
        self.defect.is_none()
    }
}

impl std::fmt::Debug for TransformRow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TransformRow")
            .field("label", &self.label)
            .field("defect", &self.defect)
            .field("registry_name", &self.registry_name)
            .finish()
    }
}

fn row(label: String, f: ScalarFn, g: ScalarFn, registry_name: Option<&'static str>) -> TransformRow {
    let g_one = g(1.0);
    let defect = if !(g_one.abs() <= G_AT_ONE_TOL) {
        Some(format!("g(1) = {g_one} is not 0"))
    } else {
        decreasing_defect(|t| g(t), &dyadic_grid())
    };
    TransformRow { label, f, g, defect, registry_name }
}

/// The four elementary `(f, g)` pairs with `λ = 1` and `p = 1`.
pub fn transform_table() -> Vec<TransformRow> {
    transform_table_with(1.0, 1.0)
}

/// The four elementary `(f, g)` pairs for the given `λ ≥ 0` and `p`.
///
/// Only `(log t)²/2 ↦ −log t` is a mean generator as written. The shifted
/// logarithm has `g(1) = −1/(1+λ)` and enters the registry recentered;
/// `t·log t − t` gives a non-monotone `g`; `t^p` gives `g(1) = −p`.
pub fn transform_table_with(lambda: f64, p: f64) -> Vec<TransformRow> {
    vec![
        row(
            format!("f(t) = log(t + {lambda})"),
            Arc::new(move |t| (t + lambda).ln()),
            Arc::new(move |t| -t / (t + lambda)),
            Some("shifted-log"),
        ),
        row(
            "f(t) = (log t)^2 / 2".into(),
            Arc::new(|t: f64| 0.5 * t.ln() * t.ln()),
            Arc::new(|t: f64| -t.ln()),
            Some("karcher"),
        ),
        row("f(t) = t log t - t".into(), Arc::new(|t: f64| t * t.ln() - t), Arc::new(|t: f64| -t * t.ln()), None),
        row(format!("f(t) = t^{p}"), Arc::new(move |t: f64| t.powf(p)), Arc::new(move |t: f64| -p * t.powf(p)), None),
    ]
}

/// Adaptive Simpson quadrature of `h` over `[a, b]` (either orientation).
pub fn adaptive_simpson(h: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (h(a), h(m), h(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(h, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    h: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (h(lm), h(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    // Below this the estimate is dominated by rounding, not truncation.
    let noise = 64.0 * f64::EPSILON * (left.abs() + right.abs());
    if depth == 0 || delta.abs() <= 15.0 * tol.max(noise) {
        return left + right + delta / 15.0;
    }
    simpson_step(h, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(h, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Reconstructs the objective integrand from a strictly decreasing `g`.
///
/// With `Φ'(x) = −g(eˣ)` and `Φ(0) = 0`, returns `f(t) = Φ(log t)`, evaluated
/// by adaptive quadrature. Then `−t·f'(t) = g(t)` and `f(1) = 0`.
pub fn build_f_from_g(g: ScalarFn, grid: &[f64]) -> Result<ScalarFn> {
    if grid.iter().any(|&t| !(t > 0.0 && t.is_finite())) {
        return Err(Error::Validation("grid points must be positive and finite".into()));
    }
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    if let Some(defect) = decreasing_defect(|t| g(t), &sorted) {
        return Err(Error::Validation(defect));
    }
    Ok(Arc::new(move |t: f64| {
        let phi_prime = |x: f64| -g(x.exp());
        adaptive_simpson(&phi_prime, 0.0, t.ln(), QUADRATURE_TOL)
    }))
}

/// Outcome of [`convex_log_check`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvexLogReport {
    pub samples: usize,
    pub violations: usize,
    /// Largest `f(t^p s^{1−p}) − p f(t) − (1−p) f(s)`, clipped at zero.
    pub max_violation: f64,
}

/// Samples `f(t^p s^{1−p}) ≤ p f(t) + (1−p) f(s)` at seeded random points,
/// `t, s` log-uniform in `[1e-3, 1e3]` and `p` uniform in `[0, 1]`.
pub fn convex_log_check(f: &dyn Fn(f64) -> f64, samples: usize, seed: u64) -> ConvexLogReport {
    let mut violations = 0;
    let mut max_violation = 0.0f64;
    for i in 0..samples {
        let mut rng = sample_rng(seed, i as u64);
        let t = log_uniform(&mut rng, 1e-3, 1e3);
        let s = log_uniform(&mut rng, 1e-3, 1e3);
        let p: f64 = rng.random();
        let (ft, fs) = (f(t), f(s));
        let lhs = f(t.powf(p) * s.powf(1.0 - p));
        let rhs = p * ft + (1.0 - p) * fs;
        let gap = lhs - rhs;
        if gap > 1e-12 * (1.0 + ft.abs().max(fs.abs())) {
            violations += 1;
        }
        max_violation = max_violation.max(gap);
    }
    ConvexLogReport { samples, violations, max_violation }
}
