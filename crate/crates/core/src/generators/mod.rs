//! Generating functions `g` of operator means and their objective integrands `f`.
//!
//! The two are tied by `g(t) = −t·f'(t)`. A mean generator is strictly
//! decreasing with `g(1) = 0`; the objective `Tr f(X^{-1/2}AX^{-1/2})` is then
//! geodesically convex and its Riemannian gradient is the perspective of `g`.

mod transform;

pub use transform::{
    adaptive_simpson, build_f_from_g, convex_log_check, transform_table, transform_table_with, ConvexLogReport,
    TransformRow,
};

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Tolerance on `g(1) = 0`.
pub const G_AT_ONE_TOL: f64 = 1e-12;
/// Tolerance on `g(t) + t·f'(t) = 0`.
pub const TRANSFORM_TOL: f64 = 1e-9;

/// Points `2^k`, `k = −10..=10`.
pub fn dyadic_grid() -> Vec<f64> {
    (-10..=10).map(|k| 2f64.powi(k)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    OperatorConvex,
    OperatorConcave,
    Unclassified,
}

impl Classification {
    pub fn is_classified(self) -> bool {
        !matches!(self, Classification::Unclassified)
    }
}

#[derive(Clone)]
enum Family {
    Karcher,
    ShiftedLog { lambda: f64 },
    PowerConvex { p: f64 },
    PowerConcave { p: f64 },
    Custom { g: ScalarFn, f: Option<ScalarFn>, f_prime: Option<ScalarFn> },
}

/// A generating function together with its objective integrand.
#[derive(Clone)]
pub struct Generator {
    name: String,
    family: Family,
    classification: Classification,
    f_lower_bound: Option<f64>,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator")
            .field("name", &self.name)
            .field("params", &self.spec())
            .field("classification", &self.classification)
            .finish()
    }
}

impl Generator {
    /// `g(t) = −log t`, `f(t) = (log t)²/2`.
    pub fn karcher() -> Self {
        Self {
            name: "karcher".into(),
            family: Family::Karcher,
            classification: Classification::OperatorConvex,
            f_lower_bound: Some(0.0),
        }
    }

    /// `g(t) = −t/(t+λ)` shifted by `1/(1+λ)` so that `g(1) = 0`, and
    /// `f(t) = log(t+λ) − log(t)/(1+λ)`.
    pub fn shifted_log(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!(
                "shifted-log requires lambda > 0 (g is constant at lambda = 0), got {lambda}"
            )));
        }
        Ok(Self {
            name: "shifted-log".into(),
            family: Family::ShiftedLog { lambda },
            classification: Classification::OperatorConvex,
            f_lower_bound: None,
        })
    }

    /// `g(t) = p(t^{−p} − t)`, `f(t) = t^{−p} + pt`, `0 < p < 1`.
    pub fn power_convex(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Config(format!("power-convex requires 0 < p < 1, got {p}")));
        }
        Ok(Self {
            name: "power-convex".into(),
            family: Family::PowerConvex { p },
            classification: Classification::OperatorConvex,
            f_lower_bound: Some(0.0),
        })
    }

    /// `g(t) = p(1 − t^p)`, `f(t) = t^p − p·log t`, `1 ≤ p ≤ 2`.
    pub fn power_concave(p: f64) -> Result<Self> {
        if !(1.0..=2.0).contains(&p) {
            return Err(Error::Config(format!("power-concave requires 1 <= p <= 2, got {p}")));
        }
        Ok(Self {
            name: "power-concave".into(),
            family: Family::PowerConcave { p },
            classification: Classification::OperatorConcave,
            f_lower_bound: Some(1.0),
        })
    }

    /// A user-supplied generator. `g` must satisfy the mean-generator
    /// invariants; when `f_prime` is given it must match `g = −t·f'`.
    pub fn custom(
        name: impl Into<String>,
        g: ScalarFn,
        f: Option<ScalarFn>,
        f_prime: Option<ScalarFn>,
        classification: Classification,
    ) -> Result<Self> {
        let generator =
            Self { name: name.into(), family: Family::Custom { g, f, f_prime }, classification, f_lower_bound: None };
        generator.validate()?;
        Ok(generator)
    }

    /// A user-supplied `g` whose objective integrand is reconstructed by
    /// quadrature, normalized so that `f(1) = 0`.
    pub fn custom_from_g(name: impl Into<String>, g: ScalarFn, classification: Classification) -> Result<Self> {
        let f = build_f_from_g(g.clone(), &dyadic_grid())?;
        let g_for_prime = g.clone();
        let f_prime: ScalarFn = Arc::new(move |t| -g_for_prime(t) / t);
        Self::custom(name, g, Some(f), Some(f_prime), classification)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }

    pub fn f_lower_bound(&self) -> Option<f64> {
        self.f_lower_bound
    }

    pub fn has_f(&self) -> bool {
        match &self.family {
            Family::Custom { f, .. } => f.is_some(),
            _ => true,
        }
    }

    /// Parameters as they appear in problem files; `None` for custom generators.
    pub fn spec(&self) -> Option<GeneratorSpec> {
        let (p, lambda) = match self.family {
            Family::Karcher => (None, None),
            Family::ShiftedLog { lambda } => (None, Some(lambda)),
            Family::PowerConvex { p } | Family::PowerConcave { p } => (Some(p), None),
            Family::Custom { .. } => return None,
        };
        Some(GeneratorSpec { name: self.name.clone(), p, lambda })
    }

    /// The exponent `p` of the two power families.
    pub fn power(&self) -> Option<f64> {
        match self.family {
            Family::PowerConvex { p } | Family::PowerConcave { p } => Some(p),
            _ => None,
        }
    }

    pub fn is_power_convex(&self) -> bool {
        matches!(self.family, Family::PowerConvex { .. })
    }

    pub fn is_power_concave(&self) -> bool {
        matches!(self.family, Family::PowerConcave { .. })
    }

    pub fn g(&self, t: f64) -> f64 {
        match &self.family {
            Family::Karcher => -t.ln(),
            Family::ShiftedLog { lambda } => lambda * (1.0 - t) / ((1.0 + lambda) * (t + lambda)),
            Family::PowerConvex { p } => p * (t.powf(-p) - t),
            Family::PowerConcave { p } => p * (1.0 - t.powf(*p)),
            Family::Custom { g, .. } => g(t),
        }
    }

    pub fn f(&self, t: f64) -> Option<f64> {
        Some(match &self.family {
            Family::Karcher => 0.5 * t.ln() * t.ln(),
            Family::ShiftedLog { lambda } => (t + lambda).ln() - t.ln() / (1.0 + lambda),
            Family::PowerConvex { p } => t.powf(-p) + p * t,
            Family::PowerConcave { p } => t.powf(*p) - p * t.ln(),
            Family::Custom { f, .. } => return f.as_ref().map(|f| f(t)),
        })
    }

    pub fn f_prime(&self, t: f64) -> Option<f64> {
        Some(match &self.family {
            Family::Karcher => t.ln() / t,
            Family::ShiftedLog { lambda } => 1.0 / (t + lambda) - 1.0 / ((1.0 + lambda) * t),
            Family::PowerConvex { p } => p * (1.0 - t.powf(-p - 1.0)),
            Family::PowerConcave { p } => p * (t.powf(p - 1.0) - 1.0 / t),
            Family::Custom { f_prime, .. } => return f_prime.as_ref().map(|f| f(t)),
        })
    }

    /// Shared handle to `g`.
    pub fn g_fn(&self) -> ScalarFn {
        let me = self.clone();
        Arc::new(move |t| me.g(t))
    }

    /// Shared handle to `f`, if present.
    pub fn f_fn(&self) -> Option<ScalarFn> {
        if !self.has_f() {
            return None;
        }
        let me = self.clone();
        Some(Arc::new(move |t| me.f(t).expect("f present")))
    }

    /// Checks `g(1) = 0`, strict decrease on the dyadic grid and, when `f'`
    /// is known, `g(t) + t·f'(t) = 0` on the same grid.
    pub fn validate(&self) -> Result<()> {
        let g_one = self.g(1.0);
        if !(g_one.abs() <= G_AT_ONE_TOL) {
            return Err(Error::Validation(format!("{}: g(1) = {g_one:e}, expected 0", self.name)));
        }
        if let Some(defect) = decreasing_defect(|t| self.g(t), &dyadic_grid()) {
            return Err(Error::Validation(format!("{}: {defect}", self.name)));
        }
        let worst = self.transform_residual();
        if let Some(r) = worst {
            if !(r <= TRANSFORM_TOL) {
                return Err(Error::Validation(format!("{}: g(t) + t f'(t) deviates from 0 by {r:e}", self.name)));
            }
        }
        Ok(())
    }

    /// `max |g(t) + t·f'(t)|` over the dyadic grid, if `f'` is known.
    pub fn transform_residual(&self) -> Option<f64> {
        dyadic_grid()
            .into_iter()
            .map(|t| self.f_prime(t).map(|fp| (self.g(t) + t * fp).abs()))
            .try_fold(0.0f64, |m, r| r.map(|r| m.max(r)))
    }
}

/// Describes the first grid interval on which `g` fails to strictly decrease.
pub(crate) fn decreasing_defect(g: impl Fn(f64) -> f64, grid: &[f64]) -> Option<String> {
    for w in grid.windows(2) {
        let (a, b) = (g(w[0]), g(w[1]));
        if !(b < a) {
            return Some(format!("g is not strictly decreasing: g({}) = {a:e}, g({}) = {b:e}", w[0], w[1]));
        }
    }
    None
}

/// Generator as it appears in problem files: `{"name": .., "p": .., "lambda": ..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

impl GeneratorSpec {
    pub fn build(&self) -> Result<Generator> {
        registry_get(&self.name, self.p, self.lambda)
    }
}

/// Names accepted by [`registry_get`].
pub const REGISTRY_NAMES: [&str; 4] = ["karcher", "shifted-log", "power-convex", "power-concave"];

/// Looks up a registered mean generator.
pub fn registry_get(name: &str, p: Option<f64>, lambda: Option<f64>) -> Result<Generator> {
    let no_p = |what: &str| match p {
        Some(_) => Err(Error::Config(format!("{what} takes no parameter p"))),
        None => Ok(()),
    };
    let no_lambda = |what: &str| match lambda {
        Some(_) => Err(Error::Config(format!("{what} takes no parameter lambda"))),
        None => Ok(()),
    };
    let need = |v: Option<f64>, param: &str, what: &str| {
        v.ok_or_else(|| Error::Config(format!("{what} requires parameter {param}")))
    };
    match name {
        "karcher" => {
            no_p(name)?;
            no_lambda(name)?;
            Ok(Generator::karcher())
        }
        "shifted-log" => {
            no_p(name)?;
            Generator::shifted_log(need(lambda, "lambda", name)?)
        }
        "power-convex" => {
            no_lambda(name)?;
            Generator::power_convex(need(p, "p", name)?)
        }
        "power-concave" => {
            no_lambda(name)?;
            Generator::power_concave(need(p, "p", name)?)
        }
        other => {
            Err(Error::Config(format!("unknown generator '{other}' (expected one of {})", REGISTRY_NAMES.join(", "))))
        }
    }
}

/// One instance of every registered family, as used by the default suites.
pub fn default_generators() -> Vec<Generator> {
    vec![
        Generator::karcher(),
        Generator::shifted_log(1.0).expect("valid"),
        Generator::power_convex(0.5).expect("valid"),
        Generator::power_concave(1.5).expect("valid"),
        Generator::power_concave(2.0).expect("valid"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_registered() -> Vec<Generator> {
        let mut v = vec![Generator::karcher()];
        for lambda in [0.1, 1.0, 10.0] {
            v.push(Generator::shifted_log(lambda).unwrap());
        }
        for p in [0.01, 0.25, 0.5, 0.75, 0.99] {
            v.push(Generator::power_convex(p).unwrap());
        }
        for p in [1.0, 1.25, 1.5, 2.0] {
            v.push(Generator::power_concave(p).unwrap());
        }
        v
    }

    #[test]
    fn registry_examples() {
        assert_eq!(registry_get("karcher", None, None).unwrap().g(1.0), 0.0);
        let pc = registry_get("power-concave", Some(2.0), None).unwrap();
        assert!((pc.g(2.0) - (-6.0)).abs() < 1e-15);
        let pv = registry_get("power-convex", Some(0.5), None).unwrap();
        assert!((pv.f(1.0).unwrap() - 1.5).abs() < 1e-15);
    }

    #[test]
    fn registry_rejects_bad_requests() {
        assert!(registry_get("harmonic", None, None).is_err());
        assert!(registry_get("power-convex", Some(1.0), None).is_err());
        assert!(registry_get("power-convex", Some(0.0), None).is_err());
        assert!(registry_get("power-convex", None, None).is_err());
        assert!(registry_get("power-concave", Some(0.99), None).is_err());
        assert!(registry_get("power-concave", Some(2.01), None).is_err());
        assert!(registry_get("power-concave", Some(1.0), None).is_ok());
        assert!(registry_get("power-concave", Some(2.0), None).is_ok());
        assert!(registry_get("shifted-log", None, Some(0.0)).is_err());
        assert!(registry_get("shifted-log", None, Some(-1.0)).is_err());
        assert!(registry_get("karcher", Some(1.0), None).is_err());
        assert!(registry_get("power-concave", Some(1.5), Some(1.0)).is_err());
    }

    #[test]
    fn every_registered_generator_is_valid() {
        for g in all_registered() {
            g.validate().unwrap_or_else(|e| panic!("{g:?}: {e}"));
            assert!(g.g(1.0).abs() <= G_AT_ONE_TOL);
            assert!(g.transform_residual().unwrap() <= TRANSFORM_TOL, "{g:?}");
            assert!(g.classification().is_classified());
        }
    }

    #[test]
    fn declared_lower_bounds_hold() {
        for g in all_registered() {
            if let Some(bound) = g.f_lower_bound() {
                for t in dyadic_grid() {
                    assert!(g.f(t).unwrap() >= bound - 1e-12, "{g:?} at {t}");
                }
            }
        }
    }

    #[test]
    fn spec_round_trip() {
        let json = r#"{"name":"power-concave","p":1.5}"#;
        let spec: GeneratorSpec = serde_json::from_str(json).unwrap();
        let g = spec.build().unwrap();
        assert_eq!(g.spec().unwrap(), spec);
        assert_eq!(serde_json::to_string(&spec).unwrap(), json);
        assert!(serde_json::from_str::<GeneratorSpec>(r#"{"name":"karcher","q":1}"#).is_err());
    }

    #[test]
    fn custom_generator_validation() {
        let bad: ScalarFn = Arc::new(|t: f64| 1.0 - t * t.ln());
        assert!(Generator::custom("bad", bad, None, None, Classification::Unclassified).is_err());
        let off: ScalarFn = Arc::new(|t: f64| -t);
        assert!(Generator::custom("off", off, None, None, Classification::Unclassified).is_err());
        let ok: ScalarFn = Arc::new(|t: f64| 1.0 - t);
        let wrong_prime: ScalarFn = Arc::new(|t: f64| t);
        assert!(Generator::custom("m", ok.clone(), None, Some(wrong_prime), Classification::Unclassified).is_err());
        let g = Generator::custom("m", ok, None, None, Classification::Unclassified).unwrap();
        assert!(!g.has_f());
        assert!(g.f(2.0).is_none());
    }

    #[test]
    fn custom_from_g_reconstructs_integrand() {
        let g: ScalarFn = Arc::new(|t: f64| -t.ln());
        let gen = Generator::custom_from_g("log", g, Classification::OperatorConvex).unwrap();
        for t in [0.1f64, 0.5, 2.0, 9.0] {
            let expected = 0.5 * t.ln() * t.ln();
            assert!((gen.f(t).unwrap() - expected).abs() < 1e-9);
        }
    }
}
