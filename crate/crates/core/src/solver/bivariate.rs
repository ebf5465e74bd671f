//! Two-matrix means through the scalar representing function.
//!
//! For a congruence-invariant mean of two matrices,
//! `X_g(ω; A₁, A₂) = A₂^{1/2} φ(A₂^{-1/2}A₁A₂^{-1/2}) A₂^{1/2}` where
//! `x = φ(t)` solves `ω₁ g(t/x) + ω₂ g(1/x) = 0`.

use crate::error::{Error, Result};
use crate::generators::Generator;
use crate::linalg::{unwhiten_from_basis, whiten_in_basis, SpdMatrix};

/// Residual `|ω₁ g(t/x) + ω₂ g(1/x)|` expected at a returned root.
pub const PHI_RESIDUAL_TOL: f64 = 1e-12;
const BRACKET_MARGIN: f64 = 1e-3;
const MAX_DOUBLINGS: usize = 60;

fn check_pair(weights: (f64, f64)) -> Result<()> {
    let (w1, w2) = weights;
    if !(w1 >= 0.0 && w2 >= 0.0) || !((w1 + w2 - 1.0).abs() <= 1e-12) {
        return Err(Error::Config(format!("weights ({w1}, {w2}) are not a probability pair")));
    }
    Ok(())
}

/// Root `x` of `h(x) = ω₁ g(t/x) + ω₂ g(1/x)` by bisection.
///
/// `h` increases in `x` and changes sign between `min(t, 1)` and
/// `max(t, 1)`; the bracket is widened geometrically only if the scalar `g`
/// misbehaves numerically.
pub fn representing_phi(generator: &Generator, weights: (f64, f64), t: f64) -> Result<f64> {
    check_pair(weights)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Config(format!("representing function needs t > 0, got {t}")));
    }
    if t == 1.0 {
        return Ok(1.0);
    }
    let (w1, w2) = weights;
    let h = |x: f64| w1 * generator.g(t / x) + w2 * generator.g(1.0 / x);

    let mut lo = t.min(1.0) * (1.0 - BRACKET_MARGIN);
    let mut hi = t.max(1.0) * (1.0 + BRACKET_MARGIN);
    let mut doublings = 0;
    while !(h(lo) <= 0.0) {
        lo *= 0.5;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::RootBracketing { t, doublings });
        }
    }
    while !(h(hi) >= 0.0) {
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::RootBracketing { t, doublings });
        }
    }

    let (mut h_lo, mut h_hi) = (h(lo), h(hi));
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let h_mid = h(mid);
        if h_mid.is_nan() {
            return Err(Error::Domain { eigenvalue: mid });
        }
        if h_mid == 0.0 {
            return Ok(mid);
        }
        if h_mid < 0.0 {
            lo = mid;
            h_lo = h_mid;
        } else {
            hi = mid;
            h_hi = h_mid;
        }
    }
    Ok(if h_lo.abs() <= h_hi.abs() { lo } else { hi })
}

/// Printed closed forms of the representing function for equal weights:
/// `((t+1)/(t^{−p}+1))^{1/(p+1)}` for power-convex and `((t^p+1)/2)^{1/p}`
/// for power-concave generators.
pub fn closed_form_phi(generator: &Generator, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Config(format!("representing function needs t > 0, got {t}")));
    }
    match generator.power() {
        Some(p) if generator.is_power_convex() => Ok(((t + 1.0) / (t.powf(-p) + 1.0)).powf(1.0 / (p + 1.0))),
        Some(p) if generator.is_power_concave() => Ok(((t.powf(p) + 1.0) / 2.0).powf(1.0 / p)),
        _ => Err(Error::Unsupported(format!(
            "no closed-form representing function for generator '{}'",
            generator.name()
        ))),
    }
}

/// `A₂^{1/2} φ(A₂^{-1/2}A₁A₂^{-1/2}) A₂^{1/2}` with `φ` from [`representing_phi`].
///
/// The reduction relies on congruence invariance, so the generator must be
/// classified operator convex or operator concave.
pub fn bivariate_mean(generator: &Generator, weights: (f64, f64), a1: &SpdMatrix, a2: &SpdMatrix) -> Result<SpdMatrix> {
    check_pair(weights)?;
    if !generator.classification().is_classified() {
        return Err(Error::Unsupported(format!(
            "generator '{}' is not classified; the two-matrix reduction needs congruence invariance",
            generator.name()
        )));
    }
    if a1.dim() != a2.dim() {
        return Err(Error::DimensionMismatch { expected: a2.dim(), found: a1.dim() });
    }
    let inner = whiten_in_basis(a2.eig(), a1.as_sym()).eig()?;
    let phi = inner.try_map(|t| representing_phi(generator, weights, t))?;
    SpdMatrix::new(unwhiten_from_basis(a2.eig(), &phi))
}
