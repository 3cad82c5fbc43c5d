//! Norms of the squeezed Coulomb kernel `1/√(x² + ε²y²)` with `x ∈ ℝ²`,
//! `y ∈ [-1, 1]`, split at `|x| = 1`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::integrate;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoulombNorms {
    pub epsilon: f64,
    /// `‖1/|r^ε| − 1/|x|‖_{L¹(B₁ × [-1,1])}`
    pub l1_defect: f64,
    /// `‖1/|r^ε| − 1/|x|‖_{L^∞(B₁ᶜ × [-1,1])}`
    pub linf_defect: f64,
    /// `∫_{B₁ × [-1,1]} 1/(x² + ε²y²)`
    pub log_divergence: f64,
}

const TOL: f64 = 1e-13;

pub fn coulomb_confined_norms(epsilon: f64) -> Result<CoulombNorms> {
    if !(epsilon > 0.0 && epsilon <= 0.5) {
        return Err(Error::OutOfRange(format!("epsilon = {epsilon} outside (0, 1/2]")));
    }
    let e2 = epsilon * epsilon;
    // polar in x, symmetric in y: 4π ∫_0^1 ∫_0^1 (1 − r/√(r² + ε²y²)) dr dy
    let l1_inner = |y: f64| integrate(|r| 1.0 - r / (r * r + e2 * y * y).sqrt(), 0.0, 1.0, TOL, TOL);
    let l1_defect = 4.0 * PI * nested(l1_inner)?;

    // 1/r − 1/√(r² + ε²y²) decreases in r and increases in |y|; scan a
    // grid anyway so the value is measured, not assumed
    let mut linf_defect = 0.0f64;
    for i in 0..=400 {
        let r = 1.0 + 9.0 * (i as f64 / 400.0).powi(2);
        for j in 0..=100 {
            let y = j as f64 / 100.0;
            linf_defect = linf_defect.max(1.0 / r - 1.0 / (r * r + e2 * y * y).sqrt());
        }
    }

    let log_inner = |y: f64| integrate(|r| r / (r * r + e2 * y * y), 0.0, 1.0, TOL, TOL);
    let log_divergence = 4.0 * PI * nested(log_inner)?;
    Ok(CoulombNorms { epsilon, l1_defect, linf_defect, log_divergence })
}

/// `∫_0^1 inner(y) dy` where `inner` is itself a quadrature.
fn nested(inner: impl Fn(f64) -> Result<f64>) -> Result<f64> {
    let failure = std::cell::Cell::new(None);
    let value = integrate(
        |y| match inner(y) {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e));
                0.0
            }
        },
        0.0,
        1.0,
        1e-12,
        1e-11,
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(value),
    }
}

/// Closed forms used as oracles.
pub fn l1_defect_closed_form(epsilon: f64) -> f64 {
    4.0 * PI * (1.0 + 0.5 * epsilon - 0.5 * (1.0 + epsilon * epsilon).sqrt() - epsilon.asinh() / (2.0 * epsilon))
}

pub fn log_divergence_closed_form(epsilon: f64) -> f64 {
    let e = epsilon;
    // ∫_0^1 ln(1 + ε²y²) dy = ln(1 + ε²) − 2 + 2 atan(ε)/ε
    let a = (1.0 + e * e).ln() - 2.0 + 2.0 * e.atan() / e;
    2.0 * PI * (a - 2.0 * e.ln() + 2.0)
}
