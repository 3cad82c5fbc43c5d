use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const S0: f64 = 6.0 / 5.0;

/// Which convergence statement a rate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "kebab-case")]
pub enum RateSpec {
    Thm1,
    /// Singular part of `w` in `L^s`.
    Thm2 { s: f64 },
    /// θ-scaled interaction, optionally with the coupling `ε = N^{-ν}`.
    Thm3 {
        theta: f64,
        #[serde(default)]
        nu: Option<f64>,
    },
    /// Improved exponent from the cutoff splitting at `c = N^ϑ`.
    AppendixC {
        s: f64,
        #[serde(default = "default_s0")]
        s0: f64,
    },
}

fn default_s0() -> f64 {
    S0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateExponent {
    /// Exponent of the counting functional.
    pub eta: f64,
    /// Exponent of the trace distance, half of `eta`.
    pub eta_trace: f64,
}

impl RateExponent {
    fn new(eta: f64) -> Self {
        Self { eta, eta_trace: 0.5 * eta }
    }
}

impl RateSpec {
    pub fn validate(&self) -> Result<()> {
        match *self {
            RateSpec::Thm1 => Ok(()),
            RateSpec::Thm2 { s } => check_s(s, S0),
            RateSpec::AppendixC { s, s0 } => {
                if !(s0 > 1.0) {
                    return Err(Error::OutOfRange(format!("s0 = {s0} must exceed 1")));
                }
                check_s(s, s0)
            }
            RateSpec::Thm3 { theta, nu } => {
                if !(theta > 0.25 && theta < 1.0 / 3.0) {
                    return Err(Error::OutOfRange(format!("theta = {theta} outside (1/4, 1/3)")));
                }
                if let Some(nu) = nu {
                    let hi = theta / (1.0 - 2.0 * theta);
                    if !(nu > 0.5 && nu < hi) {
                        return Err(Error::OutOfRange(format!("nu = {nu} outside (1/2, {hi})")));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            RateSpec::Thm1 => "thm1",
            RateSpec::Thm2 { .. } => "thm2",
            RateSpec::Thm3 { .. } => "thm3",
            RateSpec::AppendixC { .. } => "appendix-c",
        }
    }
}

fn check_s(s: f64, s0: f64) -> Result<()> {
    if !(s > s0 && s <= 2.0) {
        return Err(Error::OutOfRange(format!("s = {s} outside ({s0}, 2]")));
    }
    Ok(())
}

pub fn rate_exponent(spec: &RateSpec) -> Result<RateExponent> {
    spec.validate()?;
    let eta = match *spec {
        RateSpec::Thm1 => 1.0,
        RateSpec::Thm2 { s } => (5.0 * s - 6.0) / (4.0 * s),
        RateSpec::Thm3 { theta, .. } => thm3_branch(theta),
        RateSpec::AppendixC { s, s0 } => {
            let r = s / s0;
            (r - 1.0) / (2.0 * r - 0.5 * s - 1.0)
        }
    };
    Ok(RateExponent::new(eta))
}

/// Closed-form optimum for the θ-scaled regime.
pub fn thm3_branch(theta: f64) -> f64 {
    if theta <= 7.0 / 24.0 {
        (4.0 * theta - 1.0) / (3.0 - 4.0 * theta)
    } else {
        (1.0 - 3.0 * theta) / (4.0 - 9.0 * theta)
    }
}

/// Log_N of the four competing error terms
/// `N^{-2θ}ε^{4θ-2}`, `N^{1/2}ε`, `N^{-1/2+3θ/2+δ/4}ε^{1-3θ}`, `N^{-δ/2}`
/// at `ε = N^{-ν}`.
pub fn thm3_term_exponents(theta: f64, delta: f64, nu: f64) -> [f64; 4] {
    [
        -2.0 * theta - nu * (4.0 * theta - 2.0),
        0.5 - nu,
        -0.5 + 1.5 * theta + 0.25 * delta - nu * (1.0 - 3.0 * theta),
        -0.5 * delta,
    ]
}

/// Optimum of the four-term error over `(δ, ν)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thm3Optimum {
    pub eta: f64,
    pub delta: f64,
    pub nu: f64,
}

/// Minimizes the largest term exponent over `δ ∈ [0, 2]` and the admissible
/// ν window. Each term is affine in `(δ, ν)`, so this is a linear program in
/// `(δ, ν, t)`; its optimum sits on a vertex, found by enumerating triples of
/// active constraints.
pub fn thm3_optimum(theta: f64) -> Result<Thm3Optimum> {
    RateSpec::Thm3 { theta, nu: None }.validate()?;
    let (nu_lo, nu_hi) = (0.5, theta / (1.0 - 2.0 * theta));
    // rows [a_δ, a_ν, a_t, b] meaning a·(δ, ν, t) ≤ b
    let base = thm3_term_exponents(theta, 0.0, 0.0);
    let d_delta: Vec<f64> = (0..4).map(|i| thm3_term_exponents(theta, 1.0, 0.0)[i] - base[i]).collect();
    let d_nu: Vec<f64> = (0..4).map(|i| thm3_term_exponents(theta, 0.0, 1.0)[i] - base[i]).collect();
    let mut rows: Vec<[f64; 4]> = (0..4).map(|i| [d_delta[i], d_nu[i], -1.0, -base[i]]).collect();
    rows.push([-1.0, 0.0, 0.0, 0.0]);
    rows.push([1.0, 0.0, 0.0, 2.0]);
    rows.push([0.0, -1.0, 0.0, -nu_lo]);
    rows.push([0.0, 1.0, 0.0, nu_hi]);
    let mut best: Option<Thm3Optimum> = None;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            for k in j + 1..rows.len() {
                let m = nalgebra::Matrix3::new(
                    rows[i][0], rows[i][1], rows[i][2], rows[j][0], rows[j][1], rows[j][2], rows[k][0], rows[k][1],
                    rows[k][2],
                );
                let Some(inv) = m.try_inverse() else { continue };
                let x = inv * nalgebra::Vector3::new(rows[i][3], rows[j][3], rows[k][3]);
                let feasible = rows.iter().all(|r| r[0] * x[0] + r[1] * x[1] + r[2] * x[2] <= r[3] + 1e-12);
                if feasible && best.is_none_or(|b| -x[2] > b.eta) {
                    best = Some(Thm3Optimum { eta: -x[2], delta: x[0], nu: x[1] });
                }
            }
        }
    }
    best.ok_or_else(|| Error::InvalidParameter("no feasible vertex".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thm1_and_thm2_endpoints() {
        assert_eq!(rate_exponent(&RateSpec::Thm1).unwrap(), RateExponent { eta: 1.0, eta_trace: 0.5 });
        let r = rate_exponent(&RateSpec::Thm2 { s: 2.0 }).unwrap();
        assert!((r.eta - 0.5).abs() < 1e-15 && (r.eta_trace - 0.25).abs() < 1e-15);
        let near = rate_exponent(&RateSpec::Thm2 { s: S0 + 1e-9 }).unwrap().eta;
        assert!(near > 0.0 && near < 1e-8);
        assert!(rate_exponent(&RateSpec::Thm2 { s: 1.2 }).is_err());
        assert!(rate_exponent(&RateSpec::Thm2 { s: 2.1 }).is_err());
    }

    #[test]
    fn thm3_branches_meet_at_seven_twentyfourths() {
        let t: f64 = 7.0 / 24.0;
        let a = (4.0 * t - 1.0) / (3.0 - 4.0 * t);
        let b = (1.0 - 3.0 * t) / (4.0 - 9.0 * t);
        assert!((a - 1.0 / 11.0).abs() < 1e-15 && (b - 1.0 / 11.0).abs() < 1e-15);
        let r = rate_exponent(&RateSpec::Thm3 { theta: t, nu: None }).unwrap();
        assert!((r.eta - 1.0 / 11.0).abs() < 1e-15);
        assert!((r.eta_trace - 1.0 / 22.0).abs() < 1e-15);
        for v in thm3_term_exponents(t, 2.0 / 11.0, 13.0 / 22.0) {
            assert!((v + 1.0 / 11.0).abs() < 1e-14, "{v}");
        }
    }

    #[test]
    fn numerical_optimum_matches_closed_form() {
        for i in 1..20 {
            let theta = 0.25 + (1.0 / 3.0 - 0.25) * i as f64 / 20.0;
            let opt = thm3_optimum(theta).unwrap();
            assert!((opt.eta - thm3_branch(theta)).abs() < 1e-9, "theta {theta}: {} vs {}", opt.eta, thm3_branch(theta));
        }
        let opt = thm3_optimum(7.0 / 24.0).unwrap();
        assert!((opt.eta - 1.0 / 11.0).abs() < 1e-9);
    }

    #[test]
    fn thm3_window_is_enforced() {
        assert!(rate_exponent(&RateSpec::Thm3 { theta: 0.25, nu: None }).is_err());
        assert!(rate_exponent(&RateSpec::Thm3 { theta: 0.3, nu: Some(0.5) }).is_err());
        assert!(rate_exponent(&RateSpec::Thm3 { theta: 0.3, nu: Some(0.6) }).is_ok());
    }

    #[test]
    fn improved_exponent_dominates() {
        let r = rate_exponent(&RateSpec::AppendixC { s: 2.0, s0: S0 }).unwrap();
        assert!((r.eta - 0.5).abs() < 1e-14);
        let mut s = 1.25;
        while s < 2.0 - 1e-9 {
            let c = rate_exponent(&RateSpec::AppendixC { s, s0: S0 }).unwrap().eta;
            let t = rate_exponent(&RateSpec::Thm2 { s }).unwrap().eta;
            assert!(c > t, "s = {s}: {c} <= {t}");
            s += 0.05;
        }
    }
}
