use std::collections::BTreeMap;

use serde::Serialize;

use super::gronwall::{envelope_with_constant, fit_constant, EnvelopeInput};
use super::rates::{rate_exponent, RateSpec};
use super::thm::{defect_f, thm1_integrand, thm2_integrand, thm3_integrand, OneBodyDiagnostics, Thm1Norms};
use crate::counting::CountingReport;
use crate::error::{Error, Result};
use crate::model::{ModelSpec, Regime};

/// Evaluated envelope next to the measured functional.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub regime: String,
    pub parameters: BTreeMap<String, f64>,
    pub eta: f64,
    pub eta_trace: f64,
    pub times: Vec<f64>,
    pub envelope: Vec<f64>,
    /// α for the θ = 0 statement, β for the singular one, β̃ for θ > 0.
    pub measured: Vec<f64>,
    /// Constant multiplying the rate function; `None` when the explicit
    /// coefficient is used.
    pub fitted_constant: Option<f64>,
    pub below_envelope: bool,
    pub notes: Vec<String>,
}

/// Builds the envelope for `rate` along a trajectory.
///
/// `constant` multiplies `g(t)` for the statements whose constant is not
/// explicit; with `None` the smallest admissible constant is fitted and the
/// check becomes a diagnostic. The θ = 0 statement always uses its explicit
/// coefficient.
pub fn thm_bound_report(
    trajectory: &[CountingReport],
    diagnostics: &[OneBodyDiagnostics],
    spec: &ModelSpec,
    rate: &RateSpec,
    constant: Option<f64>,
) -> Result<BoundReport> {
    if trajectory.is_empty() || trajectory.len() != diagnostics.len() {
        return Err(Error::InvalidParameter("trajectory and diagnostics must be nonempty and aligned".into()));
    }
    for (r, d) in trajectory.iter().zip(diagnostics) {
        if (r.t - d.t).abs() > 1e-9 * r.t.abs().max(1.0) {
            return Err(Error::InvalidParameter(format!("sample times differ: {} vs {}", r.t, d.t)));
        }
    }
    let exps = rate_exponent(rate)?;
    let n = spec.n_particles as f64;
    let times: Vec<f64> = trajectory.iter().map(|r| r.t).collect();
    let mut parameters = BTreeMap::new();
    parameters.insert("N".to_string(), n);
    parameters.insert("epsilon".to_string(), spec.epsilon());
    parameters.insert("theta".to_string(), spec.theta);
    let mut notes = Vec::new();

    let (input, measured, explicit) = match rate {
        RateSpec::Thm1 => {
            if spec.regime != Regime::HartreeTheta0 {
                return Err(Error::RegimeMismatch("the explicit envelope needs θ = 0".into()));
            }
            let norms = Thm1Norms::from_spec(spec)?;
            let sup: Vec<_> = diagnostics.iter().map(|d| d.sup).collect();
            let f = defect_f(spec)?;
            parameters.insert("f_epsilon".to_string(), f);
            parameters.insert("norm_sum".to_string(), norms.sum());
            let input = EnvelopeInput {
                initial: trajectory[0].alpha,
                defect: f + 1.0 / n,
                times: times.clone(),
                integrand: thm1_integrand(&norms, &sup),
            };
            (input, trajectory.iter().map(|r| r.alpha).collect::<Vec<_>>(), true)
        }
        RateSpec::Thm2 { s } | RateSpec::AppendixC { s, .. } => {
            let f = defect_f(spec)?;
            let gap = (trajectory[0].e_psi - trajectory[0].e_phi).abs();
            parameters.insert("s".to_string(), *s);
            parameters.insert("f_epsilon".to_string(), f);
            parameters.insert("energy_gap".to_string(), gap);
            notes.push("energy gap enters as |E_psi - E_phi| at t = 0".to_string());
            let input = EnvelopeInput {
                initial: trajectory[0].beta,
                defect: gap + f + n.powf(-exps.eta),
                times: times.clone(),
                integrand: thm2_integrand(diagnostics),
            };
            (input, trajectory.iter().map(|r| r.beta).collect(), false)
        }
        RateSpec::Thm3 { theta, nu } => {
            if spec.regime != Regime::NlsTheta {
                return Err(Error::RegimeMismatch("the θ > 0 envelope needs the nls regime".into()));
            }
            parameters.insert("theta".to_string(), *theta);
            if let Some(nu) = nu {
                parameters.insert("nu".to_string(), *nu);
            }
            notes.push("h(t) is taken equal to g(t)".to_string());
            let input = EnvelopeInput {
                initial: trajectory[0].beta_tilde,
                defect: n.powf(-exps.eta),
                times: times.clone(),
                integrand: thm3_integrand(diagnostics),
            };
            (input, trajectory.iter().map(|r| r.beta_tilde).collect(), false)
        }
    };

    let (c, fitted) = if explicit {
        (1.0, None)
    } else if let Some(c) = constant {
        (c, Some(c))
    } else {
        notes.push("constant fitted to the measured series; diagnostic only".to_string());
        match fit_constant(&input, &measured)? {
            Some(c) => (c, Some(c)),
            None => {
                notes.push("no constant up to 1e8 brings the series below the envelope".to_string());
                (1e8, None)
            }
        }
    };
    let envelope = envelope_with_constant(&input, c)?;
    let below_envelope = envelope
        .iter()
        .zip(&measured)
        .all(|(e, m)| *m <= *e + 1e-12 * m.abs().max(1.0));
    Ok(BoundReport {
        regime: rate.name().to_string(),
        parameters,
        eta: exps.eta,
        eta_trace: exps.eta_trace,
        times,
        envelope,
        measured,
        fitted_constant: fitted,
        below_envelope,
        notes,
    })
}
