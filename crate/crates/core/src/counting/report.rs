use serde::{Deserialize, Serialize};

use super::{alpha_beta_from_distribution, density_matrix, grad_q_norm, occupation_distribution, trace_distance, Condensate};
use crate::error::Result;
use crate::manybody::{manybody_energy, ManyBodyState};
use crate::model::ModelSpec;
use crate::onebody::{effective_energy, OneBodyState};

/// Counting functionals of one many-body state against the condensate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CountingReport {
    pub t: f64,
    pub alpha: f64,
    pub beta: f64,
    pub beta_tilde: f64,
    pub p_k: Vec<f64>,
    pub trace_distance: f64,
    #[serde(rename = "E_psi")]
    pub e_psi: f64,
    #[serde(rename = "E_phi")]
    pub e_phi: f64,
    pub grad_q_sq: f64,
}

impl CountingReport {
    pub const CSV_HEADER: &'static str = "t,alpha,beta,beta_tilde,trace_distance,E_psi,E_phi,grad_q_sq,p_k";

    /// One CSV row; `p_k` entries are joined with `;`.
    pub fn csv_row(&self) -> String {
        let pk: Vec<String> = self.p_k.iter().map(|v| format!("{v:.17e}")).collect();
        format!(
            "{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{}",
            self.t,
            self.alpha,
            self.beta,
            self.beta_tilde,
            self.trace_distance,
            self.e_psi,
            self.e_phi,
            self.grad_q_sq,
            pk.join(";")
        )
    }
}

pub fn counting_report(psi: &ManyBodyState, onebody: &OneBodyState, spec: &ModelSpec) -> Result<CountingReport> {
    let cond = Condensate::from_grid(&onebody.product())?;
    let view = psi.view();
    let p_k = occupation_distribution(&view, &cond)?;
    let (alpha, beta) = alpha_beta_from_distribution(&p_k);
    let gamma = density_matrix(&view);
    let trace = trace_distance(&gamma, &cond)?;
    let e_psi = manybody_energy(psi, spec)?;
    let e_phi = effective_energy(onebody, spec)?;
    Ok(CountingReport {
        t: psi.t,
        alpha,
        beta,
        beta_tilde: super::beta_tilde(beta, e_psi, e_phi),
        p_k,
        trace_distance: trace,
        e_psi,
        e_phi,
        grad_q_sq: grad_q_norm(psi, &cond)?,
    })
}
