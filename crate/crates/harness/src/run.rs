//! Single-configuration runs.

use std::path::Path;

use mfl_core::bounds::{
    coulomb_confined_norms, onebody_diagnostics, thm_bound_report, BoundReport, CoulombNorms, OneBodyDiagnostics,
    RateSpec,
};
use mfl_core::container::{write_grid_function, write_manybody};
use mfl_core::counting::{counting_report, CountingReport};
use mfl_core::manybody::{check_memory, evolve_manybody_with, manybody_energy, ManyBodyState};
use mfl_core::model::{ModelSpec, Regime};
use mfl_core::onebody::{chi_mode, effective_energy, evolve_effective, gaussian_packet, step_count, sup_norms, OneBodyState};
use serde::Serialize;

use crate::config::{ExperimentConfig, InitialData, RunConfig};
use crate::error::{HarnessError, HarnessResult};
use crate::io::{plot_stub, write_atomic, write_csv, write_json};

pub fn initial_state(spec: &ModelSpec, init: &InitialData) -> HarnessResult<OneBodyState> {
    let phi = gaussian_packet(&spec.domain.free, &init.center, init.width, &init.momentum)?;
    Ok(OneBodyState::new(phi, chi_mode(&spec.domain.confined, spec.mode)?)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct OneBodyRow {
    pub t: f64,
    pub mass: f64,
    #[serde(rename = "E_phi")]
    pub e_phi: f64,
    pub sup_phi: f64,
    pub sup_big_phi: f64,
    pub h2_phi: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ManyBodyRow {
    pub t: f64,
    pub norm_sqr: f64,
    #[serde(rename = "E_psi")]
    pub e_psi: f64,
    pub symmetry_residual: f64,
}

/// Counting reports and one-body diagnostics at common sample times.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub onebody: Vec<OneBodyState>,
    pub reports: Vec<CountingReport>,
    pub diagnostics: Vec<OneBodyDiagnostics>,
    pub last: ManyBodyState,
}

fn record_config(cfg: &ExperimentConfig, out: &Path) -> HarnessResult<()> {
    write_atomic(&out.join("config.toml"), cfg.to_toml()?.as_bytes())
}

fn onebody_row(s: &OneBodyState, spec: &ModelSpec) -> HarnessResult<OneBodyRow> {
    let sup = sup_norms(s);
    Ok(OneBodyRow {
        t: s.t,
        mass: s.phi.norm_sqr(),
        e_phi: effective_energy(s, spec)?,
        sup_phi: sup.sup_phi,
        sup_big_phi: sup.sup_big_phi,
        h2_phi: sup.h2_phi,
    })
}

pub fn simulate_onebody(cfg: &ExperimentConfig, out: &Path) -> HarnessResult<Vec<OneBodyRow>> {
    let spec = &cfg.model;
    let r = &cfg.run;
    let states = evolve_effective(&initial_state(spec, &cfg.initial)?, spec, r.horizon, r.dt, r.stride)?;
    let rows = states.iter().map(|s| onebody_row(s, spec)).collect::<HarnessResult<Vec<_>>>()?;
    record_config(cfg, out)?;
    write_csv(&out.join("onebody.csv"), &rows)?;
    write_atomic(&out.join("onebody.py"), plot_stub("onebody.csv", "t", &["mass", "E_phi", "sup_phi"], false).as_bytes())?;
    let last = states.last().expect("evolution returns the initial state");
    let mut buf = Vec::new();
    write_grid_function(&mut buf, &last.product(), last.t)?;
    write_atomic(&out.join("onebody_final.mfl"), &buf)?;
    Ok(rows)
}

pub fn simulate_manybody(cfg: &ExperimentConfig, out: &Path) -> HarnessResult<Vec<ManyBodyRow>> {
    let spec = &cfg.model;
    let r = &cfg.run;
    check_memory(spec.n_particles, &spec.domain, cfg.memory_cap)?;
    let psi0 = ManyBodyState::product(&initial_state(spec, &cfg.initial)?.product(), spec.n_particles)?;
    let mut rows = Vec::new();
    let last = evolve_manybody_with(&psi0, spec, r.horizon, r.dt, r.stride, cfg.memory_cap, |s| {
        rows.push(ManyBodyRow {
            t: s.t,
            norm_sqr: s.norm_sqr(),
            e_psi: manybody_energy(s, spec)?,
            symmetry_residual: s.symmetry_residual(),
        });
        Ok(())
    })?;
    record_config(cfg, out)?;
    write_csv(&out.join("manybody.csv"), &rows)?;
    let mut buf = Vec::new();
    write_manybody(&mut buf, &last)?;
    write_atomic(&out.join("manybody_final.mfl"), &buf)?;
    Ok(rows)
}

/// Evolves both descriptions side by side and evaluates the counting
/// functionals at every sample.
pub fn trajectory(
    spec: &ModelSpec,
    run: &RunConfig,
    init: &InitialData,
    memory_cap: u64,
    stride: usize,
) -> HarnessResult<Trajectory> {
    check_memory(spec.n_particles, &spec.domain, memory_cap)?;
    let onebody = evolve_effective(&initial_state(spec, init)?, spec, run.horizon, run.dt, stride)?;
    let psi0 = ManyBodyState::product(&onebody[0].product(), spec.n_particles)?;
    let mut reports = Vec::with_capacity(onebody.len());
    let last = evolve_manybody_with(&psi0, spec, run.horizon, run.dt, stride, memory_cap, |s| {
        let o = &onebody[reports.len()];
        reports.push(counting_report(s, o, spec)?);
        Ok(())
    })?;
    let diagnostics = onebody
        .iter()
        .map(|o| onebody_diagnostics(o, spec))
        .collect::<mfl_core::Result<Vec<_>>>()?;
    Ok(Trajectory {
        onebody,
        reports,
        diagnostics,
        last,
    })
}

fn write_counting(path: &Path, reports: &[CountingReport]) -> HarnessResult<()> {
    let mut text = String::from(CountingReport::CSV_HEADER);
    text.push('\n');
    for r in reports {
        text.push_str(&r.csv_row());
        text.push('\n');
    }
    write_atomic(path, text.as_bytes())
}

pub fn run_single(cfg: &ExperimentConfig, out: &Path) -> HarnessResult<Trajectory> {
    let traj = trajectory(&cfg.model, &cfg.run, &cfg.initial, cfg.memory_cap, cfg.run.stride)?;
    record_config(cfg, out)?;
    write_counting(&out.join("counting.csv"), &traj.reports)?;
    let rows = traj
        .onebody
        .iter()
        .map(|s| onebody_row(s, &cfg.model))
        .collect::<HarnessResult<Vec<_>>>()?;
    write_csv(&out.join("onebody.csv"), &rows)?;
    write_atomic(
        &out.join("counting.py"),
        plot_stub("counting.csv", "t", &["alpha", "beta", "trace_distance"], false).as_bytes(),
    )?;
    Ok(traj)
}

/// The rate used when the config names none.
pub fn default_rate(spec: &ModelSpec) -> RateSpec {
    match spec.regime {
        Regime::HartreeTheta0 => RateSpec::Thm1,
        Regime::NlsTheta => RateSpec::Thm3 {
            theta: spec.theta,
            nu: spec.nu,
        },
    }
}

#[derive(Debug, Clone, Serialize)]
struct EnvelopeRow {
    t: f64,
    measured: f64,
    envelope: f64,
}

pub fn run_bounds(cfg: &ExperimentConfig, out: &Path) -> HarnessResult<BoundReport> {
    let traj = run_single(cfg, out)?;
    let (rate, constant) = match &cfg.bounds {
        Some(b) => (b.rate, b.constant),
        None => (default_rate(&cfg.model), None),
    };
    let report = thm_bound_report(&traj.reports, &traj.diagnostics, &cfg.model, &rate, constant)?;
    write_json(&out.join("bounds.json"), &report)?;
    let rows: Vec<EnvelopeRow> = report
        .times
        .iter()
        .zip(&report.measured)
        .zip(&report.envelope)
        .map(|((&t, &measured), &envelope)| EnvelopeRow { t, measured, envelope })
        .collect();
    write_csv(&out.join("bounds.csv"), &rows)?;
    write_atomic(&out.join("bounds.py"), plot_stub("bounds.csv", "t", &["measured", "envelope"], false).as_bytes())?;
    Ok(report)
}

pub const DEFAULT_COULOMB_EPSILONS: [f64; 5] = [0.2, 0.1, 0.05, 0.025, 0.0125];

pub fn run_coulomb_norms(epsilons: &[f64], out: &Path) -> HarnessResult<Vec<CoulombNorms>> {
    if epsilons.is_empty() {
        return Err(HarnessError::Config("no ε values given".into()));
    }
    let rows = epsilons
        .iter()
        .map(|&e| coulomb_confined_norms(e))
        .collect::<mfl_core::Result<Vec<_>>>()?;
    write_csv(&out.join("coulomb_norms.csv"), &rows)?;
    write_atomic(
        &out.join("coulomb_norms.py"),
        plot_stub("coulomb_norms.csv", "epsilon", &["l1_defect", "linf_defect"], true).as_bytes(),
    )?;
    Ok(rows)
}

/// Steps per run, for callers that want only the endpoints.
pub fn total_steps(run: &RunConfig) -> HarnessResult<usize> {
    Ok(step_count(run.horizon, run.dt)?)
}
