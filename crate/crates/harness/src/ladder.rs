//! N-ladders: one run per particle number, then a log–log fit of the
//! terminal counting functional.

use std::collections::VecDeque;
use std::path::Path;
use std::sync::{Condvar, Mutex};

use mfl_core::manybody::memory_estimate;
use serde::Serialize;

use crate::config::{ExperimentConfig, Functional};
use crate::error::HarnessResult;
use crate::io::{plot_stub, write_csv, write_json};
use crate::run::{total_steps, trajectory};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderPoint {
    pub n: usize,
    pub epsilon: f64,
    pub terminal_alpha: f64,
    pub terminal_beta: f64,
    /// The functional being fitted.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LadderFailure {
    pub n: usize,
    pub epsilon: f64,
    pub exit_code: i32,
    pub error: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitStatus {
    Fitted,
    /// Some terminal value is zero (below [`ZERO_LEVEL`]), so there is no
    /// logarithm to fit.
    Degenerate,
    TooFewPoints,
    /// At least one ladder point failed.
    Incomplete,
    /// The residual exceeds the threshold; the slope is withheld.
    ResidualTooLarge,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateFit {
    pub seed: u64,
    pub functional: Functional,
    pub status: FitStatus,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// RMS residual of the fit in log units.
    pub residual: Option<f64>,
    pub residual_threshold: f64,
    pub points: Vec<LadderPoint>,
    pub failures: Vec<LadderFailure>,
}

impl RateFit {
    /// Exit code a CLI should report: 0 unless a point failed.
    pub fn exit_code(&self) -> i32 {
        self.failures.iter().map(|f| f.exit_code).max().unwrap_or(0)
    }
}

/// Terminal values at or below this are numerically zero.
pub const ZERO_LEVEL: f64 = 1e-12;

/// Least-squares line through `(x, y)`; returns slope, intercept and RMS residual.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    (slope, intercept, (ss / n).sqrt())
}

pub fn fit_points(
    points: Vec<LadderPoint>,
    failures: Vec<LadderFailure>,
    functional: Functional,
    threshold: f64,
    seed: u64,
) -> RateFit {
    let mut fit = RateFit {
        seed,
        functional,
        status: FitStatus::Fitted,
        slope: None,
        intercept: None,
        residual: None,
        residual_threshold: threshold,
        points,
        failures,
    };
    let mut distinct: Vec<usize> = fit.points.iter().map(|p| p.n).collect();
    distinct.sort_unstable();
    distinct.dedup();
    fit.status = if !fit.failures.is_empty() {
        FitStatus::Incomplete
    } else if distinct.len() < 3 {
        FitStatus::TooFewPoints
    } else if fit.points.iter().any(|p| !(p.value > ZERO_LEVEL)) {
        FitStatus::Degenerate
    } else {
        let x: Vec<f64> = fit.points.iter().map(|p| (p.n as f64).ln()).collect();
        let y: Vec<f64> = fit.points.iter().map(|p| p.value.ln()).collect();
        let (slope, intercept, residual) = least_squares(&x, &y);
        fit.residual = Some(residual);
        if residual > threshold {
            FitStatus::ResidualTooLarge
        } else {
            fit.slope = Some(slope);
            fit.intercept = Some(intercept);
            FitStatus::Fitted
        }
    };
    fit
}

/// Global byte budget shared by the ladder workers.
struct Budget {
    used: Mutex<u64>,
    freed: Condvar,
    cap: u64,
}

impl Budget {
    fn acquire(&self, bytes: u64) {
        let mut used = self.used.lock().expect("budget lock");
        while *used + bytes > self.cap {
            used = self.freed.wait(used).expect("budget lock");
        }
        *used += bytes;
    }

    fn release(&self, bytes: u64) {
        *self.used.lock().expect("budget lock") -= bytes;
        self.freed.notify_all();
    }
}

fn run_point(cfg: &ExperimentConfig, n: usize, epsilon: f64) -> HarnessResult<LadderPoint> {
    let spec = cfg.model_at(n, epsilon);
    spec.validate()?;
    let steps = total_steps(&cfg.run)?;
    let traj = trajectory(&spec, &cfg.run, &cfg.initial, cfg.memory_cap, steps)?;
    let last = traj.reports.last().expect("at least the initial report");
    Ok(LadderPoint {
        n,
        epsilon,
        terminal_alpha: last.alpha,
        terminal_beta: last.beta,
        value: match cfg.ladder.functional {
            Functional::Alpha => last.alpha,
            Functional::Beta => last.beta,
        },
    })
}

/// Runs every ladder point on a pool of `workers` threads whose combined
/// memory estimate never exceeds `cfg.memory_cap`. Per-point data and the
/// fit are written to `out` even when some points fail.
pub fn run_ladder(cfg: &ExperimentConfig, out: &Path, workers: usize) -> HarnessResult<RateFit> {
    let eps = cfg.ladder.epsilons(cfg.model.epsilon());
    let tasks: VecDeque<(usize, usize, f64)> = cfg
        .ladder
        .n_values
        .iter()
        .zip(&eps)
        .enumerate()
        .map(|(i, (&n, &e))| (i, n, e))
        .collect();
    let count = tasks.len();
    let queue = Mutex::new(tasks);
    let results: Mutex<Vec<(usize, HarnessResult<LadderPoint>)>> = Mutex::new(Vec::with_capacity(count));
    let budget = Budget {
        used: Mutex::new(0),
        freed: Condvar::new(),
        cap: cfg.memory_cap,
    };
    std::thread::scope(|scope| {
        for _ in 0..workers.clamp(1, count) {
            scope.spawn(|| loop {
                let Some((i, n, e)) = queue.lock().expect("queue lock").pop_front() else {
                    break;
                };
                let bytes = memory_estimate(n, &cfg.model.domain);
                let res = if bytes > cfg.memory_cap {
                    Err(mfl_core::Error::MemoryGuard {
                        required: bytes,
                        cap: cfg.memory_cap,
                    }
                    .into())
                } else {
                    budget.acquire(bytes);
                    let r = run_point(cfg, n, e);
                    budget.release(bytes);
                    r
                };
                results.lock().expect("results lock").push((i, res));
            });
        }
    });
    let mut results = results.into_inner().expect("results lock");
    results.sort_by_key(|(i, _)| *i);
    let mut points = Vec::new();
    let mut failures = Vec::new();
    for (i, r) in results {
        match r {
            Ok(p) => points.push(p),
            Err(e) => failures.push(LadderFailure {
                n: cfg.ladder.n_values[i],
                epsilon: eps[i],
                exit_code: e.exit_code(),
                error: e.to_string(),
            }),
        }
    }
    let fit = fit_points(points, failures, cfg.ladder.functional, cfg.ladder.residual_threshold, cfg.seed);
    persist(cfg, out, &fit)?;
    Ok(fit)
}

fn persist(cfg: &ExperimentConfig, out: &Path, fit: &RateFit) -> HarnessResult<()> {
    crate::io::write_atomic(&out.join("config.toml"), cfg.to_toml()?.as_bytes())?;
    write_csv(&out.join("ladder.csv"), &fit.points)?;
    write_json(&out.join("fit.json"), fit)?;
    crate::io::write_atomic(
        &out.join("ladder.py"),
        plot_stub("ladder.csv", "n", &["terminal_alpha", "terminal_beta"], true).as_bytes(),
    )
}
