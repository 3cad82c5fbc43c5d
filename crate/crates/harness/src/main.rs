use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mfl_harness::run::DEFAULT_COULOMB_EPSILONS;
use mfl_harness::{
    run_bounds, run_coulomb_norms, run_ladder, run_single, simulate_manybody, simulate_onebody, verify_lemmas,
    ExperimentConfig, HarnessError, HarnessResult, LemmaConfig,
};

#[derive(Parser)]
#[command(name = "mfl", version, about = "Mean-field experiments for confined Bose gases")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the config's `output`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Overrides the config's seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,
}

#[derive(Subcommand)]
enum Command {
    SimulateOnebody,
    SimulateManybody,
    /// Counting functionals along a many-body trajectory.
    Counting,
    Ladder,
    VerifyLemmas {
        /// Scale φ off the unit sphere (negative control).
        #[arg(long)]
        corrupt_condensate: bool,
    },
    Bounds,
    CoulombNorms {
        #[arg(long, value_delimiter = ',')]
        epsilon: Vec<f64>,
    },
}

fn load(cli: &Cli) -> HarnessResult<ExperimentConfig> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| HarnessError::Config("--config is required for this command".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

fn out_dir(cli: &Cli, cfg: Option<&ExperimentConfig>) -> PathBuf {
    cli.out
        .clone()
        .or_else(|| cfg.map(|c| c.output.clone()))
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn execute(cli: &Cli) -> HarnessResult<i32> {
    match &cli.command {
        Command::SimulateOnebody => {
            let cfg = load(cli)?;
            let rows = simulate_onebody(&cfg, &out_dir(cli, Some(&cfg)))?;
            let last = rows.last().expect("nonempty trajectory");
            println!("t = {} mass = {:.15} E_phi = {:.12e}", last.t, last.mass, last.e_phi);
        }
        Command::SimulateManybody => {
            let cfg = load(cli)?;
            let rows = simulate_manybody(&cfg, &out_dir(cli, Some(&cfg)))?;
            let last = rows.last().expect("nonempty trajectory");
            println!("t = {} norm = {:.15} E_psi = {:.12e}", last.t, last.norm_sqr, last.e_psi);
        }
        Command::Counting => {
            let cfg = load(cli)?;
            let traj = run_single(&cfg, &out_dir(cli, Some(&cfg)))?;
            let last = traj.reports.last().expect("nonempty trajectory");
            println!("t = {} alpha = {:.6e} beta = {:.6e}", last.t, last.alpha, last.beta);
        }
        Command::Ladder => {
            let cfg = load(cli)?;
            let fit = run_ladder(&cfg, &out_dir(cli, Some(&cfg)), cli.workers)?;
            println!("{}", serde_json::to_string_pretty(&fit).map_err(HarnessError::from)?);
            return Ok(fit.exit_code());
        }
        Command::VerifyLemmas { corrupt_condensate } => {
            let cfg = cli.config.as_ref().map(|_| load(cli)).transpose()?;
            let mut sizes = cfg.as_ref().map(|c| c.lemmas.clone()).unwrap_or_else(LemmaConfig::default);
            sizes.corrupt_condensate |= corrupt_condensate;
            let seed = cli.seed.or(cfg.as_ref().map(|c| c.seed)).unwrap_or(0);
            let table = verify_lemmas(seed, &sizes)?;
            print!("{}", table.to_text());
            if cli.out.is_some() || cfg.is_some() {
                mfl_harness::io::write_json(&out_dir(cli, cfg.as_ref()).join("lemmas.json"), &table)?;
            }
            if !table.all_passed() {
                eprintln!("failing invariants: {}", table.failures().join(", "));
                return Ok(2);
            }
        }
        Command::Bounds => {
            let cfg = load(cli)?;
            let r = run_bounds(&cfg, &out_dir(cli, Some(&cfg)))?;
            println!("{}", serde_json::to_string_pretty(&r).map_err(HarnessError::from)?);
        }
        Command::CoulombNorms { epsilon } => {
            let eps = if epsilon.is_empty() { DEFAULT_COULOMB_EPSILONS.to_vec() } else { epsilon.clone() };
            for r in run_coulomb_norms(&eps, &out_dir(cli, None))? {
                println!(
                    "eps = {:<8} l1 = {:.6e} linf = {:.6e} log = {:.6e}",
                    r.epsilon, r.l1_defect, r.linf_defect, r.log_divergence
                );
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    match execute(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
