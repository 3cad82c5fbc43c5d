#![allow(dead_code)]

use std::path::PathBuf;

use mfl_harness::ExperimentConfig;

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

pub fn example(name: &str) -> ExperimentConfig {
    ExperimentConfig::load(&config_path(name)).unwrap()
}

/// The θ = 0 example shrunk to 8 free nodes, N = 2, T = 0.2.
pub fn small_hartree() -> ExperimentConfig {
    let mut cfg = example("hartree-theta0.toml");
    cfg.model.domain.free.points = vec![8];
    cfg.model.n_particles = 2;
    cfg.run.horizon = 0.2;
    cfg.run.stride = 5;
    cfg
}
