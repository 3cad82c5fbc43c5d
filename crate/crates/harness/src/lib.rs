//! Batch runner around `mfl_core`: TOML experiment configs, single runs,
//! N-ladders with rate fits, and the random-state invariant suite.

// Negated comparisons below are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod io;
pub mod ladder;
pub mod lemmas;
pub mod run;

pub use config::{EpsilonRule, ExperimentConfig, Functional, LemmaConfig};
pub use error::{HarnessError, HarnessResult};
pub use ladder::{run_ladder, FitStatus, LadderPoint, RateFit};
pub use lemmas::{verify_lemmas, LemmaTable};
pub use run::{run_bounds, run_coulomb_norms, run_single, simulate_manybody, simulate_onebody, trajectory};
