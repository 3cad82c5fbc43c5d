//! Closed-form error envelopes, rate exponents and the constructive pieces
//! of the convergence proofs.

pub mod coulomb;
pub mod gronwall;
pub mod poisson;
pub mod rates;
pub mod report;
pub mod split;
pub mod thm;

pub use coulomb::{coulomb_confined_norms, CoulombNorms};
pub use gronwall::{cumulative_trapezoid, envelope_with_constant, fit_constant, gronwall_envelope, EnvelopeInput};
pub use poisson::{box_lp_norm, divergence_residual, poisson_vector_field, PoissonGrid, VectorField};
pub use rates::{rate_exponent, thm3_branch, thm3_optimum, thm3_term_exponents, RateExponent, RateSpec, Thm3Optimum, S0};
pub use report::{thm_bound_report, BoundReport};
pub use split::{potential_split, PotentialSplit, SplitReport};
pub use thm::{
    defect_f, laplacian_density_norm, onebody_diagnostics, thm1_coefficient, thm1_integrand, thm2_integrand,
    thm3_integrand, OneBodyDiagnostics, Thm1Norms,
};
