//! Numerical tools for dimensional reduction of interacting bosons in thin
//! waveguides: grids, one-body and many-body solvers, counting functionals
//! and analytic error envelopes.

// Negated comparisons below are deliberate: they reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod bounds;
pub mod container;
pub mod counting;
pub mod grid;
pub mod interaction;
pub mod manybody;
pub mod model;
pub mod onebody;
pub mod quadrature;
pub mod spectral;

pub use error::{Error, Result};
pub use spectral::C64;
