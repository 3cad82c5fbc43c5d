//! Browser demo. The plain functions return packed `f64` columns so they
//! can be tested natively; the `wasm_*` wrappers only convert errors.

use mfl_core::bounds::{rate_exponent, thm3_branch, RateSpec, S0};
use mfl_core::counting::counting_report;
use mfl_core::grid::{ConfinedDomain, Domain, FreeDomain};
use mfl_core::interaction::InteractionProfile;
use mfl_core::manybody::{evolve_manybody_with, ManyBodyState};
use mfl_core::model::{Convolution, ExternalPotential, ModelSpec};
use mfl_core::onebody::{chi_mode, evolve_effective, gaussian_packet, OneBodyState};
use wasm_bindgen::prelude::*;

pub const DENSITY_POINTS: usize = 64;
/// Many-body runs stay tiny so the page remains responsive.
pub const MAX_PARTICLES: usize = 3;
const EXTENT: f64 = 16.0;

fn model(n: usize, amplitude: f64, epsilon: f64, nf: usize) -> mfl_core::Result<ModelSpec> {
    let domain = Domain::new(
        FreeDomain::cube(1, EXTENT, nf)?,
        ConfinedDomain::cube(1, -0.5, 0.5, 4, epsilon)?,
    )?;
    let mut spec = ModelSpec::hartree(n, domain, InteractionProfile::GaussianBump { amplitude, sigma: 0.8 });
    spec.convolution = Convolution::Periodic;
    spec.potential = ExternalPotential::Harmonic {
        strength: 0.05,
        center: vec![0.0],
    };
    spec.validate()?;
    Ok(spec)
}

fn start(spec: &ModelSpec) -> mfl_core::Result<OneBodyState> {
    let phi = gaussian_packet(&spec.domain.free, &[-2.0], 1.0, &[1.0])?;
    OneBodyState::new(phi, chi_mode(&spec.domain.confined, 0)?)
}

/// `[x; |Φ(0)|²; |Φ(t)|²]`, each of length [`DENSITY_POINTS`].
pub fn density_columns(amplitude: f64, time: f64) -> mfl_core::Result<Vec<f64>> {
    let spec = model(2, amplitude, 0.5, DENSITY_POINTS)?;
    let s0 = start(&spec)?;
    let dt = 0.01;
    let steps = (time / dt).round().max(0.0);
    let last = if steps == 0.0 {
        s0.clone()
    } else {
        evolve_effective(&s0, &spec, steps * dt, dt, usize::MAX)?.pop().expect("final state")
    };
    let mut out: Vec<f64> = (0..DENSITY_POINTS).map(|i| spec.domain.free.point(i)[0]).collect();
    out.extend(s0.phi.values.iter().map(|v| v.norm_sqr()));
    out.extend(last.phi.values.iter().map(|v| v.norm_sqr()));
    Ok(out)
}

/// `[t; α; β]` along an N-particle run on an 8 × 4 grid.
pub fn counting_columns(n: usize, amplitude: f64, epsilon: f64, horizon: f64) -> mfl_core::Result<Vec<f64>> {
    if !(1..=MAX_PARTICLES).contains(&n) {
        return Err(mfl_core::Error::InvalidParameter(format!("N must be in 1..={MAX_PARTICLES}")));
    }
    let spec = model(n, amplitude, epsilon, 8)?;
    let dt = 0.01;
    let horizon = (horizon / dt).round().max(1.0) * dt;
    let stride = 5;
    let ones = evolve_effective(&start(&spec)?, &spec, horizon, dt, stride)?;
    let psi0 = ManyBodyState::product(&ones[0].product(), n)?;
    let mut rows = Vec::new();
    evolve_manybody_with(&psi0, &spec, horizon, dt, stride, 64 << 20, |s| {
        rows.push(counting_report(s, &ones[rows.len()], &spec)?);
        Ok(())
    })?;
    let mut out: Vec<f64> = rows.iter().map(|r| r.t).collect();
    out.extend(rows.iter().map(|r| r.alpha));
    out.extend(rows.iter().map(|r| r.beta));
    Ok(out)
}

/// `[s; η₂(s); η_C(s); θ; η₃(θ)]` with `samples` points each; s runs over
/// (6/5, 2] and θ over (1/4, 1/3).
pub fn rate_columns(samples: usize) -> mfl_core::Result<Vec<f64>> {
    let k = samples.max(2);
    let s: Vec<f64> = (1..=k).map(|i| S0 + (2.0 - S0) * i as f64 / k as f64).collect();
    let theta: Vec<f64> = (1..=k).map(|i| 0.25 + (1.0 / 12.0) * i as f64 / (k + 1) as f64).collect();
    let mut out = s.clone();
    for v in &s {
        out.push(rate_exponent(&RateSpec::Thm2 { s: *v })?.eta);
    }
    for v in &s {
        out.push(rate_exponent(&RateSpec::AppendixC { s: *v, s0: S0 })?.eta);
    }
    out.extend(&theta);
    out.extend(theta.iter().map(|t| thm3_branch(*t)));
    Ok(out)
}

fn js(r: mfl_core::Result<Vec<f64>>) -> Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen(js_name = density)]
pub fn wasm_density(amplitude: f64, time: f64) -> Result<Vec<f64>, JsError> {
    js(density_columns(amplitude, time))
}

#[wasm_bindgen(js_name = counting)]
pub fn wasm_counting(n: usize, amplitude: f64, epsilon: f64, horizon: f64) -> Result<Vec<f64>, JsError> {
    js(counting_columns(n, amplitude, epsilon, horizon))
}

#[wasm_bindgen(js_name = rates)]
pub fn wasm_rates(samples: usize) -> Result<Vec<f64>, JsError> {
    js(rate_columns(samples))
}
