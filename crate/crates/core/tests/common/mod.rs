#![allow(dead_code)]

use mfl_core::grid::{ConfinedDomain, Domain, FreeDomain};
use mfl_core::interaction::InteractionProfile;
use mfl_core::manybody::ManyBodyState;
use mfl_core::model::{Convolution, ExternalPotential, ModelSpec};
use mfl_core::onebody::{chi_mode, gaussian_packet, OneBodyState};
use mfl_core::C64;

pub fn domain(nf: usize, extent: f64, nc: usize, eps: f64) -> Domain {
    Domain::new(
        FreeDomain::cube(1, extent, nf).unwrap(),
        ConfinedDomain::cube(1, -0.5, 0.5, nc, eps).unwrap(),
    )
    .unwrap()
}

pub fn bump(amplitude: f64) -> InteractionProfile {
    InteractionProfile::GaussianBump { amplitude, sigma: 0.8 }
}

/// θ = 0 model with a harmonic trap and the periodic convolution that the
/// many-body kernel uses.
pub fn hartree_spec(n: usize, w: InteractionProfile, dom: Domain) -> ModelSpec {
    let mut spec = ModelSpec::hartree(n, dom, w);
    spec.convolution = Convolution::Periodic;
    spec.potential = ExternalPotential::Harmonic { strength: 0.05, center: vec![0.0] };
    spec
}

pub fn initial(spec: &ModelSpec) -> OneBodyState {
    let phi = gaussian_packet(&spec.domain.free, &[-0.5], 1.0, &[0.7]).unwrap();
    OneBodyState::new(phi, chi_mode(&spec.domain.confined, 0).unwrap()).unwrap()
}

pub fn product_state(onebody: &OneBodyState, n: usize) -> ManyBodyState {
    ManyBodyState::product(&onebody.product(), n).unwrap()
}

pub fn distance(a: &[C64], b: &[C64], dv: f64) -> f64 {
    (a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>() * dv).sqrt()
}
