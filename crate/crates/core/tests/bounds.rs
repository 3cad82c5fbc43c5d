mod common;

use std::f64::consts::PI;

use common::*;
use mfl_core::bounds::{
    onebody_diagnostics, potential_split, thm_bound_report, RateSpec, S0,
};
use mfl_core::counting::counting_report;
use mfl_core::interaction::InteractionProfile;
use mfl_core::manybody::{evolve_manybody, DEFAULT_MEMORY_CAP};
use mfl_core::model::ModelSpec;
use mfl_core::onebody::evolve_effective;

/// `1/r` on the unit ball, cell-centered samples so the origin is avoided.
fn truncated_coulomb(n: usize) -> (Vec<f64>, f64) {
    let h = 2.0 / n as f64;
    let mut v = Vec::with_capacity(n * n * n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let x = [a, b, c].map(|i| -1.0 + (i as f64 + 0.5) * h);
                let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
                v.push(if r < 1.0 { 1.0 / r } else { 0.0 });
            }
        }
    }
    (v, h * h * h)
}

#[test]
fn coulomb_split_satisfies_both_bounds() {
    let (s, c) = (1.8, 10.0);
    let (w, dv) = truncated_coulomb(64);
    let split = potential_split(&w, dv, c, s, S0).unwrap();
    let r = &split.report;
    println!("{r:?}");
    assert!(r.holds(1e-8));
    assert!(r.identity_residual < 1e-10 * r.w_s.powf(s));

    // radial quadrature of both sides: ‖w‖_s^s = 4π/(3−s), the large part
    // lives on r < 1/c and the small part on 1/c ≤ r < 1
    let w_s = (4.0 * PI / (3.0 - s)).powf(1.0 / s);
    let w1 = (4.0 * PI * c.powf(S0 - 3.0) / (3.0 - S0)).powf(1.0 / S0);
    let w2 = (4.0 * PI * (1.0 - 1.0 / c)).sqrt();
    assert!(w1 <= c.powf(1.0 - s / S0) * w_s.powf(s / S0));
    assert!(w2 <= c.powf(1.0 - s / 2.0) * w_s.powf(s / 2.0));
    // the grid values approach the radial ones
    assert!((r.w_s - w_s).abs() / w_s < 0.05);
    assert!((r.w2_l2 - w2).abs() / w2 < 0.05);
}

fn small_run(n: usize, w: InteractionProfile) -> (ModelSpec, Vec<mfl_core::counting::CountingReport>, Vec<mfl_core::bounds::OneBodyDiagnostics>) {
    let spec = hartree_spec(n, w, domain(8, 8.0, 4, 0.5));
    let dt = 0.01;
    let ones = evolve_effective(&initial(&spec), &spec, 0.5, dt, 10).unwrap();
    let psi0 = product_state(&ones[0], n);
    let many = evolve_manybody(&psi0, &spec, 0.5, dt, 10, DEFAULT_MEMORY_CAP).unwrap();
    let reports = many.iter().zip(&ones).map(|(p, o)| counting_report(p, o, &spec).unwrap()).collect();
    let diags = ones.iter().map(|o| onebody_diagnostics(o, &spec).unwrap()).collect();
    (spec, reports, diags)
}

#[test]
fn zero_interaction_product_data_is_trivially_below() {
    let (spec, reports, diags) = small_run(2, InteractionProfile::zero());
    let r = thm_bound_report(&reports, &diags, &spec, &RateSpec::Thm1, None).unwrap();
    assert!(r.measured.iter().all(|v| v.abs() < 1e-12));
    assert!(r.envelope.iter().all(|v| v.abs() < 1e-12));
    assert!(r.below_envelope);
}

#[test]
fn thm2_fitted_constant_is_stable_across_n() {
    let mut constants = Vec::new();
    for n in [2, 3, 4] {
        let (spec, reports, diags) = small_run(n, bump(2.0));
        let r = thm_bound_report(&reports, &diags, &spec, &RateSpec::Thm2 { s: 2.0 }, None).unwrap();
        println!("N = {n}: fitted constant {:?}", r.fitted_constant);
        assert!(r.notes.iter().any(|s| s.contains("fitted")));
        constants.push(r.fitted_constant.expect("a finite constant"));
    }
    let (lo, hi) = constants.iter().fold((f64::MAX, 0.0f64), |(a, b), c| (a.min(*c), b.max(*c)));
    println!("spread {:.3}", hi / lo.max(1e-300));
    assert!(lo == 0.0 && hi == 0.0 || hi / lo <= 2.0);
}
