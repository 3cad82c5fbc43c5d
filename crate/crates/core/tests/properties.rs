mod common;

use common::*;
use mfl_core::bounds::{gronwall_envelope, potential_split, EnvelopeInput};
use mfl_core::grid::{ConfinedDomain, FreeDomain, GridDomain, GridFunction};
use mfl_core::manybody::{symmetrize_values, ManyBodyPropagator, ManyBodyState, DEFAULT_MEMORY_CAP};
use mfl_core::onebody::{chi_mode, OneBodyPropagator, OneBodyState};
use mfl_core::C64;
use proptest::prelude::*;

fn complex_vec(len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b)), len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fourier_round_trip(values in complex_vec(64)) {
        let d = FreeDomain::new(vec![3.0, 5.0], vec![8, 8]).unwrap();
        let g = GridFunction::new(GridDomain::Free(d), values).unwrap();
        let back = g.to_spectral().to_position();
        for (a, b) in back.values.iter().zip(&g.values) {
            prop_assert!((a - b).norm() < 1e-12);
        }
        prop_assert!((g.to_spectral().norm_sqr() - g.norm_sqr()).abs() < 1e-12 * g.norm_sqr().max(1.0));
    }

    #[test]
    fn sine_round_trip(mut values in complex_vec(16)) {
        let c = ConfinedDomain::cube(1, -0.5, 0.5, 16, 0.3).unwrap();
        values[0] = C64::new(0.0, 0.0);
        let g = GridFunction::new(GridDomain::Confined(c), values).unwrap();
        let back = g.to_spectral().to_position();
        for (a, b) in back.values.iter().zip(&g.values) {
            prop_assert!((a - b).norm() < 1e-12);
        }
        prop_assert!((g.to_spectral().norm_sqr() - g.norm_sqr()).abs() < 1e-12 * g.norm_sqr().max(1.0));
    }

    #[test]
    fn onebody_step_preserves_mass(values in complex_vec(32)) {
        let spec = hartree_spec(2, bump(1.5), domain(32, 16.0, 4, 0.5));
        let phi = GridFunction::new(GridDomain::Free(spec.domain.free.clone()), values).unwrap();
        prop_assume!(phi.norm() > 1e-3);
        let state = OneBodyState::new(phi.normalized().unwrap(), chi_mode(&spec.domain.confined, 0).unwrap()).unwrap();
        let prop = OneBodyPropagator::new(&spec, 1e-2).unwrap();
        let mut s = state.clone();
        for _ in 0..10 {
            prop.step(&mut s).unwrap();
        }
        prop_assert!((s.phi.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn manybody_step_is_unitary_and_keeps_symmetry(values in complex_vec(32 * 32)) {
        let spec = hartree_spec(2, bump(1.5), domain(8, 8.0, 4, 0.5));
        let mut raw = values;
        // confined node 0 is the Dirichlet wall; index = free * 4 + confined
        for (i, v) in raw.iter_mut().enumerate() {
            if (i / 32) % 4 == 0 || (i % 32) % 4 == 0 {
                *v = C64::new(0.0, 0.0);
            }
        }
        let sym = symmetrize_values(&raw, 2, 32);
        let psi = ManyBodyState { n: 2, domain: spec.domain.clone(), values: sym, t: 0.0 };
        let n0 = psi.norm_sqr();
        prop_assume!(n0 > 1e-6);
        let prop = ManyBodyPropagator::new(&spec, 1e-2, DEFAULT_MEMORY_CAP).unwrap();
        let mut s = psi.clone();
        let mut scratch = Vec::new();
        for _ in 0..5 {
            prop.step(&mut s, &mut scratch).unwrap();
        }
        prop_assert!((s.norm_sqr() - n0).abs() < 1e-12 * n0);
        prop_assert!(s.symmetry_residual() < 1e-12 * n0.sqrt().max(1.0));
    }

    #[test]
    fn symmetrization_is_idempotent(values in complex_vec(4 * 4 * 4)) {
        let once = symmetrize_values(&values, 3, 4);
        // the unnormalized sum over 3! permutations scales by 6 on symmetric input
        let twice = symmetrize_values(&once, 3, 4);
        for (a, b) in once.iter().zip(&twice) {
            prop_assert!((6.0 * a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn split_norm_identity(samples in prop::collection::vec(-50.0f64..50.0, 1..200), c in 0.01f64..60.0, s in 1.25f64..2.0) {
        let sp = potential_split(&samples, 0.1, c, s, 1.2).unwrap();
        let scale = sp.report.w_s.powf(s).max(1.0);
        prop_assert!(sp.report.identity_residual <= 1e-10 * scale);
        prop_assert!(sp.report.holds(1e-8));
        for ((w, a), b) in samples.iter().zip(&sp.large).zip(&sp.small) {
            prop_assert_eq!(a + b, *w);
            prop_assert!(*a == 0.0 || *b == 0.0);
        }
    }

    #[test]
    fn envelope_dominates_initial_value(f0 in 0.0f64..1.0, delta in 0.0f64..1.0, rates in prop::collection::vec(0.0f64..5.0, 2..40)) {
        let times: Vec<f64> = (0..rates.len()).map(|i| i as f64 * 0.1).collect();
        let env = gronwall_envelope(&EnvelopeInput { initial: f0, defect: delta, times, integrand: rates }).unwrap();
        prop_assert!(env.windows(2).all(|w| w[1] >= w[0]));
        prop_assert!(env.iter().all(|v| *v >= f0));
    }
}
