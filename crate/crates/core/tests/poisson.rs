use std::f64::consts::PI;

use mfl_core::bounds::{box_lp_norm, divergence_residual, poisson_vector_field, PoissonGrid};
use mfl_core::quadrature::integrate;

/// Smooth radial bump `exp(1 − 1/(1 − r²/a²))`.
fn bump(a: f64) -> impl Fn(f64) -> f64 + Copy {
    move |r: f64| {
        let u = r * r / (a * a);
        if u < 1.0 {
            (1.0 - 1.0 / (1.0 - u)).exp()
        } else {
            0.0
        }
    }
}

fn sampled(grid: &PoissonGrid, profile: impl Fn(f64) -> f64, c: [f64; 3]) -> Vec<f64> {
    grid.sample(|x| profile(((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2) + (x[2] - c[2]).powi(2)).sqrt()))
}

#[test]
fn divergence_reproduces_the_source() {
    let grid = PoissonGrid::new(32, 2.0).unwrap();
    let f = sampled(&grid, bump(0.85), [0.0; 3]);
    let field = poisson_vector_field(grid, &f).unwrap();
    let res = divergence_residual(&field, &f);
    println!("divergence residual {res:e}");
    assert!(res <= 1e-4);
}

#[test]
fn radial_field_matches_enclosed_mass() {
    let grid = PoissonGrid::new(32, 2.0).unwrap();
    let profile = bump(0.85);
    let f = sampled(&grid, profile, [0.0; 3]);
    let field = poisson_vector_field(grid, &f).unwrap();
    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for i in 0..grid.len() {
        let x = grid.point(i);
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        if !(0.05..=0.95).contains(&r) {
            continue;
        }
        let mass = 4.0 * PI * integrate(|s| profile(s) * s * s, 0.0, r.min(0.85), 1e-14, 1e-12).unwrap();
        let exact = mass / (4.0 * PI * r * r);
        let radial: f64 = (0..3).map(|a| field.components[a][i] * x[a] / r).sum();
        let tangential: f64 = (0..3)
            .map(|a| (field.components[a][i] - radial * x[a] / r).powi(2))
            .sum::<f64>()
            .sqrt();
        worst = worst.max((radial - exact).abs()).max(tangential);
        scale = scale.max(exact.abs());
    }
    println!("gauss oracle relative error {:e}", worst / scale);
    assert!(worst / scale <= 1e-3);
}

#[test]
fn young_type_constant_transfers_across_profiles() {
    let grid = PoissonGrid::new(32, 2.0).unwrap();
    let s = 1.5;
    let q = 1.0 / (1.0 / s - 1.0 / 3.0);
    let ratio = |f: &[f64]| {
        let field = poisson_vector_field(grid, f).unwrap();
        box_lp_norm(&grid, &field.magnitude(), q) / box_lp_norm(&grid, f, s)
    };
    // calibration on a narrow bump, where the field is most concentrated
    let calib = ratio(&sampled(&grid, bump(0.3), [0.0; 3]));
    let constant = 2.0 * calib;
    let tests = [
        sampled(&grid, bump(0.8), [0.0; 3]),
        sampled(&grid, bump(0.4), [0.3, -0.2, 0.1]),
        {
            let a = sampled(&grid, bump(0.35), [-0.3, 0.0, 0.0]);
            let b = sampled(&grid, bump(0.35), [0.35, 0.1, 0.0]);
            a.iter().zip(&b).map(|(x, y)| x - 0.5 * y).collect()
        },
    ];
    for f in &tests {
        let r = ratio(f);
        println!("young ratio {r:.4} vs constant {constant:.4}");
        assert!(r <= constant);
    }
}
