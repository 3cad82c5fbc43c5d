mod common;

use common::*;
use mfl_core::interaction::InteractionProfile;
use mfl_harness::ladder::{fit_points, least_squares, LadderFailure, LadderPoint};
use mfl_harness::{run_bounds, run_ladder, run_single, simulate_manybody, simulate_onebody, FitStatus, Functional};

#[test]
fn zero_interaction_gives_zero_alpha() {
    let mut cfg = small_hartree();
    cfg.model.interaction = InteractionProfile::zero();
    let dir = tempfile::tempdir().unwrap();
    let traj = run_single(&cfg, dir.path()).unwrap();
    assert_eq!(traj.reports.len(), 5);
    for r in &traj.reports {
        assert!(r.alpha.abs() < 1e-12, "alpha {} at t = {}", r.alpha, r.t);
    }
    let csv = std::fs::read_to_string(dir.path().join("counting.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = small_hartree();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_single(&cfg, a.path()).unwrap();
    run_single(&cfg, b.path()).unwrap();
    for f in ["counting.csv", "onebody.csv", "config.toml"] {
        let x = std::fs::read(a.path().join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
    let recorded = std::fs::read_to_string(a.path().join("config.toml")).unwrap();
    assert!(recorded.contains("seed = 7"));
}

#[test]
fn simulations_write_snapshots_that_read_back() {
    let cfg = small_hartree();
    let dir = tempfile::tempdir().unwrap();
    let rows = simulate_onebody(&cfg, dir.path()).unwrap();
    assert!((rows.last().unwrap().mass - 1.0).abs() < 1e-12);
    let rows = simulate_manybody(&cfg, dir.path()).unwrap();
    assert!((rows.last().unwrap().norm_sqr - 1.0).abs() < 1e-12);
    let mut f = std::fs::File::open(dir.path().join("manybody_final.mfl")).unwrap();
    let psi = mfl_core::container::read_manybody(&mut f).unwrap();
    assert_eq!(psi.n, 2);
    assert!((psi.t - 0.2).abs() < 1e-12);
    let mut f = std::fs::File::open(dir.path().join("onebody_final.mfl")).unwrap();
    let (_, t) = mfl_core::container::read_grid_function(&mut f).unwrap();
    assert!((t - 0.2).abs() < 1e-12);
}

#[test]
fn memory_guard_is_reported_with_a_hint() {
    let mut cfg = small_hartree();
    cfg.memory_cap = 1 << 10;
    let dir = tempfile::tempdir().unwrap();
    let err = run_single(&cfg, dir.path()).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().contains("hint"));
    assert!(!dir.path().join("counting.csv").exists());
}

#[test]
fn bounds_report_is_written() {
    let mut cfg = small_hartree();
    cfg.model.n_particles = 3;
    let dir = tempfile::tempdir().unwrap();
    let r = run_bounds(&cfg, dir.path()).unwrap();
    assert_eq!(r.regime, "thm1");
    assert!(r.below_envelope);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("bounds.json")).unwrap()).unwrap();
    assert_eq!(json["below_envelope"], serde_json::Value::Bool(true));
}

fn point(n: usize, value: f64) -> LadderPoint {
    LadderPoint {
        n,
        epsilon: 0.5,
        terminal_alpha: value,
        terminal_beta: value,
        value,
    }
}

#[test]
fn fit_rules() {
    let (s, b, r) = least_squares(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]);
    assert!((s - 2.0).abs() < 1e-14 && (b - 1.0).abs() < 1e-14 && r < 1e-14);
    let exact: Vec<_> = [2, 3, 4].iter().map(|&n| point(n, 0.3 / n as f64)).collect();
    let f = fit_points(exact, vec![], Functional::Beta, 0.1, 0);
    assert_eq!(f.status, FitStatus::Fitted);
    assert!((f.slope.unwrap() + 1.0).abs() < 1e-12);
    let noisy = vec![point(2, 0.1), point(3, 0.5), point(4, 0.05)];
    let f = fit_points(noisy, vec![], Functional::Beta, 0.1, 0);
    assert_eq!(f.status, FitStatus::ResidualTooLarge);
    assert!(f.slope.is_none() && f.residual.unwrap() > 0.1);
    let f = fit_points(vec![point(2, 0.1), point(3, 0.05)], vec![], Functional::Beta, 0.1, 0);
    assert_eq!(f.status, FitStatus::TooFewPoints);
    let fail = LadderFailure {
        n: 5,
        epsilon: 0.5,
        exit_code: 3,
        error: "guard".into(),
    };
    let pts: Vec<_> = [2, 3, 4].iter().map(|&n| point(n, 0.1)).collect();
    let f = fit_points(pts, vec![fail], Functional::Beta, 0.1, 0);
    assert_eq!(f.status, FitStatus::Incomplete);
    assert_eq!(f.exit_code(), 3);
}

#[test]
fn zero_interaction_ladder_is_degenerate() {
    let mut cfg = small_hartree();
    cfg.model.interaction = InteractionProfile::zero();
    let dir = tempfile::tempdir().unwrap();
    let fit = run_ladder(&cfg, dir.path(), 3).unwrap();
    assert_eq!(fit.status, FitStatus::Degenerate);
    assert!(fit.slope.is_none());
    assert!(fit.points.iter().all(|p| p.value.abs() < 1e-12));
}

#[test]
fn failed_points_leave_partial_results() {
    let mut cfg = small_hartree();
    cfg.ladder.n_values = vec![2, 3, 6];
    // Room for N = 3 (32³ entries) but not N = 6.
    cfg.memory_cap = 4 << 20;
    let dir = tempfile::tempdir().unwrap();
    let fit = run_ladder(&cfg, dir.path(), 2).unwrap();
    assert_eq!(fit.status, FitStatus::Incomplete);
    assert_eq!(fit.points.len(), 2);
    assert_eq!(fit.failures.len(), 1);
    assert_eq!(fit.failures[0].n, 6);
    assert_eq!(fit.exit_code(), 3);
    let csv = std::fs::read_to_string(dir.path().join("ladder.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    let json = std::fs::read_to_string(dir.path().join("fit.json")).unwrap();
    assert!(json.contains("\"incomplete\""));
}

#[test]
fn workers_do_not_change_results() {
    let cfg = small_hartree();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let one = run_ladder(&cfg, a.path(), 1).unwrap();
    let three = run_ladder(&cfg, b.path(), 3).unwrap();
    assert_eq!(one, three);
    assert_eq!(
        std::fs::read(a.path().join("ladder.csv")).unwrap(),
        std::fs::read(b.path().join("ladder.csv")).unwrap()
    );
}

/// Halving Δt moves the fitted slope by much less than 0.05.
#[test]
fn slope_is_insensitive_to_the_time_step() {
    let mut cfg = example("hartree-theta0.toml");
    cfg.model.domain.free.points = vec![8];
    cfg.model.domain.confined.epsilon = 0.2;
    let mut slopes = Vec::new();
    let mut terminal = Vec::new();
    for dt in [0.01, 0.005] {
        cfg.run.dt = dt;
        let dir = tempfile::tempdir().unwrap();
        let fit = run_ladder(&cfg, dir.path(), 3).unwrap();
        assert_eq!(fit.status, FitStatus::Fitted, "{fit:?}");
        slopes.push(fit.slope.unwrap());
        terminal.push(fit.points.iter().map(|p| p.terminal_alpha).collect::<Vec<_>>());
    }
    println!("slopes {slopes:?}");
    for (a, b) in terminal[0].iter().zip(&terminal[1]) {
        println!("terminal alpha {a:.6e} vs {b:.6e}");
    }
    assert!((slopes[0] - slopes[1]).abs() <= 0.05);
}
