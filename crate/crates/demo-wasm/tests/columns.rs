use mfl_demo::{counting_columns, density_columns, rate_columns, DENSITY_POINTS};

#[test]
fn density_keeps_mass() {
    let c = density_columns(2.0, 0.5).unwrap();
    assert_eq!(c.len(), 3 * DENSITY_POINTS);
    let dx = c[1] - c[0];
    let mass = |col: &[f64]| col.iter().sum::<f64>() * dx;
    assert!((mass(&c[DENSITY_POINTS..2 * DENSITY_POINTS]) - 1.0).abs() < 1e-10);
    assert!((mass(&c[2 * DENSITY_POINTS..]) - 1.0).abs() < 1e-10);
}

#[test]
fn counting_starts_condensed() {
    let c = counting_columns(2, 2.0, 0.5, 0.2).unwrap();
    let k = c.len() / 3;
    assert_eq!(k, 5);
    assert!(c[k].abs() < 1e-12);
    assert!(c[2 * k - 1] > 0.0);
    assert!(counting_columns(4, 2.0, 0.5, 0.2).is_err());
}

#[test]
fn rate_columns_line_up() {
    let c = rate_columns(16).unwrap();
    assert_eq!(c.len(), 5 * 16);
    assert!((c[15] - 2.0).abs() < 1e-15 && (c[31] - 0.5).abs() < 1e-15);
    assert!((0..16).all(|i| c[32 + i] > c[16 + i] - 1e-15));
}
