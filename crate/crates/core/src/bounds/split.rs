use serde::Serialize;

use crate::error::{Error, Result};

/// Measured norms of the cutoff split and the corresponding bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitReport {
    pub cutoff: f64,
    pub s: f64,
    pub s0: f64,
    /// `‖w‖_s`
    pub w_s: f64,
    /// `‖w¹‖_{s₀}` and `c^{1−s/s₀}‖w‖_s^{s/s₀}`
    pub w1_s0: f64,
    pub w1_bound: f64,
    /// `‖w²‖_{L²}` and `c^{1−s/2}‖w‖_s^{s/2}`
    pub w2_l2: f64,
    pub w2_bound: f64,
    /// `|‖w‖_s^s − ‖w¹‖_s^s − ‖w²‖_s^s|`
    pub identity_residual: f64,
}

impl SplitReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.w1_s0 <= self.w1_bound + tol && self.w2_l2 <= self.w2_bound + tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSplit {
    /// `w 1{|w| > c}`
    pub large: Vec<f64>,
    /// `w 1{|w| ≤ c}`
    pub small: Vec<f64>,
    pub report: SplitReport,
}

fn lp(values: &[f64], p: f64, dv: f64) -> f64 {
    (values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * dv).powf(1.0 / p)
}

/// Splits grid samples of `w` (cell volume `dv`) at level `cutoff`.
pub fn potential_split(samples: &[f64], dv: f64, cutoff: f64, s: f64, s0: f64) -> Result<PotentialSplit> {
    if !(cutoff > 0.0) {
        return Err(Error::InvalidParameter(format!("cutoff must be positive, got {cutoff}")));
    }
    if !(s >= 1.0 && s0 >= 1.0 && dv > 0.0) {
        return Err(Error::InvalidParameter("exponents must be at least 1 and dv positive".into()));
    }
    let (large, small): (Vec<f64>, Vec<f64>) = samples
        .iter()
        .map(|&v| if v.abs() > cutoff { (v, 0.0) } else { (0.0, v) })
        .unzip();
    let w_s = lp(samples, s, dv);
    let identity_residual = (w_s.powf(s) - lp(&large, s, dv).powf(s) - lp(&small, s, dv).powf(s)).abs();
    let report = SplitReport {
        cutoff,
        s,
        s0,
        w_s,
        w1_s0: lp(&large, s0, dv),
        w1_bound: cutoff.powf(1.0 - s / s0) * w_s.powf(s / s0),
        w2_l2: lp(&small, 2.0, dv),
        w2_bound: cutoff.powf(1.0 - s / 2.0) * w_s.powf(s / 2.0),
        identity_residual,
    };
    Ok(PotentialSplit { large, small, report })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn samples() -> Vec<f64> {
        (0..200).map(|i| 5.0 * ((i as f64 * 0.37).sin() + 0.2 * (i as f64).cos())).collect()
    }

    #[test]
    fn cutoff_above_sup_leaves_no_large_part() {
        let w = samples();
        let sup = w.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let sp = potential_split(&w, 0.01, sup * 1.01, 1.8, 1.2).unwrap();
        assert!(sp.large.iter().all(|v| *v == 0.0));
        assert_eq!(sp.small, w);
    }

    #[test]
    fn tiny_cutoff_leaves_only_level_set() {
        let w = samples();
        let sp = potential_split(&w, 0.01, 1e-12, 1.8, 1.2).unwrap();
        assert!(sp.small.iter().all(|v| v.abs() <= 1e-12));
    }

    #[test]
    fn norm_identity_and_bounds() {
        let w = samples();
        for &c in &[0.5, 1.0, 2.0, 4.0] {
            let sp = potential_split(&w, 0.01, c, 1.8, 1.2).unwrap();
            assert!(sp.report.identity_residual < 1e-12 * sp.report.w_s.powf(1.8));
            assert!(sp.report.holds(1e-8), "{:?}", sp.report);
        }
        assert!(potential_split(&w, 0.01, 0.0, 1.8, 1.2).is_err());
    }
}
