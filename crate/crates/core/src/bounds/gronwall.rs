use serde::Serialize;

use crate::error::{Error, Result};

/// Data for `f(t) ≤ e^{∫C} f(0) + (e^{∫C} − 1) δ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeInput {
    pub initial: f64,
    pub defect: f64,
    pub times: Vec<f64>,
    /// Samples of the rate function `C` at `times`.
    pub integrand: Vec<f64>,
}

impl EnvelopeInput {
    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.integrand.len() {
            return Err(Error::InvalidParameter(format!(
                "{} time samples but {} integrand samples",
                self.times.len(),
                self.integrand.len()
            )));
        }
        if self.times.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::InvalidParameter("time grid must be nondecreasing".into()));
        }
        if !(self.defect >= 0.0) {
            return Err(Error::InvalidParameter(format!("defect must be nonnegative, got {}", self.defect)));
        }
        if self.integrand.iter().any(|v| !v.is_finite()) || !self.initial.is_finite() {
            return Err(Error::InvalidParameter("integrand samples must be finite".into()));
        }
        Ok(())
    }
}

/// Running trapezoid integral, starting from 0 at `times[0]`.
pub fn cumulative_trapezoid(times: &[f64], values: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(times.len());
    let mut acc = 0.0;
    for i in 0..times.len() {
        if i > 0 {
            acc += 0.5 * (times[i] - times[i - 1]) * (values[i] + values[i - 1]);
        }
        out.push(acc);
    }
    out
}

/// Envelope sampled at `input.times`.
pub fn gronwall_envelope(input: &EnvelopeInput) -> Result<Vec<f64>> {
    envelope_with_constant(input, 1.0)
}

/// Same envelope with the rate function multiplied by `constant`.
pub fn envelope_with_constant(input: &EnvelopeInput, constant: f64) -> Result<Vec<f64>> {
    input.validate()?;
    if !(constant >= 0.0) {
        return Err(Error::InvalidParameter(format!("constant must be nonnegative, got {constant}")));
    }
    Ok(cumulative_trapezoid(&input.times, &input.integrand)
        .into_iter()
        .map(|c| {
            let e = (constant * c).exp();
            e * input.initial + (e - 1.0) * input.defect
        })
        .collect())
}

/// Smallest constant for which every `measured` sample sits below the
/// envelope, or `None` when no constant up to `1e8` achieves it.
pub fn fit_constant(input: &EnvelopeInput, measured: &[f64]) -> Result<Option<f64>> {
    input.validate()?;
    if measured.len() != input.times.len() {
        return Err(Error::InvalidParameter("measured samples do not match the time grid".into()));
    }
    let slack = |v: f64| 1e-12 * v.abs().max(1.0);
    let holds = |c: f64| -> Result<bool> {
        let env = envelope_with_constant(input, c)?;
        Ok(env.iter().zip(measured).all(|(e, m)| *m <= *e + slack(*m)))
    };
    if holds(0.0)? {
        return Ok(Some(0.0));
    }
    let mut hi = 1.0;
    while !holds(hi)? {
        hi *= 2.0;
        if hi > 1e8 {
            return Ok(None);
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if holds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-10 * hi {
            break;
        }
    }
    Ok(Some(hi))
}
