//! Radial pair-interaction profiles `w(r)` on ℝ^d and their norms.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate;

/// Truncation radius of the Gaussian bump in units of `sigma`.
pub const GAUSSIAN_CUTOFF: f64 = 6.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InteractionProfile {
    /// `A exp(-r²/2σ²)` for `r < 6σ`, zero beyond.
    GaussianBump { amplitude: f64, sigma: f64 },
    /// `A (1 - r²/R²)³` for `r < R`.
    CompactPolynomialBump { amplitude: f64, radius: f64 },
    /// `A / r`; the part inside the unit ball is the singular component.
    Coulomb { amplitude: f64 },
    /// Piecewise-linear in `r` through the given nodes, zero past the last.
    Tabulated { radii: Vec<f64>, values: Vec<f64> },
}

/// Surface area of the unit sphere in ℝ^d.
pub fn sphere_area(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        4 => 2.0 * PI * PI,
        _ => panic!("unsupported dimension {d}"),
    }
}

impl InteractionProfile {
    pub fn zero() -> Self {
        InteractionProfile::CompactPolynomialBump {
            amplitude: 0.0,
            radius: 1.0,
        }
    }

    /// Gaussian bump normalized so that its (truncated) integral over ℝ^d is 1.
    pub fn unit_mass_gaussian(sigma: f64, d: usize) -> Result<Self> {
        let probe = InteractionProfile::GaussianBump { amplitude: 1.0, sigma };
        let mass = probe.integral(d)?;
        Ok(InteractionProfile::GaussianBump {
            amplitude: 1.0 / mass,
            sigma,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |c: bool, msg: &str| if c { Ok(()) } else { Err(Error::InvalidParameter(msg.into())) };
        match self {
            InteractionProfile::GaussianBump { amplitude, sigma } => {
                ok(amplitude.is_finite(), "gaussian amplitude must be finite")?;
                ok(*sigma > 0.0 && sigma.is_finite(), "gaussian sigma must be positive")
            }
            InteractionProfile::CompactPolynomialBump { amplitude, radius } => {
                ok(amplitude.is_finite(), "bump amplitude must be finite")?;
                ok(*radius > 0.0 && radius.is_finite(), "bump radius must be positive")
            }
            InteractionProfile::Coulomb { amplitude } => ok(amplitude.is_finite(), "coulomb amplitude must be finite"),
            InteractionProfile::Tabulated { radii, values } => {
                ok(radii.len() >= 2 && radii.len() == values.len(), "tabulated profile needs >= 2 matching nodes")?;
                ok(radii[0] >= 0.0, "tabulated radii must be nonnegative")?;
                ok(radii.windows(2).all(|w| w[1] > w[0]), "tabulated radii must increase")?;
                ok(values.iter().all(|v| v.is_finite()), "tabulated values must be finite")
            }
        }
    }

    /// `w(r)`.
    pub fn radial(&self, r: f64) -> f64 {
        match self {
            InteractionProfile::GaussianBump { amplitude, sigma } => {
                if r < GAUSSIAN_CUTOFF * sigma {
                    amplitude * (-0.5 * (r / sigma).powi(2)).exp()
                } else {
                    0.0
                }
            }
            InteractionProfile::CompactPolynomialBump { amplitude, radius } => {
                if r < *radius {
                    amplitude * (1.0 - (r / radius).powi(2)).powi(3)
                } else {
                    0.0
                }
            }
            InteractionProfile::Coulomb { amplitude } => amplitude / r,
            InteractionProfile::Tabulated { radii, values } => {
                let last = radii.len() - 1;
                if r >= radii[last] {
                    return 0.0;
                }
                if r <= radii[0] {
                    return values[0];
                }
                let j = radii.partition_point(|&x| x <= r) - 1;
                let s = (r - radii[j]) / (radii[j + 1] - radii[j]);
                values[j] * (1.0 - s) + values[j + 1] * s
            }
        }
    }

    /// `w` at a point given by its coordinates.
    pub fn eval(&self, point: &[f64]) -> f64 {
        self.radial(point.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// Outer radius of the support, `None` when unbounded.
    pub fn support_radius(&self) -> Option<f64> {
        match self {
            InteractionProfile::GaussianBump { sigma, .. } => Some(GAUSSIAN_CUTOFF * sigma),
            InteractionProfile::CompactPolynomialBump { radius, .. } => Some(*radius),
            InteractionProfile::Coulomb { .. } => None,
            InteractionProfile::Tabulated { radii, .. } => radii.last().copied(),
        }
    }

    /// Length over which the profile varies; used by the resolvability guard.
    pub fn length_scale(&self) -> f64 {
        match self {
            InteractionProfile::GaussianBump { sigma, .. } => 2.0 * sigma,
            InteractionProfile::CompactPolynomialBump { radius, .. } => *radius,
            InteractionProfile::Coulomb { .. } => 1.0,
            InteractionProfile::Tabulated { radii, .. } => radii[radii.len() - 1],
        }
    }

    pub fn is_bounded(&self) -> bool {
        !matches!(self, InteractionProfile::Coulomb { .. })
    }

    /// Radius below which `w` is assigned to the singular part `w_s`.
    pub fn singular_cutoff(&self) -> f64 {
        if self.is_bounded() {
            0.0
        } else {
            1.0
        }
    }

    pub fn singular_part(&self, r: f64) -> f64 {
        if r < self.singular_cutoff() {
            self.radial(r)
        } else {
            0.0
        }
    }

    pub fn bounded_part(&self, r: f64) -> f64 {
        if r < self.singular_cutoff() {
            0.0
        } else {
            self.radial(r)
        }
    }

    /// Same profile with the amplitude multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self.clone() {
            InteractionProfile::GaussianBump { amplitude, sigma } => InteractionProfile::GaussianBump {
                amplitude: amplitude * factor,
                sigma,
            },
            InteractionProfile::CompactPolynomialBump { amplitude, radius } => {
                InteractionProfile::CompactPolynomialBump {
                    amplitude: amplitude * factor,
                    radius,
                }
            }
            InteractionProfile::Coulomb { amplitude } => InteractionProfile::Coulomb {
                amplitude: amplitude * factor,
            },
            InteractionProfile::Tabulated { radii, values } => InteractionProfile::Tabulated {
                radii,
                values: values.into_iter().map(|v| v * factor).collect(),
            },
        }
    }

    /// Breakpoints of the radial profile inside `[0, outer]`, for quadrature.
    fn breakpoints(&self, outer: f64) -> Vec<f64> {
        let mut pts = vec![0.0];
        if let InteractionProfile::Tabulated { radii, .. } = self {
            pts.extend(radii.iter().copied().filter(|&r| r > 0.0 && r < outer));
        }
        pts.push(outer);
        pts
    }

    fn radial_integral(&self, d: usize, outer: f64, g: impl Fn(f64) -> f64) -> Result<f64> {
        let pts = self.breakpoints(outer);
        let mut total = 0.0;
        for w in pts.windows(2) {
            total += integrate(|r| r.powi(d as i32 - 1) * g(r), w[0], w[1], 1e-14, 1e-12)?;
        }
        Ok(total * sphere_area(d))
    }

    /// `∫_{ℝ^d} w`.
    pub fn integral(&self, d: usize) -> Result<f64> {
        let Some(outer) = self.support_radius() else {
            return Err(Error::NotIntegrable("the coulomb profile has no finite integral".into()));
        };
        self.radial_integral(d, outer, |r| self.radial(r))
    }

    /// `‖w‖_{L^s(ℝ^d)}` for a compactly supported profile.
    pub fn lp_norm(&self, s: f64, d: usize) -> Result<f64> {
        let Some(outer) = self.support_radius() else {
            return Err(Error::NotIntegrable("the coulomb profile is not in any L^s(ℝ^d)".into()));
        };
        Ok(self.radial_integral(d, outer, |r| self.radial(r).abs().powf(s))?.powf(1.0 / s))
    }

    /// `‖w_s‖_{L^s(ℝ^d)}`; zero for bounded profiles.
    pub fn singular_lp_norm(&self, s: f64, d: usize) -> Result<f64> {
        let rc = self.singular_cutoff();
        if rc == 0.0 {
            return Ok(0.0);
        }
        if s >= d as f64 {
            return Err(Error::NotIntegrable(format!(
                "1/r is not in L^{s} near the origin of ℝ^{d}"
            )));
        }
        let InteractionProfile::Coulomb { amplitude } = self else {
            unreachable!()
        };
        // ∫_0^1 r^{d-1-s} dr in closed form
        let radial = 1.0 / (d as f64 - s);
        Ok(amplitude.abs() * (sphere_area(d) * radial).powf(1.0 / s))
    }

    /// `‖w_∞‖_{L^∞}`.
    pub fn bounded_sup(&self) -> f64 {
        match self {
            InteractionProfile::GaussianBump { amplitude, .. }
            | InteractionProfile::CompactPolynomialBump { amplitude, .. } => amplitude.abs(),
            InteractionProfile::Coulomb { amplitude } => amplitude.abs() / self.singular_cutoff(),
            InteractionProfile::Tabulated { values, .. } => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }
}
