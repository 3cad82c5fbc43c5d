//! Problem definition shared by the one-body and many-body solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Domain;
use crate::interaction::InteractionProfile;

/// Scaling regime of the pair interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// θ = 0: `(N-1)⁻¹ w(x, εy)`, effective Hartree equation.
    HartreeTheta0,
    /// θ ∈ (0, 1): `a^{1-dθ}`-scaled contact-like interaction, effective NLS.
    NlsTheta,
}

/// Mean-field prefactor multiplying the pair interaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Prefactor {
    #[default]
    NMinusOne,
    N,
}

/// How the Hartree convolution treats the free box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Convolution {
    /// Linear convolution with zero padding.
    #[default]
    Padded,
    /// Circular convolution with the minimum-image kernel, matching the
    /// many-body pair interaction.
    Periodic,
}

/// External potential acting on the free coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExternalPotential {
    #[default]
    Zero,
    /// `k |x - c|²`
    Harmonic { strength: f64, center: Vec<f64> },
    /// `k (1 + a sin(ω t)) |x|²`
    Driven {
        strength: f64,
        amplitude: f64,
        frequency: f64,
    },
}

impl ExternalPotential {
    pub fn eval(&self, t: f64, x: &[f64]) -> f64 {
        match self {
            ExternalPotential::Zero => 0.0,
            ExternalPotential::Harmonic { strength, center } => {
                strength
                    * x.iter()
                        .enumerate()
                        .map(|(i, v)| (v - center.get(i).copied().unwrap_or(0.0)).powi(2))
                        .sum::<f64>()
            }
            ExternalPotential::Driven {
                strength,
                amplitude,
                frequency,
            } => strength * (1.0 + amplitude * (frequency * t).sin()) * x.iter().map(|v| v * v).sum::<f64>(),
        }
    }

    /// `∂_t V(t, x)`.
    pub fn time_derivative(&self, t: f64, x: &[f64]) -> f64 {
        match self {
            ExternalPotential::Driven {
                strength,
                amplitude,
                frequency,
            } => strength * amplitude * frequency * (frequency * t).cos() * x.iter().map(|v| v * v).sum::<f64>(),
            _ => 0.0,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExternalPotential::Zero => true,
            ExternalPotential::Harmonic { strength, .. } | ExternalPotential::Driven { strength, .. } => {
                *strength == 0.0
            }
        }
    }

    pub fn is_autonomous(&self) -> bool {
        !matches!(self, ExternalPotential::Driven { amplitude, frequency, .. } if *amplitude != 0.0 && *frequency != 0.0)
    }
}

/// Complete problem definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub n_particles: usize,
    pub theta: f64,
    /// Exponent in `ε(N) = N^{-ν}`, when ε is tied to N.
    pub nu: Option<f64>,
    pub regime: Regime,
    pub prefactor: Prefactor,
    pub interaction: InteractionProfile,
    pub potential: ExternalPotential,
    pub domain: Domain,
    /// Index of the confined mode χ_m occupied by the condensate.
    pub mode: usize,
    #[serde(default)]
    pub convolution: Convolution,
}

impl ModelSpec {
    pub fn hartree(n_particles: usize, domain: Domain, interaction: InteractionProfile) -> Self {
        Self {
            n_particles,
            theta: 0.0,
            nu: None,
            regime: Regime::HartreeTheta0,
            prefactor: Prefactor::NMinusOne,
            interaction,
            potential: ExternalPotential::Zero,
            domain,
            mode: 0,
            convolution: Convolution::Padded,
        }
    }

    pub fn nls(n_particles: usize, theta: f64, domain: Domain, interaction: InteractionProfile) -> Self {
        Self {
            theta,
            regime: Regime::NlsTheta,
            ..Self::hartree(n_particles, domain, interaction)
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.domain.epsilon()
    }

    pub fn validate(&self) -> Result<()> {
        self.domain.free.validate()?;
        self.domain.confined.validate()?;
        self.interaction.validate()?;
        if self.n_particles < 1 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        match self.regime {
            Regime::HartreeTheta0 if self.theta != 0.0 => {
                return Err(Error::RegimeMismatch(format!(
                    "the hartree regime needs theta = 0, got {}",
                    self.theta
                )))
            }
            Regime::NlsTheta if !(self.theta > 0.0 && self.theta < 1.0) => {
                return Err(Error::RegimeMismatch(format!(
                    "the nls regime needs theta in (0, 1), got {}",
                    self.theta
                )))
            }
            _ => {}
        }
        if let Some(nu) = self.nu {
            if !(nu > 0.0) {
                return Err(Error::InvalidParameter(format!("nu must be positive, got {nu}")));
            }
        }
        if self.mode + 1 >= *self.domain.confined.points.iter().min().unwrap_or(&0) {
            return Err(Error::OutOfRange(format!("confined mode index {} too large for the grid", self.mode)));
        }
        Ok(())
    }

    /// Checks the parameter window in which the θ > 0 rate applies.
    pub fn check_rate_window(&self) -> Result<()> {
        let theta = self.theta;
        if !(theta > 0.25 && theta < 1.0 / 3.0) {
            return Err(Error::OutOfRange(format!("theta = {theta} outside (1/4, 1/3)")));
        }
        let nu = self
            .nu
            .ok_or_else(|| Error::InvalidParameter("nu is required for the rate window".into()))?;
        let hi = theta / (1.0 - 2.0 * theta);
        if !(nu > 0.5 && nu < hi) {
            return Err(Error::OutOfRange(format!("nu = {nu} outside (1/2, {hi})")));
        }
        Ok(())
    }

    /// `a = ε^{d_c} / N`.
    pub fn scaling_a(&self) -> f64 {
        self.epsilon().powi(self.domain.confined.dim() as i32) / self.n_particles as f64
    }

    /// Factor λ with `W = λ · w^{ε,θ,N}`.
    pub fn pair_prefactor(&self) -> f64 {
        let n = self.n_particles as f64;
        match self.prefactor {
            Prefactor::NMinusOne if self.n_particles > 1 => 1.0 / (n - 1.0),
            Prefactor::NMinusOne => 0.0,
            Prefactor::N => 1.0 / n,
        }
    }

    /// Unprefactored pair kernel in computational coordinates, at free
    /// displacement `dx` and confined displacement `dy`.
    pub fn kernel(&self, dx: &[f64], dy: &[f64]) -> f64 {
        let eps = self.epsilon();
        let r2: f64 = dx.iter().map(|v| v * v).sum::<f64>() + dy.iter().map(|v| (eps * v).powi(2)).sum::<f64>();
        match self.regime {
            Regime::HartreeTheta0 => self.interaction.radial(r2.sqrt()),
            Regime::NlsTheta => {
                let a = self.scaling_a();
                let d = self.domain.total_dim() as f64;
                let dc = self.domain.confined.dim() as i32;
                eps.powi(dc) * a.powf(-d * self.theta) * self.interaction.radial(a.powf(-self.theta) * r2.sqrt())
            }
        }
    }

    /// Kernel restricted to the free plane, `w⁰(x) = w(x, 0)`, used by the
    /// Hartree equation.
    pub fn kernel_free(&self, dx: &[f64]) -> f64 {
        self.interaction.radial(dx.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// Smallest scaled interaction length must cover 3 grid spacings on every axis.
    pub fn check_resolvable(&self) -> Result<()> {
        if self.regime != Regime::NlsTheta {
            return Ok(());
        }
        let scale = self.scaling_a().powf(self.theta) * self.interaction.length_scale();
        let f = &self.domain.free;
        for a in 0..f.dim() {
            let h = f.spacing(a);
            if scale < 3.0 * h {
                let need = (3.0 * f.extent[a] / scale).ceil() as usize;
                return Err(Error::Unresolvable {
                    support: scale,
                    spacing: h,
                    required_points: need.next_power_of_two(),
                });
            }
        }
        let c = &self.domain.confined;
        let eps = self.epsilon();
        for a in 0..c.dim() {
            let h = c.spacing(a);
            if scale / eps < 3.0 * h {
                let need = (3.0 * c.length(a) * eps / scale).ceil() as usize;
                return Err(Error::Unresolvable {
                    support: scale / eps,
                    spacing: h,
                    required_points: need.next_power_of_two(),
                });
            }
        }
        Ok(())
    }
}
