//! Confined eigenmodes and the effective Hartree / NLS dynamics on Ω_f.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{ConfinedDomain, FreeDomain, GridDomain, GridFunction, Space};
use crate::interaction::InteractionProfile;
use crate::model::{Convolution, ModelSpec, Regime};
use crate::spectral::{fft_nd, SpectralPlan, C64};

/// Eigenmode `χ_m` of the Dirichlet Laplacian on Ω_c.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfinedMode {
    pub index: usize,
    /// Sine quantum number (≥ 1) on each axis.
    pub quanta: Vec<usize>,
    pub chi: GridFunction,
    /// Eigenvalue of `-Δ_y`.
    pub eigenvalue: f64,
    pub epsilon: f64,
}

impl ConfinedMode {
    /// `E_m^ε = ε⁻² E_m`.
    pub fn scaled_eigenvalue(&self) -> f64 {
        self.eigenvalue / (self.epsilon * self.epsilon)
    }

    pub fn domain(&self) -> &ConfinedDomain {
        match &self.chi.domain {
            GridDomain::Confined(c) => c,
            _ => unreachable!("confined modes live on confined domains"),
        }
    }

    /// `∫ |χ|⁴`.
    pub fn quartic_integral(&self) -> f64 {
        self.chi.values.iter().map(|v| v.norm_sqr().powi(2)).sum::<f64>() * self.chi.domain.cell_volume()
    }
}

/// The `m`-th Dirichlet eigenmode, ordered by eigenvalue (ties broken
/// lexicographically in the per-axis quanta).
pub fn chi_mode(domain: &ConfinedDomain, m: usize) -> Result<ConfinedMode> {
    domain.validate()?;
    let limit = *domain.points.iter().min().unwrap_or(&0);
    if m + 1 >= limit {
        return Err(Error::OutOfRange(format!(
            "mode index {m} needs m < n_c - 1 = {}",
            limit.saturating_sub(1)
        )));
    }
    let dim = domain.dim();
    let counts: Vec<usize> = domain.points.iter().map(|n| n - 1).collect();
    let total: usize = counts.iter().product();
    let mut candidates: Vec<(f64, Vec<usize>)> = (0..total)
        .map(|flat| {
            let mut rem = flat;
            let mut q = vec![0usize; dim];
            for a in (0..dim).rev() {
                q[a] = rem % counts[a] + 1;
                rem /= counts[a];
            }
            let e: f64 = (0..dim).map(|a| (q[a] as f64 * PI / domain.length(a)).powi(2)).sum();
            (e, q)
        })
        .collect();
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0).then_with(|| x.1.cmp(&y.1)));
    let (eigenvalue, quanta) = candidates[m].clone();
    let chi = GridFunction::from_confined_fn(domain, |y| {
        let mut v = 1.0;
        for a in 0..dim {
            let len = domain.length(a);
            v *= (2.0 / len).sqrt() * (quanta[a] as f64 * PI * (y[a] - domain.lower[a]) / len).sin();
        }
        C64::new(v, 0.0)
    });
    Ok(ConfinedMode {
        index: m,
        quanta,
        chi,
        eigenvalue,
        epsilon: domain.epsilon,
    })
}

/// `b = ∫_{ℝ^d} w · ∫ |χ₀|⁴`, with `d = d_f + d_c`.
pub fn coupling_b(w: &InteractionProfile, chi0: &ConfinedMode, free_dim: usize) -> Result<f64> {
    if chi0.index != 0 {
        return Err(Error::InvalidParameter("the coupling uses the ground mode".into()));
    }
    let d = free_dim + chi0.domain().dim();
    Ok(w.integral(d)? * chi0.quartic_integral())
}

/// Effective wavefunction `Φ` with the occupied confined mode.
#[derive(Debug, Clone, PartialEq)]
pub struct OneBodyState {
    pub phi: GridFunction,
    pub mode: ConfinedMode,
    pub t: f64,
}

impl OneBodyState {
    pub fn new(phi: GridFunction, mode: ConfinedMode) -> Result<Self> {
        if !matches!(phi.domain, GridDomain::Free(_)) || phi.space != Space::Position {
            return Err(Error::DomainMismatch("Φ must be position samples on the free domain".into()));
        }
        let n = phi.norm();
        if (n - 1.0).abs() > 1e-8 {
            return Err(Error::NotNormalized(n));
        }
        Ok(Self { phi, mode, t: 0.0 })
    }

    pub fn free_domain(&self) -> &FreeDomain {
        match &self.phi.domain {
            GridDomain::Free(f) => f,
            _ => unreachable!("validated at construction"),
        }
    }

    /// `φ = Φ ⊗ χ` on Ω.
    pub fn product(&self) -> GridFunction {
        GridFunction::product(&self.phi, &self.mode.chi).expect("free and confined factors")
    }
}

/// Normalized Gaussian wave packet on the free domain.
pub fn gaussian_packet(domain: &FreeDomain, center: &[f64], width: f64, momentum: &[f64]) -> Result<GridFunction> {
    GridFunction::from_free_fn(domain, |x| {
        let mut r2 = 0.0;
        let mut phase = 0.0;
        for (a, &xa) in x.iter().enumerate() {
            let dx = xa - center.get(a).copied().unwrap_or(0.0);
            r2 += dx * dx;
            phase += momentum.get(a).copied().unwrap_or(0.0) * xa;
        }
        C64::from_polar((-r2 / (4.0 * width * width)).exp(), phase)
    })
    .normalized()
}

/// `(w⁰ * |Φ|²)(x)` on the free grid.
pub fn hartree_potential(phi: &GridFunction, spec: &ModelSpec) -> Result<Vec<f64>> {
    let GridDomain::Free(domain) = &phi.domain else {
        return Err(Error::DomainMismatch("hartree potential needs Φ on the free domain".into()));
    };
    let w = &spec.interaction;
    if !w.is_bounded() {
        return Err(Error::NotIntegrable("the hartree kernel must be bounded".into()));
    }
    let density: Vec<f64> = phi.values.iter().map(|v| v.norm_sqr()).collect();
    convolve_free(domain, &density, |dx| spec.kernel_free(dx), w.support_radius(), spec.convolution)
}

/// `(k * ρ)` on the free grid, with kernel `k` given on displacements.
pub fn convolve_free(
    domain: &FreeDomain,
    density: &[f64],
    kernel: impl Fn(&[f64]) -> f64,
    support: Option<f64>,
    mode: Convolution,
) -> Result<Vec<f64>> {
    let dim = domain.dim();
    let dv = domain.cell_volume();
    match mode {
        Convolution::Periodic => {
            let shape = domain.points.clone();
            let total = domain.len();
            let mut kern: Vec<C64> = (0..total).map(|i| C64::new(kernel(&domain.min_image(i, 0)), 0.0)).collect();
            let mut rho: Vec<C64> = density.iter().map(|&r| C64::new(r, 0.0)).collect();
            fft_nd(&mut kern, &shape, false);
            fft_nd(&mut rho, &shape, false);
            for (a, b) in rho.iter_mut().zip(&kern) {
                *a *= b;
            }
            fft_nd(&mut rho, &shape, true);
            let scale = dv / total as f64;
            Ok(rho.iter().map(|v| v.re * scale).collect())
        }
        Convolution::Padded => {
            if let Some(r) = support {
                let reach = domain.extent.iter().cloned().fold(f64::INFINITY, f64::min);
                if r > reach {
                    return Err(Error::SupportTooWide(format!(
                        "kernel support {r} exceeds the padded reach {reach}"
                    )));
                }
            }
            let shape: Vec<usize> = domain.points.iter().map(|n| 2 * n).collect();
            let total: usize = shape.iter().product();
            let mut kern = vec![C64::new(0.0, 0.0); total];
            let mut rho = vec![C64::new(0.0, 0.0); total];
            let mut disp = vec![0.0; dim];
            for (i, slot) in kern.iter_mut().enumerate() {
                let mut rem = i;
                for a in (0..dim).rev() {
                    let m = shape[a];
                    let j = (rem % m) as i64;
                    rem /= m;
                    let s = if j < m as i64 / 2 { j } else { j - m as i64 };
                    disp[a] = s as f64 * domain.spacing(a);
                }
                *slot = C64::new(kernel(&disp), 0.0);
            }
            for (i, &r) in density.iter().enumerate() {
                let mut rem = i;
                let mut flat = 0;
                let mut stride = 1;
                for a in (0..dim).rev() {
                    let n = domain.points[a];
                    flat += (rem % n) * stride;
                    rem /= n;
                    stride *= shape[a];
                }
                rho[flat] = C64::new(r, 0.0);
            }
            fft_nd(&mut kern, &shape, false);
            fft_nd(&mut rho, &shape, false);
            for (a, b) in rho.iter_mut().zip(&kern) {
                *a *= b;
            }
            fft_nd(&mut rho, &shape, true);
            let scale = dv / total as f64;
            let mut out = vec![0.0; domain.len()];
            for (i, o) in out.iter_mut().enumerate() {
                let mut rem = i;
                let mut flat = 0;
                let mut stride = 1;
                for a in (0..dim).rev() {
                    let n = domain.points[a];
                    flat += (rem % n) * stride;
                    rem /= n;
                    stride *= shape[a];
                }
                *o = rho[flat].re * scale;
            }
            Ok(out)
        }
    }
}

/// Nonlinear potential felt by Φ: `w⁰ * |Φ|²` or `b |Φ|²`.
pub fn mean_field_potential(phi: &GridFunction, spec: &ModelSpec, b: f64) -> Result<Vec<f64>> {
    match spec.regime {
        Regime::HartreeTheta0 => hartree_potential(phi, spec),
        Regime::NlsTheta => Ok(phi.values.iter().map(|v| b * v.norm_sqr()).collect()),
    }
}

/// Split-step propagator for the effective equation.
pub struct OneBodyPropagator {
    spec: ModelSpec,
    domain: FreeDomain,
    plan: SpectralPlan,
    half_kinetic: Vec<C64>,
    points: Vec<Vec<f64>>,
    dt: f64,
    b: f64,
}

impl OneBodyPropagator {
    pub fn new(spec: &ModelSpec, dt: f64) -> Result<Self> {
        spec.validate()?;
        let domain = spec.domain.free.clone();
        let plan = SpectralPlan::new(&domain.axes());
        let half_kinetic = plan.symbol_table(|k| {
            let k2: f64 = k.iter().map(|v| v * v).sum();
            C64::from_polar(1.0, -0.5 * dt * k2)
        });
        let points = (0..domain.len()).map(|i| domain.point(i)).collect();
        let b = match spec.regime {
            Regime::NlsTheta => {
                let chi0 = chi_mode(&spec.domain.confined, 0)?;
                coupling_b(&spec.interaction, &chi0, domain.dim())?
            }
            Regime::HartreeTheta0 => 0.0,
        };
        Ok(Self {
            spec: spec.clone(),
            domain,
            plan,
            half_kinetic,
            points,
            dt,
            b,
        })
    }

    pub fn coupling(&self) -> f64 {
        self.b
    }

    fn kinetic(&self, values: &mut [C64]) {
        self.plan.forward(values);
        for (v, u) in values.iter_mut().zip(&self.half_kinetic) {
            *v *= u;
        }
        self.plan.inverse(values);
    }

    /// One Strang step `e^{-iΔt K/2} e^{-iΔt V} e^{-iΔt K/2}`.
    pub fn step(&self, state: &mut OneBodyState) -> Result<()> {
        self.kinetic(&mut state.phi.values);
        let mid = state.t + 0.5 * self.dt;
        let nonlinear = mean_field_potential(&state.phi, &self.spec, self.b)?;
        let mut worst: f64 = 0.0;
        let phases: Vec<f64> = nonlinear
            .iter()
            .zip(&self.points)
            .map(|(u, x)| {
                let v = u + self.spec.potential.eval(mid, x);
                worst = worst.max(v.abs());
                v
            })
            .collect();
        let increment = worst * self.dt.abs();
        if increment > PI {
            return Err(Error::AliasingGuard {
                increment,
                max_dt: PI / worst,
            });
        }
        for (v, p) in state.phi.values.iter_mut().zip(&phases) {
            *v *= C64::from_polar(1.0, -self.dt * p);
        }
        self.kinetic(&mut state.phi.values);
        state.t += self.dt;
        Ok(())
    }

    pub fn domain(&self) -> &FreeDomain {
        &self.domain
    }
}

/// Number of steps of size `dt` that cover `horizon`; errors when the
/// ratio is not an integer.
pub fn step_count(horizon: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
    }
    let ratio = horizon.abs() / dt;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-9 * ratio.max(1.0) {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} is not an integer multiple of dt {dt}"
        )));
    }
    Ok(n as usize)
}

/// Evolves to `t + horizon` (backwards when `horizon < 0`) and returns the
/// states at every `stride`-th step, including the first and last.
pub fn evolve_effective(
    state: &OneBodyState,
    spec: &ModelSpec,
    horizon: f64,
    dt: f64,
    stride: usize,
) -> Result<Vec<OneBodyState>> {
    let steps = step_count(horizon, dt)?;
    let signed = dt.copysign(horizon);
    let prop = OneBodyPropagator::new(spec, signed)?;
    let stride = stride.max(1);
    let mut s = state.clone();
    let mut out = vec![s.clone()];
    for k in 1..=steps {
        prop.step(&mut s)?;
        if k % stride == 0 || k == steps {
            out.push(s.clone());
        }
    }
    Ok(out)
}

/// Per-particle effective energy `E^φ`, including `ε⁻² E_m`.
pub fn effective_energy(state: &OneBodyState, spec: &ModelSpec) -> Result<f64> {
    let b = match spec.regime {
        Regime::NlsTheta => coupling_b(&spec.interaction, &chi_mode(&spec.domain.confined, 0)?, spec.domain.free.dim())?,
        Regime::HartreeTheta0 => 0.0,
    };
    energy_parts(state, spec, b).map(|p| p.total())
}

/// Components of `E^φ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyParts {
    pub kinetic: f64,
    pub confined: f64,
    pub external: f64,
    pub interaction: f64,
}

impl EnergyParts {
    pub fn total(&self) -> f64 {
        self.kinetic + self.confined + self.external + self.interaction
    }
}

pub fn energy_parts(state: &OneBodyState, spec: &ModelSpec, b: f64) -> Result<EnergyParts> {
    let domain = state.free_domain();
    let spectral = state.phi.to_spectral();
    let plan = SpectralPlan::new(&domain.axes());
    let k2 = plan.symbol_table(|k| C64::new(k.iter().map(|v| v * v).sum(), 0.0));
    let kinetic: f64 = spectral.values.iter().zip(&k2).map(|(c, s)| c.norm_sqr() * s.re).sum();
    let dv = domain.cell_volume();
    let external: f64 = state
        .phi
        .values
        .iter()
        .enumerate()
        .map(|(i, v)| v.norm_sqr() * spec.potential.eval(state.t, &domain.point(i)))
        .sum::<f64>()
        * dv;
    let u = mean_field_potential(&state.phi, spec, b)?;
    let interaction = 0.5 * state.phi.values.iter().zip(&u).map(|(v, p)| v.norm_sqr() * p).sum::<f64>() * dv;
    Ok(EnergyParts {
        kinetic,
        confined: state.mode.scaled_eigenvalue(),
        external,
        interaction,
    })
}

/// `(‖φ‖_∞, ‖Φ‖_∞, ‖φ‖_{H²}, ‖ΔΦ‖_{L²})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupNorms {
    pub sup_phi: f64,
    pub sup_big_phi: f64,
    pub h2_phi: f64,
    pub laplacian_big_phi: f64,
}

pub fn sup_norms(state: &OneBodyState) -> SupNorms {
    let domain = state.free_domain();
    let sup_big_phi = state.phi.sup_norm();
    let sup_phi = sup_big_phi * state.mode.chi.sup_norm();
    let free_plan = SpectralPlan::new(&domain.axes());
    let kf = free_plan.symbol_table(|k| C64::new(k.iter().map(|v| v * v).sum(), 0.0));
    let fhat = state.phi.to_spectral();
    let conf_plan = SpectralPlan::new(&state.mode.domain().axes());
    let kc = conf_plan.symbol_table(|k| C64::new(k.iter().map(|v| v * v).sum(), 0.0));
    let chat = state.mode.chi.to_spectral();
    let mut h2 = 0.0;
    let mut lap = 0.0;
    for (a, ka) in fhat.values.iter().zip(&kf) {
        let wa = a.norm_sqr();
        lap += ka.re * ka.re * wa;
        for (c, kc) in chat.values.iter().zip(&kc) {
            h2 += (1.0 + ka.re + kc.re).powi(2) * wa * c.norm_sqr();
        }
    }
    SupNorms {
        sup_phi,
        sup_big_phi,
        h2_phi: h2.sqrt(),
        laplacian_big_phi: lap.sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Domain;

    fn unit_interval(eps: f64) -> ConfinedDomain {
        ConfinedDomain::cube(1, -0.5, 0.5, 16, eps).unwrap()
    }

    #[test]
    fn ground_mode_eigenvalue_and_scaling() {
        let m = chi_mode(&unit_interval(1.0), 0).unwrap();
        assert!((m.eigenvalue - PI * PI).abs() < 1e-12);
        assert!((m.chi.norm() - 1.0).abs() < 1e-12);
        let m = chi_mode(&unit_interval(0.1), 0).unwrap();
        assert!((m.scaled_eigenvalue() - 100.0 * PI * PI).abs() < 1e-9);
        assert!((m.quartic_integral() - 1.5).abs() < 1e-12);
        assert!(chi_mode(&unit_interval(1.0), 15).is_err());
    }

    #[test]
    fn mode_is_laplacian_eigenfunction() {
        let dom = ConfinedDomain::cube(2, -0.5, 0.5, 8, 0.5).unwrap();
        for m in 0..4 {
            let mode = chi_mode(&dom, m).unwrap();
            let lap = crate::grid::laplacian_confined(&mode.chi, 0.5).unwrap();
            let ev = mode.scaled_eigenvalue();
            for (a, b) in lap.values.iter().zip(&mode.chi.values) {
                assert!((a - b * ev).norm() < 1e-8 * ev);
            }
        }
        let e: Vec<f64> = (0..4).map(|m| chi_mode(&dom, m).unwrap().eigenvalue).collect();
        assert!(e.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(chi_mode(&dom, 1).unwrap().quanta, vec![1, 2]);
    }

    #[test]
    fn coupling_on_unit_square() {
        let dom = ConfinedDomain::cube(2, -0.5, 0.5, 16, 1.0).unwrap();
        let chi = chi_mode(&dom, 0).unwrap();
        let w = InteractionProfile::unit_mass_gaussian(0.2, 3).unwrap();
        assert!((coupling_b(&w, &chi, 1).unwrap() - 2.25).abs() < 1e-10);
        let zero = InteractionProfile::zero();
        assert_eq!(coupling_b(&zero, &chi, 1).unwrap(), 0.0);
        assert!(coupling_b(&InteractionProfile::Coulomb { amplitude: 1.0 }, &chi, 1).is_err());
    }

    #[test]
    fn padded_and_periodic_convolutions_agree_for_narrow_kernels() {
        let free = FreeDomain::cube(1, 16.0, 64).unwrap();
        let phi = gaussian_packet(&free, &[0.0], 1.0, &[0.0]).unwrap();
        let dom = Domain::new(free, unit_interval(1.0)).unwrap();
        let w = InteractionProfile::CompactPolynomialBump {
            amplitude: 1.0,
            radius: 1.0,
        };
        let mut spec = ModelSpec::hartree(2, dom, w);
        let a = hartree_potential(&phi, &spec).unwrap();
        spec.convolution = Convolution::Periodic;
        let b = hartree_potential(&phi, &spec).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12);
            assert!(*x >= -1e-14);
        }
    }
}
