use std::f64::consts::PI;

use serde::Serialize;

use super::coulomb::coulomb_confined_norms;
use super::gronwall::cumulative_trapezoid;
use crate::error::{Error, Result};
use crate::interaction::InteractionProfile;
use crate::model::ModelSpec;
use crate::onebody::{sup_norms, OneBodyState, SupNorms};
use crate::spectral::{SpectralPlan, C64};

/// Interaction norms entering the θ = 0 rate function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thm1Norms {
    /// `‖w⁰_s‖_{L¹(Ω_f)}`
    pub w0_s_l1: f64,
    /// `‖w⁰_∞‖_∞`
    pub w0_inf: f64,
    /// `‖w^ε_s‖_{L²}`, computational coordinates
    pub weps_s_l2: f64,
    /// `‖w^ε_∞‖_∞`
    pub weps_inf: f64,
}

impl Thm1Norms {
    /// Norms of the split `w = w_s + w_∞` at the profile's singular cutoff.
    /// The L² norm of `w^ε_s` uses the change of variables `y → εy`, which
    /// bounds the confined-box integral by `ε^{-d_c/2}‖w_s‖_{L²(ℝ^d)}`.
    pub fn from_spec(spec: &ModelSpec) -> Result<Self> {
        let w = &spec.interaction;
        let df = spec.domain.free.dim();
        let dc = spec.domain.confined.dim();
        let eps = spec.epsilon();
        Ok(Self {
            w0_s_l1: w.singular_lp_norm(1.0, df)?,
            w0_inf: w.bounded_sup(),
            weps_s_l2: w.singular_lp_norm(2.0, df + dc)? * eps.powf(-0.5 * dc as f64),
            weps_inf: w.bounded_sup(),
        })
    }

    pub fn sum(&self) -> f64 {
        self.w0_s_l1 + self.w0_inf + self.weps_s_l2 + self.weps_inf
    }
}

/// Samples of `4K (1 + ‖φ‖_∞ + ‖Φ‖_∞)²`.
pub fn thm1_integrand(norms: &Thm1Norms, sup: &[SupNorms]) -> Vec<f64> {
    let k = 4.0 * norms.sum();
    sup.iter().map(|s| k * (1.0 + s.sup_phi + s.sup_big_phi).powi(2)).collect()
}

/// `C(t)` at the sample times, by the trapezoid rule.
pub fn thm1_coefficient(norms: &Thm1Norms, times: &[f64], sup: &[SupNorms]) -> Result<Vec<f64>> {
    if times.len() != sup.len() {
        return Err(Error::InvalidParameter("one sup-norm sample per time is required".into()));
    }
    if times.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::InvalidParameter("time grid must be nondecreasing".into()));
    }
    Ok(cumulative_trapezoid(times, &thm1_integrand(norms, sup)))
}

/// Defect `f(ε)` of the approximation `w(x, εy) → w(x, 0)`.
///
/// Bounded profiles: the largest deviation over the relative grid
/// (the `L¹` part vanishes). Coulomb in 2+1 dimensions: the closed
/// Appendix-style split. Other singular cases are rejected.
pub fn defect_f(spec: &ModelSpec) -> Result<f64> {
    let w = &spec.interaction;
    let eps = spec.epsilon();
    if let InteractionProfile::Coulomb { amplitude } = w {
        if spec.domain.free.dim() == 2 && spec.domain.confined.dim() == 1 {
            let c = coulomb_confined_norms(eps)?;
            return Ok(amplitude.abs() * (c.l1_defect + c.linf_defect));
        }
        return Err(Error::NotIntegrable("f(ε) for the coulomb profile is available for 2+1 dimensions".into()));
    }
    let f = &spec.domain.free;
    let c = &spec.domain.confined;
    let mut worst = 0.0f64;
    for i in 0..f.len() {
        let dx = f.min_image(i, 0);
        let x2: f64 = dx.iter().map(|v| v * v).sum();
        let base = w.radial(x2.sqrt());
        // relative confined displacements y_i - y_j span ±(n-1)h per axis
        let steps: Vec<usize> = c.points.iter().map(|n| 2 * n - 1).collect();
        let total: usize = steps.iter().product();
        for flat in 0..total {
            let mut rem = flat;
            let mut y2 = 0.0;
            for a in (0..c.dim()).rev() {
                let j = rem % steps[a];
                rem /= steps[a];
                let off = j as f64 - (c.points[a] - 1) as f64;
                y2 += (eps * off * c.spacing(a)).powi(2);
            }
            worst = worst.max((w.radial((x2 + y2).sqrt()) - base).abs());
        }
    }
    Ok(worst)
}

/// Per-time quantities of the effective solution used by the rate functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OneBodyDiagnostics {
    pub t: f64,
    pub sup: SupNorms,
    /// `‖Δ|φ|²‖_{L²(Ω)}`
    pub laplacian_density: f64,
    /// `‖V(t)‖_∞` on the free grid
    pub potential_sup: f64,
    /// `‖∂_t V(t)‖_∞` on the free grid
    pub potential_rate_sup: f64,
    /// `‖χ‖_∞`
    pub chi_sup: f64,
}

pub fn onebody_diagnostics(state: &OneBodyState, spec: &ModelSpec) -> Result<OneBodyDiagnostics> {
    let dom = state.free_domain();
    let (mut v, mut vt) = (0.0f64, 0.0f64);
    for i in 0..dom.len() {
        let x = dom.point(i);
        v = v.max(spec.potential.eval(state.t, &x).abs());
        vt = vt.max(spec.potential.time_derivative(state.t, &x).abs());
    }
    Ok(OneBodyDiagnostics {
        t: state.t,
        sup: sup_norms(state),
        laplacian_density: laplacian_density_norm(state)?,
        potential_sup: v,
        potential_rate_sup: vt,
        chi_sup: state.mode.chi.sup_norm(),
    })
}

/// `‖Δ|φ|²‖_{L²}` for `φ = Φ ⊗ χ`, with `Δ = Δ_x + Δ_y` in computational
/// coordinates. The free part is spectral; `|χ|²` is a product of `sin²`
/// factors whose second derivative is taken in closed form.
pub fn laplacian_density_norm(state: &OneBodyState) -> Result<f64> {
    let free = state.free_domain();
    let rho: Vec<C64> = state.phi.values.iter().map(|v| C64::new(v.norm_sqr(), 0.0)).collect();
    let mut lap = rho.clone();
    let plan = SpectralPlan::new(&free.axes());
    plan.apply_multiplier(&mut lap, |k| C64::new(-k.iter().map(|v| v * v).sum::<f64>(), 0.0));

    let mode = &state.mode;
    let cdom = mode.domain();
    let dim = cdom.dim();
    let mut rho_c = vec![0.0; cdom.len()];
    let mut lap_c = vec![0.0; cdom.len()];
    for (j, (r, l)) in rho_c.iter_mut().zip(lap_c.iter_mut()).enumerate() {
        let y = cdom.point(j);
        let mut factors = vec![0.0; dim];
        let mut second = vec![0.0; dim];
        for a in 0..dim {
            let len = cdom.length(a);
            let kappa = mode.quanta[a] as f64 * PI / len;
            let u = y[a] - cdom.lower[a];
            factors[a] = 2.0 / len * (kappa * u).sin().powi(2);
            second[a] = 2.0 / len * 2.0 * kappa * kappa * (2.0 * kappa * u).cos();
        }
        *r = factors.iter().product();
        *l = (0..dim)
            .map(|a| second[a] * (0..dim).filter(|&b| b != a).map(|b| factors[b]).product::<f64>())
            .sum();
    }
    let dv = free.cell_volume() * cdom.cell_volume();
    let mut acc = 0.0;
    for (lf, rf) in lap.iter().zip(&rho) {
        for (rc, lc) in rho_c.iter().zip(&lap_c) {
            acc += (lf.re * rc + rf.re * lc).powi(2);
        }
    }
    Ok((acc * dv).sqrt())
}

/// Samples of `(‖φ‖_{H²} + ‖φ‖_∞)³`.
pub fn thm2_integrand(diag: &[OneBodyDiagnostics]) -> Vec<f64> {
    diag.iter().map(|d| (d.sup.h2_phi + d.sup.sup_phi).powi(3)).collect()
}

/// Samples of `‖χ‖²_∞ (‖φ‖_{H²} + ‖φ‖_∞ + ‖Δ|φ|²‖ ‖φ‖_∞ + ‖V̇‖_∞ + ‖V‖_∞^{1/2})`.
pub fn thm3_integrand(diag: &[OneBodyDiagnostics]) -> Vec<f64> {
    diag.iter()
        .map(|d| {
            d.chi_sup.powi(2)
                * (d.sup.h2_phi
                    + d.sup.sup_phi
                    + d.laplacian_density * d.sup.sup_phi
                    + d.potential_rate_sup
                    + d.potential_sup.sqrt())
        })
        .collect()
}
