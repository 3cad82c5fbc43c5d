use serde::Serialize;

use super::{apply_p, apply_q, on_coordinate, Condensate, PairPattern, TwoBodyOperator};
use crate::error::{Error, Result};
use crate::grid::GridDomain;
use crate::manybody::{kinetic_energy_particle1, pair_interaction_values, ManyBodyState};
use crate::model::{ModelSpec, Regime};
use crate::onebody::{hartree_potential, OneBodyState};
use crate::spectral::C64;

/// Terms of the α-derivative expansion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivativeTerms {
    /// `2|⟨ψ, p_1 p_2 W q_1 p_2 ψ⟩|`
    pub term_i: f64,
    /// `2|⟨ψ, p_1 p_2 W q_1 q_2 ψ⟩|`
    pub term_ii: f64,
    /// `2|⟨ψ, p_1 q_2 W q_1 q_2 ψ⟩|`
    pub term_iii: f64,
    /// `∂_t α = −2 Im ⟨ψ, p_1 W q_1 ψ⟩`, summed from the expansion.
    pub d_alpha_dt: f64,
    /// The same derivative without the `p_2 + q_2` expansion.
    pub d_alpha_dt_direct: f64,
    /// `Im ⟨ψ, p_1 q_2 W q_1 p_2 ψ⟩`, zero for symmetric ψ.
    pub exchange_imaginary: f64,
}

/// `W_12 = (N−1)λ w^ε(r_1 − r_2) − (w⁰ * |Φ|²)(x_1)` as a multiplication table.
pub fn fluctuation_table(spec: &ModelSpec, onebody: &OneBodyState) -> Result<Vec<C64>> {
    let dom = &spec.domain;
    let m = dom.len();
    let vphi = hartree_potential(&onebody.phi, spec)?;
    let scale = (spec.n_particles as f64 - 1.0) * spec.pair_prefactor();
    let mut t = vec![C64::new(0.0, 0.0); m * m];
    for p in 0..m {
        let (pf, pc) = dom.split_index(p);
        let yp = dom.confined.point(pc);
        for q in 0..m {
            let (qf, qc) = dom.split_index(q);
            let dx = dom.free.min_image(pf, qf);
            let dy: Vec<f64> = yp.iter().zip(dom.confined.point(qc)).map(|(a, b)| a - b).collect();
            t[p * m + q] = C64::new(scale * spec.kernel(&dx, &dy) - vphi[pf], 0.0);
        }
    }
    Ok(t)
}

pub fn derivative_terms(psi: &ManyBodyState, onebody: &OneBodyState, spec: &ModelSpec) -> Result<DerivativeTerms> {
    if spec.regime != Regime::HartreeTheta0 {
        return Err(Error::RegimeMismatch("the derivative expansion is evaluated for θ = 0".into()));
    }
    if psi.n < 2 {
        return Err(Error::InvalidParameter("the derivative expansion needs N >= 2".into()));
    }
    let view = psi.view();
    let cond = Condensate::from_grid(&onebody.product())?;
    let w = TwoBodyOperator::Multiplication(fluctuation_table(spec, onebody)?);
    let (n, m) = (psi.n, view.m);
    let matrix_element = |left: PairPattern, right: PairPattern| {
        let mut v = psi.values.clone();
        right.apply(&mut v, n, &cond);
        w.apply(&mut v, n, m);
        left.apply(&mut v, n, &cond);
        view.inner(&v)
    };
    let a = matrix_element(PairPattern::PP, PairPattern::QP);
    let b = matrix_element(PairPattern::PP, PairPattern::QQ);
    let c = matrix_element(PairPattern::PQ, PairPattern::QQ);
    let x = matrix_element(PairPattern::PQ, PairPattern::QP);
    let direct = {
        let mut v = psi.values.clone();
        apply_q(&mut v, n, &cond, 0);
        w.apply(&mut v, n, m);
        apply_p(&mut v, n, &cond, 0);
        view.inner(&v)
    };
    Ok(DerivativeTerms {
        term_i: 2.0 * a.norm(),
        term_ii: 2.0 * b.norm(),
        term_iii: 2.0 * c.norm(),
        d_alpha_dt: -2.0 * (a + b + c + x).im,
        d_alpha_dt_direct: -2.0 * direct.im,
        exchange_imaginary: x.im,
    })
}

/// `⟨q_1ψ, h̃_1 q_1ψ⟩` with `h̃ = −Δ_x − ε⁻²Δ_y − ε⁻²E_0`.
pub fn grad_q_norm(psi: &ManyBodyState, cond: &Condensate) -> Result<f64> {
    let mut q = psi.clone();
    apply_q(&mut q.values, psi.n, cond, 0);
    let eps = psi.domain.epsilon();
    let e0 = psi.domain.confined.ground_eigenvalue() / (eps * eps);
    Ok(kinetic_energy_particle1(&q) - e0 * q.norm_sqr())
}

/// Squared norms of the two orthogonal pieces of `q_1 ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeSplit {
    /// `‖q^χ_1 ψ‖²`
    pub q_chi: f64,
    /// `‖q^Φ_1 p^χ_1 ψ‖²`
    pub q_phi_p_chi: f64,
    /// `⟨ψ, q_1 ψ⟩`
    pub alpha: f64,
}

pub fn mode_projection_split(psi: &ManyBodyState, onebody: &OneBodyState) -> Result<ModeSplit> {
    let GridDomain::Confined(cdom) = &onebody.mode.chi.domain else {
        return Err(Error::DomainMismatch("χ must live on Ω_c".into()));
    };
    if psi.domain.confined != *cdom || psi.domain.free != *onebody.free_domain() {
        return Err(Error::DomainMismatch("φ must be a product on the state's domain".into()));
    }
    let (n, m) = (psi.n, psi.m());
    let mc = cdom.len();
    let mf = m / mc;
    let dvc = cdom.cell_volume();
    let dvf = psi.domain.free.cell_volume();
    let chi = &onebody.mode.chi.values;
    let big = &onebody.phi.values;

    let project_chi = |line: &mut [C64], keep: bool| {
        for f in 0..mf {
            let s = &mut line[f * mc..(f + 1) * mc];
            let ov: C64 = chi.iter().zip(s.iter()).map(|(a, b)| a.conj() * b).sum::<C64>() * dvc;
            for (v, c) in s.iter_mut().zip(chi) {
                *v = if keep { c * ov } else { *v - c * ov };
            }
        }
    };

    let mut qchi = psi.values.clone();
    on_coordinate(&mut qchi, n, m, 0, |line| project_chi(line, false));
    let mut rest = psi.values.clone();
    on_coordinate(&mut rest, n, m, 0, |line| {
        project_chi(line, true);
        for c in 0..mc {
            let ov: C64 = (0..mf).map(|f| big[f].conj() * line[f * mc + c]).sum::<C64>() * dvf;
            for f in 0..mf {
                line[f * mc + c] -= big[f] * ov;
            }
        }
    });
    let view = psi.view();
    let cond = Condensate::from_grid(&onebody.product())?;
    let mut q = psi.values.clone();
    apply_q(&mut q, n, &cond, 0);
    Ok(ModeSplit {
        q_chi: view.norm_of(&qchi).powi(2),
        q_phi_p_chi: view.norm_of(&rest).powi(2),
        alpha: view.inner(&q).re,
    })
}

/// Power-iteration estimates of `‖w_12 p_1‖` and `‖p_1 w_12 p_1‖` on the
/// two-particle grid, with the corresponding Young-type bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OperatorNormCheck {
    pub w_p: f64,
    /// `‖w‖_{L²} ‖φ‖_∞`
    pub w_p_bound: f64,
    pub p_w_p: f64,
    /// `‖w‖_{L¹} ‖φ‖²_∞`
    pub p_w_p_bound: f64,
}

pub fn operator_norm_estimates(spec: &ModelSpec, cond: &Condensate, iterations: usize) -> Result<OperatorNormCheck> {
    let dom = &spec.domain;
    let m = dom.len();
    if cond.phi.len() != m {
        return Err(Error::DomainMismatch("condensate does not match the model grid".into()));
    }
    let kernel = pair_interaction_values(spec)?;
    let l2 = (kernel.values.iter().map(|v| v * v).sum::<f64>() * kernel.cell_volume).sqrt();
    let l1 = kernel.values.iter().map(|v| v.abs()).sum::<f64>() * kernel.cell_volume;
    let sup = cond.phi.iter().fold(0.0f64, |a, v| a.max(v.norm()));
    let mut table = vec![C64::new(0.0, 0.0); m * m];
    for p in 0..m {
        let (pf, pc) = dom.split_index(p);
        let yp = dom.confined.point(pc);
        for q in 0..m {
            let (qf, qc) = dom.split_index(q);
            let dx = dom.free.min_image(pf, qf);
            let dy: Vec<f64> = yp.iter().zip(dom.confined.point(qc)).map(|(a, b)| a - b).collect();
            table[p * m + q] = C64::new(spec.kernel(&dx, &dy), 0.0);
        }
    }
    let w = TwoBodyOperator::Multiplication(table);
    let view_dv = cond.dv;
    let p_w2_p = |v: &mut Vec<C64>| {
        apply_p(v, 2, cond, 0);
        w.apply(v, 2, m);
        w.apply(v, 2, m);
        apply_p(v, 2, cond, 0);
    };
    let pwp_sq = |v: &mut Vec<C64>| {
        for _ in 0..2 {
            apply_p(v, 2, cond, 0);
            w.apply(v, 2, m);
            apply_p(v, 2, cond, 0);
        }
    };
    let a = power_iteration(m * m, view_dv, iterations, p_w2_p).sqrt();
    let b = power_iteration(m * m, view_dv, iterations, pwp_sq).sqrt();
    Ok(OperatorNormCheck {
        w_p: a,
        w_p_bound: l2 * sup,
        p_w_p: b,
        p_w_p_bound: l1 * sup * sup,
    })
}

/// Largest eigenvalue of a positive operator on two-particle tensors.
fn power_iteration(len: usize, dv: f64, iterations: usize, op: impl Fn(&mut Vec<C64>)) -> f64 {
    let weight = dv * dv;
    let norm = |v: &[C64]| (v.iter().map(|x| x.norm_sqr()).sum::<f64>() * weight).sqrt();
    let mut v: Vec<C64> = (0..len)
        .map(|i| C64::new(1.0 + 0.25 * ((i * 7919) % 13) as f64, 0.1 * ((i * 104_729) % 7) as f64))
        .collect();
    let mut lambda = 0.0;
    for _ in 0..iterations {
        let n0 = norm(&v);
        if n0 == 0.0 {
            return 0.0;
        }
        for x in v.iter_mut() {
            *x /= n0;
        }
        op(&mut v);
        let next = norm(&v);
        if (next - lambda).abs() <= 1e-13 * next {
            return next;
        }
        lambda = next;
    }
    lambda
}
