//! Counting functionals: projections `p_j`, `q_j`, the occupancy projectors
//! `P_{k,N}`, weighted operators `f̂`, and the functionals α, β, β̃.

mod density;
mod derivative;
mod report;

pub use density::{density_matrix, trace_distance, DensityMatrix};
pub use derivative::{
    derivative_terms, grad_q_norm, mode_projection_split, operator_norm_estimates, DerivativeTerms,
    ModeSplit, OperatorNormCheck,
};
pub use report::{counting_report, CountingReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{GridDomain, GridFunction};
use crate::manybody::ManyBodyState;
use crate::spectral::{for_each_line, C64};

/// Borrowed view of an N-particle tensor over a one-body basis of size `m`
/// with quadrature weight `dv` per coordinate.
#[derive(Debug, Clone, Copy)]
pub struct TensorView<'a> {
    pub n: usize,
    pub m: usize,
    pub dv: f64,
    pub values: &'a [C64],
}

impl<'a> TensorView<'a> {
    pub fn new(n: usize, m: usize, dv: f64, values: &'a [C64]) -> Result<Self> {
        if values.len() != m.pow(n as u32) {
            return Err(Error::DomainMismatch(format!(
                "{} values for {n} particles on {m} nodes",
                values.len()
            )));
        }
        Ok(Self { n, m, dv, values })
    }

    pub fn weight(&self) -> f64 {
        self.dv.powi(self.n as i32)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.weight()
    }

    pub fn inner(&self, other: &[C64]) -> C64 {
        self.values.iter().zip(other).map(|(a, b)| a.conj() * b).sum::<C64>() * self.weight()
    }

    pub fn norm_of(&self, other: &[C64]) -> f64 {
        (other.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.weight()).sqrt()
    }
}

impl ManyBodyState {
    pub fn view(&self) -> TensorView<'_> {
        TensorView {
            n: self.n,
            m: self.m(),
            dv: self.domain.cell_volume(),
            values: &self.values,
        }
    }
}

/// Condensate wavefunction φ, normalized under the weight `dv`.
#[derive(Debug, Clone, PartialEq)]
pub struct Condensate {
    pub phi: Vec<C64>,
    pub dv: f64,
}

impl Condensate {
    pub fn new(phi: Vec<C64>, dv: f64) -> Result<Self> {
        let c = Self { phi, dv };
        let n = c.norm();
        if (n - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(n));
        }
        Ok(c)
    }

    pub fn from_grid(phi: &GridFunction) -> Result<Self> {
        Self::new(phi.values.clone(), phi.domain.cell_volume())
    }

    pub fn norm(&self) -> f64 {
        (self.phi.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dv).sqrt()
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    fn check(&self, psi: &TensorView) -> Result<()> {
        if psi.m != self.phi.len() || (psi.dv - self.dv).abs() > 1e-14 * self.dv.max(1.0) {
            return Err(Error::DomainMismatch("condensate and state use different one-body grids".into()));
        }
        Ok(())
    }
}

/// Runs `op` on every line of `values` along particle coordinate `i`.
pub fn on_coordinate(values: &mut [C64], n: usize, m: usize, i: usize, op: impl FnMut(&mut [C64])) {
    let outer = m.pow(i as u32);
    let inner = m.pow((n - 1 - i) as u32);
    for_each_line(values, &[outer, m, inner], 1, op);
}

/// `p_i ψ` in place.
pub fn apply_p(values: &mut [C64], n: usize, cond: &Condensate, i: usize) {
    let m = cond.phi.len();
    on_coordinate(values, n, m, i, |line| {
        let overlap: C64 = cond.phi.iter().zip(line.iter()).map(|(a, b)| a.conj() * b).sum::<C64>() * cond.dv;
        for (v, p) in line.iter_mut().zip(&cond.phi) {
            *v = p * overlap;
        }
    });
}

/// `q_i ψ` in place.
pub fn apply_q(values: &mut [C64], n: usize, cond: &Condensate, i: usize) {
    let m = cond.phi.len();
    on_coordinate(values, n, m, i, |line| {
        let overlap: C64 = cond.phi.iter().zip(line.iter()).map(|(a, b)| a.conj() * b).sum::<C64>() * cond.dv;
        for (v, p) in line.iter_mut().zip(&cond.phi) {
            *v -= p * overlap;
        }
    });
}

/// Projector pattern on coordinates 1 and 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairPattern {
    PP,
    PQ,
    QP,
    QQ,
}

impl PairPattern {
    /// Number of `q` factors.
    pub fn count(self) -> usize {
        match self {
            PairPattern::PP => 0,
            PairPattern::PQ | PairPattern::QP => 1,
            PairPattern::QQ => 2,
        }
    }

    pub fn apply(self, values: &mut [C64], n: usize, cond: &Condensate) {
        let (a, b) = match self {
            PairPattern::PP => (false, false),
            PairPattern::PQ => (false, true),
            PairPattern::QP => (true, false),
            PairPattern::QQ => (true, true),
        };
        if a {
            apply_q(values, n, cond, 0)
        } else {
            apply_p(values, n, cond, 0)
        }
        if b {
            apply_q(values, n, cond, 1)
        } else {
            apply_p(values, n, cond, 1)
        }
    }
}

/// `P_{k,N} ψ` for every `k`, by splitting one coordinate at a time into
/// its `p` and `q` parts.
pub fn occupancy_sectors(psi: &TensorView, cond: &Condensate) -> Result<Vec<Vec<C64>>> {
    cond.check(psi)?;
    let n = psi.n;
    let mut sectors: Vec<Vec<C64>> = vec![psi.values.to_vec()];
    for i in 0..n {
        let mut next: Vec<Vec<C64>> = (0..=sectors.len()).map(|_| Vec::new()).collect();
        for (k, s) in sectors.into_iter().enumerate() {
            let mut p = s.clone();
            apply_p(&mut p, n, cond, i);
            let q: Vec<C64> = s.iter().zip(&p).map(|(a, b)| a - b).collect();
            add_into(&mut next[k], p);
            add_into(&mut next[k + 1], q);
        }
        sectors = next;
    }
    Ok(sectors)
}

fn add_into(target: &mut Vec<C64>, v: Vec<C64>) {
    if target.is_empty() {
        *target = v;
    } else {
        for (a, b) in target.iter_mut().zip(v) {
            *a += b;
        }
    }
}

/// `p(k) = ‖P_{k,N} ψ‖²`.
pub fn occupation_distribution(psi: &TensorView, cond: &Condensate) -> Result<Vec<f64>> {
    Ok(occupancy_sectors(psi, cond)?
        .iter()
        .map(|s| psi.norm_of(s).powi(2))
        .collect())
}

/// `p(k) = C(N,k) ⟨ψ, q_1…q_k p_{k+1}…p_N ψ⟩`; valid for symmetric ψ only.
pub fn occupation_distribution_symmetric(psi: &TensorView, cond: &Condensate, symmetry_residual: f64) -> Result<Vec<f64>> {
    cond.check(psi)?;
    if symmetry_residual > 1e-9 {
        return Err(Error::NotSymmetric(symmetry_residual));
    }
    let n = psi.n;
    (0..=n)
        .map(|k| {
            let mut v = psi.values.to_vec();
            for i in 0..n {
                if i < k {
                    apply_q(&mut v, n, cond, i);
                } else {
                    apply_p(&mut v, n, cond, i);
                }
            }
            Ok(binomial(n, k) * psi.inner(&v).re)
        })
        .collect()
}

pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `α = ⟨ψ, q_1 ψ⟩`.
pub fn alpha(psi: &TensorView, cond: &Condensate) -> Result<f64> {
    cond.check(psi)?;
    let mut v = psi.values.to_vec();
    apply_q(&mut v, psi.n, cond, 0);
    Ok(psi.inner(&v).re)
}

/// `α = Σ (k/N) p(k)` and `β = Σ √(k/N) p(k)`.
pub fn alpha_beta_from_distribution(p: &[f64]) -> (f64, f64) {
    let n = (p.len() - 1) as f64;
    p.iter().enumerate().fold((0.0, 0.0), |(a, b), (k, &pk)| {
        let x = k as f64 / n;
        (a + x * pk, b + x.sqrt() * pk)
    })
}

pub fn beta(psi: &TensorView, cond: &Condensate) -> Result<f64> {
    Ok(alpha_beta_from_distribution(&occupation_distribution(psi, cond)?).1)
}

/// `β̃ = β + |E^ψ − E^φ|`.
pub fn beta_tilde(beta: f64, e_psi: f64, e_phi: f64) -> f64 {
    beta + (e_psi - e_phi).abs()
}

/// Tag of a weight function on `{0, …, N}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightTag {
    /// `n(k) = √(k/N)`
    SqrtKOverN,
    /// `k/N`
    KOverN,
    /// `μ = N(n − τ_{−1} n)`
    Mu,
    /// `μ₁ = N(n − τ_{−2} n)`
    Mu1,
    Custom,
}

/// Tabulated weight `f(0..=N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightFunction {
    pub values: Vec<f64>,
    pub tag: WeightTag,
}

impl WeightFunction {
    pub fn custom(values: Vec<f64>) -> Self {
        Self {
            values,
            tag: WeightTag::Custom,
        }
    }

    pub fn tagged(tag: WeightTag, n: usize) -> Self {
        let values = (0..=n).map(|k| tag_value(tag, n, k as i64)).collect();
        Self { values, tag }
    }

    pub fn n_particles(&self) -> usize {
        self.values.len() - 1
    }

    /// `(τ_j f)(k) = f(k + j)`, zero when `k + j ∉ {0, …, N}`.
    pub fn shift(&self, j: i64) -> Self {
        let n = self.values.len() as i64;
        let values = (0..n)
            .map(|k| {
                let s = k + j;
                if (0..n).contains(&s) {
                    self.values[s as usize]
                } else {
                    0.0
                }
            })
            .collect();
        Self {
            values,
            tag: WeightTag::Custom,
        }
    }

    /// `(τ_j f)(k) = f(k + j)` using the closed form of a tagged weight
    /// beyond `N`; custom weights fall back to [`WeightFunction::shift`].
    pub fn shift_extended(&self, j: i64) -> Self {
        if self.tag == WeightTag::Custom {
            return self.shift(j);
        }
        let n = self.n_particles();
        let values = (0..=n as i64).map(|k| tag_value(self.tag, n, k + j)).collect();
        Self {
            values,
            tag: WeightTag::Custom,
        }
    }

    pub fn product(&self, other: &Self) -> Self {
        Self::custom(self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect())
    }

    /// Pointwise inverse with the convention `f⁻¹(k) = 0` where `f(k) = 0`.
    pub fn inverse(&self) -> Self {
        Self::custom(self.values.iter().map(|&v| if v == 0.0 { 0.0 } else { 1.0 / v }).collect())
    }

    pub fn powf(&self, e: f64) -> Self {
        Self::custom(self.values.iter().map(|v| v.powf(e)).collect())
    }
}

fn tag_value(tag: WeightTag, n: usize, k: i64) -> f64 {
    let nf = n as f64;
    let sqrt_n = |k: i64| if k <= 0 { 0.0 } else { (k as f64 / nf).sqrt() };
    match tag {
        WeightTag::SqrtKOverN => sqrt_n(k),
        WeightTag::KOverN => k.max(0) as f64 / nf,
        WeightTag::Mu => nf * (sqrt_n(k) - sqrt_n(k - 1)),
        WeightTag::Mu1 => nf * (sqrt_n(k) - sqrt_n(k - 2)),
        WeightTag::Custom => f64::NAN,
    }
}

/// `f̂ ψ = Σ_k f(k) P_{k,N} ψ`.
pub fn hat_apply(f: &WeightFunction, psi: &TensorView, cond: &Condensate) -> Result<Vec<C64>> {
    if f.values.len() != psi.n + 1 {
        return Err(Error::DomainMismatch(format!(
            "weight has {} entries for N = {}",
            f.values.len(),
            psi.n
        )));
    }
    let sectors = occupancy_sectors(psi, cond)?;
    let mut out = vec![C64::new(0.0, 0.0); psi.values.len()];
    for (s, &w) in sectors.iter().zip(&f.values) {
        if w == 0.0 {
            continue;
        }
        for (o, v) in out.iter_mut().zip(s) {
            *o += v * w;
        }
    }
    Ok(out)
}

/// Operator acting on coordinates 1 and 2.
#[derive(Debug, Clone, PartialEq)]
pub enum TwoBodyOperator {
    Identity,
    /// `T(r_1, r_2)` as an `m × m` table.
    Multiplication(Vec<C64>),
    /// Dense `m² × m²` matrix in the grid basis (quadrature weights included).
    Dense(Vec<C64>),
}

impl TwoBodyOperator {
    pub fn apply(&self, values: &mut [C64], n: usize, m: usize) {
        let inner = m.pow(n as u32 - 2);
        match self {
            TwoBodyOperator::Identity => {}
            TwoBodyOperator::Multiplication(t) => {
                for (idx, v) in values.iter_mut().enumerate() {
                    *v *= t[idx / inner];
                }
            }
            TwoBodyOperator::Dense(mat) => {
                let mm = m * m;
                let mut out = vec![C64::new(0.0, 0.0); values.len()];
                for a in 0..mm {
                    for b in 0..mm {
                        let u = mat[a * mm + b];
                        if u == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let src = &values[b * inner..(b + 1) * inner];
                        for (o, s) in out[a * inner..(a + 1) * inner].iter_mut().zip(src) {
                            *o += u * s;
                        }
                    }
                }
                values.copy_from_slice(&out);
            }
        }
    }
}

/// `‖f̂ Q_j T Q_k ψ − Q_j T Q_k (τ_{j−k} f)^ ψ‖`.
pub fn shift_identity_check(
    f: &WeightFunction,
    left: PairPattern,
    right: PairPattern,
    t: &TwoBodyOperator,
    psi: &TensorView,
    cond: &Condensate,
) -> Result<f64> {
    if psi.n < 2 {
        return Err(Error::InvalidParameter("the shift identity needs N >= 2".into()));
    }
    let (n, m) = (psi.n, psi.m);
    let sandwich = |mut v: Vec<C64>| {
        right.apply(&mut v, n, cond);
        t.apply(&mut v, n, m);
        left.apply(&mut v, n, cond);
        v
    };
    let mid = sandwich(psi.values.to_vec());
    let lhs = hat_apply(f, &TensorView { values: &mid, ..*psi }, cond)?;
    let shifted = f.shift(left.count() as i64 - right.count() as i64);
    let rhs = sandwich(hat_apply(&shifted, psi, cond)?);
    let diff: Vec<C64> = lhs.iter().zip(&rhs).map(|(a, b)| a - b).collect();
    Ok(psi.norm_of(&diff))
}

/// `(‖(m̂ − (τ_l m)^) q_1 ψ‖, l/N)`.
pub fn weight_difference_bound_check(tag: WeightTag, l: usize, psi: &TensorView, cond: &Condensate) -> Result<(f64, f64)> {
    if !matches!(tag, WeightTag::KOverN | WeightTag::SqrtKOverN) {
        return Err(Error::InvalidParameter("the bound is stated for k/N and √(k/N)".into()));
    }
    let m = WeightFunction::tagged(tag, psi.n);
    let shifted = m.shift_extended(l as i64);
    let diff = WeightFunction::custom(m.values.iter().zip(&shifted.values).map(|(a, b)| a - b).collect());
    let mut q = psi.values.to_vec();
    apply_q(&mut q, psi.n, cond, 0);
    let v = hat_apply(&diff, &TensorView { values: &q, ..*psi }, cond)?;
    Ok((psi.norm_of(&v), l as f64 / psi.n as f64))
}

/// `φ = Φ ⊗ χ` as a condensate on Ω.
pub fn product_condensate(phi: &GridFunction) -> Result<Condensate> {
    if !matches!(phi.domain, GridDomain::Product(_)) {
        return Err(Error::DomainMismatch("expected a function on Ω".into()));
    }
    Condensate::from_grid(phi)
}

#[cfg(test)]
mod tests;
