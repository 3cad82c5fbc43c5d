//! Exact N-particle dynamics on the tensor grid Ω^N.
//!
//! The state is a flat row-major tensor of length `M^N`, where `M` is the
//! number of one-body nodes; particle 1 is the slowest index.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::{Domain, GridDomain, GridFunction};
use crate::model::{ModelSpec, Regime};
use crate::onebody::step_count;
use crate::spectral::{Axis, AxisOperator, SpectralPlan, C64};

/// Default cap on the memory a many-body run may allocate.
pub const DEFAULT_MEMORY_CAP: u64 = 2 << 30;

/// Symmetric N-particle wavefunction.
#[derive(Debug, Clone, PartialEq)]
pub struct ManyBodyState {
    pub n: usize,
    pub domain: Domain,
    pub values: Vec<C64>,
    pub t: f64,
}

/// Bytes a propagator for `n` particles on `domain` allocates, counting the
/// state, one scratch copy, the pair table and the phase table.
pub fn memory_estimate(n: usize, domain: &Domain) -> u64 {
    let entries = (domain.len() as u64).saturating_pow(n as u32);
    entries.saturating_mul(16 + 16 + 8 + 16)
}

pub fn check_memory(n: usize, domain: &Domain, cap: u64) -> Result<()> {
    let required = memory_estimate(n, domain);
    if required > cap {
        return Err(Error::MemoryGuard { required, cap });
    }
    Ok(())
}

/// Decodes the particle coordinates of a flat tensor index.
pub fn digits(mut index: usize, n: usize, m: usize, out: &mut [usize]) {
    for slot in out[..n].iter_mut().rev() {
        *slot = index % m;
        index /= m;
    }
}

/// Applies a permutation of particle labels: `out(r_1..r_N) = ψ(r_{σ(1)}..r_{σ(N)})`.
pub fn permute(values: &[C64], n: usize, m: usize, perm: &[usize]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); values.len()];
    let mut d = vec![0usize; n];
    for (idx, slot) in out.iter_mut().enumerate() {
        digits(idx, n, m, &mut d);
        let mut src = 0;
        for &p in perm {
            src = src * m + d[p];
        }
        *slot = values[src];
    }
    out
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

impl ManyBodyState {
    pub fn m(&self) -> usize {
        self.domain.len()
    }

    pub fn cell_volume(&self) -> f64 {
        self.domain.cell_volume().powi(self.n as i32)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.cell_volume()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `φ^{⊗N}` for a one-body function on Ω.
    pub fn product(phi: &GridFunction, n: usize) -> Result<Self> {
        Self::from_factors(&vec![phi.clone(); n])
    }

    /// `φ_1 ⊗ … ⊗ φ_N` (not symmetrized).
    pub fn from_factors(factors: &[GridFunction]) -> Result<Self> {
        let GridDomain::Product(domain) = &factors[0].domain else {
            return Err(Error::DomainMismatch("factors must live on Ω = Ω_f × Ω_c".into()));
        };
        if factors.iter().any(|f| f.domain != factors[0].domain) {
            return Err(Error::DomainMismatch("all factors must share one domain".into()));
        }
        let mut values = vec![C64::new(1.0, 0.0)];
        for f in factors {
            let mut next = Vec::with_capacity(values.len() * f.values.len());
            for a in &values {
                for b in &f.values {
                    next.push(a * b);
                }
            }
            values = next;
        }
        Ok(Self {
            n: factors.len(),
            domain: domain.clone(),
            values,
            t: 0.0,
        })
    }

    /// Largest `‖ψ - σψ‖` over transpositions σ.
    pub fn symmetry_residual(&self) -> f64 {
        let m = self.m();
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for j in i + 1..self.n {
                let mut perm: Vec<usize> = (0..self.n).collect();
                perm.swap(i, j);
                let swapped = permute(&self.values, self.n, m, &perm);
                let r: f64 = self.values.iter().zip(&swapped).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
                worst = worst.max((r * self.cell_volume()).sqrt());
            }
        }
        worst
    }

    pub fn require_symmetric(&self, tolerance: f64) -> Result<()> {
        let r = self.symmetry_residual();
        if r > tolerance * self.norm().max(1.0) {
            return Err(Error::NotSymmetric(r));
        }
        Ok(())
    }
}

/// Sum over all particle permutations of a raw tensor (not normalized).
pub fn symmetrize_values(values: &[C64], n: usize, m: usize) -> Vec<C64> {
    let mut acc = vec![C64::new(0.0, 0.0); values.len()];
    for p in &permutations(n) {
        for (a, v) in acc.iter_mut().zip(permute(values, n, m, p)) {
            *a += v;
        }
    }
    acc
}

/// Averages over all particle permutations and renormalizes.
pub fn symmetrize(raw: &ManyBodyState) -> Result<ManyBodyState> {
    if raw.n > 6 {
        return Err(Error::InvalidParameter(format!("symmetrization needs N <= 6, got {}", raw.n)));
    }
    let count: usize = (1..=raw.n).product();
    let mut out = ManyBodyState {
        values: symmetrize_values(&raw.values, raw.n, raw.m()),
        ..raw.clone()
    };
    let before = raw.norm();
    let after = out.norm() / count as f64;
    if !(after > 1e-12 * before.max(1e-300)) {
        return Err(Error::ZeroNorm);
    }
    let scale = 1.0 / out.norm();
    for v in &mut out.values {
        *v *= scale;
    }
    Ok(out)
}

/// Pair kernel on the relative grid: minimum-image displacements on the
/// free axes, `2 n_c - 1` displacements on each confined axis.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeKernel {
    pub shape: Vec<usize>,
    pub values: Vec<f64>,
    /// Cell volume in computational coordinates.
    pub cell_volume: f64,
    pub epsilon: f64,
    pub confined_dim: usize,
}

impl RelativeKernel {
    /// `∫` over relative computational coordinates `(Δx, Δy)`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_volume
    }

    /// `∫` over compressed relative coordinates `(Δx, εΔy)`.
    pub fn integral_compressed(&self) -> f64 {
        self.integral() * self.epsilon.powi(self.confined_dim as i32)
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Samples the unprefactored kernel `w^{ε,θ,N}` on the relative grid.
pub fn pair_interaction_values(spec: &ModelSpec) -> Result<RelativeKernel> {
    spec.validate()?;
    spec.check_resolvable()?;
    let f = &spec.domain.free;
    let c = &spec.domain.confined;
    let mut axes_disp: Vec<Vec<f64>> = Vec::new();
    for a in 0..f.dim() {
        let n = f.points[a] as i64;
        let h = f.spacing(a);
        axes_disp.push((0..n).map(|j| (if j < n / 2 { j } else { j - n }) as f64 * h).collect());
    }
    for a in 0..c.dim() {
        let n = c.points[a] as i64;
        let h = c.spacing(a);
        axes_disp.push((-(n - 1)..n).map(|j| j as f64 * h).collect());
    }
    let shape: Vec<usize> = axes_disp.iter().map(Vec::len).collect();
    let total: usize = shape.iter().product();
    let df = f.dim();
    let mut values = Vec::with_capacity(total);
    let mut point = vec![0.0; shape.len()];
    for idx in 0..total {
        let mut rem = idx;
        for a in (0..shape.len()).rev() {
            point[a] = axes_disp[a][rem % shape[a]];
            rem /= shape[a];
        }
        values.push(spec.kernel(&point[..df], &point[df..]));
    }
    Ok(RelativeKernel {
        shape,
        values,
        cell_volume: spec.domain.cell_volume(),
        epsilon: spec.epsilon(),
        confined_dim: c.dim(),
    })
}

/// `W(r_p - r_q)` for every pair of one-body nodes, including the prefactor λ.
pub fn pair_table(spec: &ModelSpec) -> Vec<f64> {
    let dom = &spec.domain;
    let m = dom.len();
    let lambda = spec.pair_prefactor();
    let mut table = vec![0.0; m * m];
    for p in 0..m {
        let (pf, pc) = dom.split_index(p);
        let yp = dom.confined.point(pc);
        for q in 0..m {
            let (qf, qc) = dom.split_index(q);
            let dx = dom.free.min_image(pf, qf);
            let yq = dom.confined.point(qc);
            let dy: Vec<f64> = yp.iter().zip(&yq).map(|(a, b)| a - b).collect();
            table[p * m + q] = lambda * spec.kernel(&dx, &dy);
        }
    }
    table
}

/// `Σ_{i<j} W(r_i - r_j)` at every tensor index.
fn pair_sum(n: usize, m: usize, table: &[f64]) -> Vec<f64> {
    let total = m.pow(n as u32);
    let mut out = vec![0.0; total];
    let mut d = vec![0usize; n];
    for (idx, slot) in out.iter_mut().enumerate() {
        digits(idx, n, m, &mut d);
        let mut s = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                s += table[d[i] * m + d[j]];
            }
        }
        *slot = s;
    }
    out
}

/// Per-axis one-body kinetic symbol scale: 1 on free axes, ε⁻² on confined.
fn one_body_axes(domain: &Domain) -> Vec<(Axis, f64)> {
    let eps = domain.epsilon();
    let mut out: Vec<(Axis, f64)> = domain.free.axes().into_iter().map(|a| (a, 1.0)).collect();
    out.extend(domain.confined.axes().into_iter().map(|a| (a, 1.0 / (eps * eps))));
    out
}

/// Strang propagator for `H = Σ h_i + Σ_{i<j} W_ij`.
pub struct ManyBodyPropagator {
    n: usize,
    m: usize,
    dt: f64,
    shape: Vec<usize>,
    kinetic: Vec<(usize, AxisOperator)>,
    pair: Vec<f64>,
    external: Vec<f64>,
    spec: ModelSpec,
    static_phase: Option<Vec<C64>>,
}

impl ManyBodyPropagator {
    pub fn new(spec: &ModelSpec, dt: f64, memory_cap: u64) -> Result<Self> {
        spec.validate()?;
        if spec.regime == Regime::NlsTheta {
            spec.check_resolvable()?;
        }
        let n = spec.n_particles;
        let domain = &spec.domain;
        check_memory(n, domain, memory_cap)?;
        let m = domain.len();
        let axes = one_body_axes(domain);
        let per = axes.len();
        let mut shape = Vec::with_capacity(n * per);
        for _ in 0..n {
            shape.extend(axes.iter().map(|(a, _)| a.len()));
        }
        let ops: Vec<AxisOperator> = axes
            .iter()
            .map(|&(axis, s)| AxisOperator::from_multiplier(axis, |k| C64::from_polar(1.0, -0.5 * dt * s * k * k)))
            .collect();
        let mut kinetic = Vec::with_capacity(n * per);
        for p in 0..n {
            for (a, op) in ops.iter().enumerate() {
                kinetic.push((p * per + a, op.clone()));
            }
        }
        let table = pair_table(spec);
        let pair = pair_sum(n, m, &table);
        let external: Vec<f64> = (0..m)
            .map(|i| domain.free.point(domain.split_index(i).0))
            .map(|x| spec.potential.eval(0.0, &x))
            .collect();
        let mut prop = Self {
            n,
            m,
            dt,
            shape,
            kinetic,
            pair,
            external,
            spec: spec.clone(),
            static_phase: None,
        };
        if spec.potential.is_autonomous() {
            let total = prop.total_potential(0.0);
            prop.check_aliasing(&total)?;
            prop.static_phase = Some(total.iter().map(|v| C64::from_polar(1.0, -dt * v)).collect());
        }
        Ok(prop)
    }

    fn total_potential(&self, t: f64) -> Vec<f64> {
        let domain = &self.spec.domain;
        let ext: Vec<f64> = if self.spec.potential.is_autonomous() {
            self.external.clone()
        } else {
            (0..self.m)
                .map(|i| self.spec.potential.eval(t, &domain.free.point(domain.split_index(i).0)))
                .collect()
        };
        let mut out = self.pair.clone();
        let mut d = vec![0usize; self.n];
        for (idx, slot) in out.iter_mut().enumerate() {
            digits(idx, self.n, self.m, &mut d);
            *slot += d.iter().map(|&r| ext[r]).sum::<f64>();
        }
        out
    }

    fn check_aliasing(&self, total: &[f64]) -> Result<()> {
        let worst = total.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let increment = worst * self.dt.abs();
        if increment > PI {
            return Err(Error::AliasingGuard {
                increment,
                max_dt: PI / worst,
            });
        }
        Ok(())
    }

    fn half_kinetic(&self, values: &mut [C64], scratch: &mut Vec<C64>) {
        for (axis, op) in &self.kinetic {
            op.apply(values, &self.shape, *axis, scratch);
        }
    }

    pub fn step(&self, state: &mut ManyBodyState, scratch: &mut Vec<C64>) -> Result<()> {
        self.half_kinetic(&mut state.values, scratch);
        match &self.static_phase {
            Some(phase) => {
                for (v, p) in state.values.iter_mut().zip(phase) {
                    *v *= p;
                }
            }
            None => {
                let total = self.total_potential(state.t + 0.5 * self.dt);
                self.check_aliasing(&total)?;
                for (v, p) in state.values.iter_mut().zip(&total) {
                    *v *= C64::from_polar(1.0, -self.dt * p);
                }
            }
        }
        self.half_kinetic(&mut state.values, scratch);
        state.t += self.dt;
        Ok(())
    }
}

/// Evolves `psi0` by `horizon` and returns every `stride`-th state,
/// including the first and last.
pub fn evolve_manybody(
    psi0: &ManyBodyState,
    spec: &ModelSpec,
    horizon: f64,
    dt: f64,
    stride: usize,
    memory_cap: u64,
) -> Result<Vec<ManyBodyState>> {
    let mut out = Vec::new();
    evolve_manybody_with(psi0, spec, horizon, dt, stride, memory_cap, |s| {
        out.push(s.clone());
        Ok(())
    })?;
    Ok(out)
}

/// Like [`evolve_manybody`] but hands each sampled state to `visit`
/// instead of storing it.
pub fn evolve_manybody_with(
    psi0: &ManyBodyState,
    spec: &ModelSpec,
    horizon: f64,
    dt: f64,
    stride: usize,
    memory_cap: u64,
    mut visit: impl FnMut(&ManyBodyState) -> Result<()>,
) -> Result<ManyBodyState> {
    if psi0.n != spec.n_particles || psi0.domain != spec.domain {
        return Err(Error::DomainMismatch("state does not match the model".into()));
    }
    psi0.require_symmetric(1e-9)?;
    let steps = step_count(horizon, dt)?;
    let prop = ManyBodyPropagator::new(spec, dt.copysign(horizon), memory_cap)?;
    let stride = stride.max(1);
    let mut s = psi0.clone();
    let mut scratch = Vec::new();
    visit(&s)?;
    for k in 1..=steps {
        prop.step(&mut s, &mut scratch)?;
        if k % stride == 0 || k == steps {
            visit(&s)?;
        }
    }
    Ok(s)
}

/// `⟨ψ, (−Δ_{x_1} − ε⁻² Δ_{y_1}) ψ⟩` by a spectral sum over particle 1.
pub fn kinetic_energy_particle1(psi: &ManyBodyState) -> f64 {
    let m = psi.m();
    let rest = psi.values.len() / m;
    let axes = one_body_axes(&psi.domain);
    let plan = SpectralPlan::new(&axes.iter().map(|(a, _)| *a).collect::<Vec<_>>());
    let scales: Vec<f64> = axes.iter().map(|(_, s)| *s).collect();
    let symbol = plan.symbol_table(|k| C64::new(k.iter().zip(&scales).map(|(k, s)| s * k * k).sum(), 0.0));
    let mut column = vec![C64::new(0.0, 0.0); m];
    let mut total = 0.0;
    for r in 0..rest {
        for (p, c) in column.iter_mut().enumerate() {
            *c = psi.values[p * rest + r];
        }
        plan.forward(&mut column);
        total += column.iter().zip(&symbol).map(|(c, s)| c.norm_sqr() * s.re).sum::<f64>();
    }
    total * psi.domain.cell_volume().powi(psi.n as i32 - 1)
}

/// Components of `E^ψ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManyBodyEnergy {
    pub kinetic: f64,
    pub external: f64,
    /// `((N−1)/2) ⟨ψ, W_12 ψ⟩`
    pub interaction: f64,
}

impl ManyBodyEnergy {
    pub fn total(&self) -> f64 {
        self.kinetic + self.external + self.interaction
    }
}

/// Per-particle energy `E^ψ = ⟨ψ, h_1 ψ⟩ + ((N−1)/2) ⟨ψ, W_12 ψ⟩`.
pub fn manybody_energy(psi: &ManyBodyState, spec: &ModelSpec) -> Result<f64> {
    manybody_energy_parts(psi, spec).map(|e| e.total())
}

pub fn manybody_energy_parts(psi: &ManyBodyState, spec: &ModelSpec) -> Result<ManyBodyEnergy> {
    psi.require_symmetric(1e-8)?;
    let m = psi.m();
    let n = psi.n;
    let dv = psi.cell_volume();
    let rest = psi.values.len() / m;
    let domain = &psi.domain;
    let ext: Vec<f64> = (0..m)
        .map(|i| spec.potential.eval(psi.t, &domain.free.point(domain.split_index(i).0)))
        .collect();
    let external = psi
        .values
        .iter()
        .enumerate()
        .map(|(idx, v)| v.norm_sqr() * ext[idx / rest])
        .sum::<f64>()
        * dv;
    let interaction = if n >= 2 {
        let table = pair_table(spec);
        let inner = rest / m;
        let w12: f64 = psi
            .values
            .iter()
            .enumerate()
            .map(|(idx, v)| {
                let r1 = idx / rest;
                let r2 = (idx / inner) % m;
                v.norm_sqr() * table[r1 * m + r2]
            })
            .sum::<f64>()
            * dv;
        0.5 * (n as f64 - 1.0) * w12
    } else {
        0.0
    };
    Ok(ManyBodyEnergy {
        kinetic: kinetic_energy_particle1(psi),
        external,
        interaction,
    })
}
