//! Axis-wise spectral transforms on row-major tensors.
//!
//! Periodic axes use the FFT; Dirichlet axes use a sine transform over the
//! nodes `c + j h`, `j = 0..n`, where node 0 is the wall and the opposite
//! wall is not stored. Both transforms are scaled so that the plain
//! Euclidean norm of the coefficients equals the quadrature `L²` norm of
//! the samples.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub type C64 = Complex64;

/// One tensor axis together with its boundary condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Axis {
    /// Periodic axis of length `extent` sampled at `n` nodes.
    Periodic { n: usize, extent: f64 },
    /// Dirichlet axis of length `length`; node 0 lies on the wall.
    Dirichlet { n: usize, length: f64 },
}

impl Axis {
    pub fn len(&self) -> usize {
        match *self {
            Axis::Periodic { n, .. } | Axis::Dirichlet { n, .. } => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self) -> f64 {
        match *self {
            Axis::Periodic { n, extent } => extent / n as f64,
            Axis::Dirichlet { n, length } => length / n as f64,
        }
    }

    /// Wavenumber attached to each spectral slot. For Dirichlet axes slot
    /// `m` holds the mode `sin(m pi (y - c) / L)`; slot 0 is unused.
    pub fn wavenumbers(&self) -> Vec<f64> {
        match *self {
            Axis::Periodic { n, extent } => (0..n)
                .map(|j| {
                    let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                    2.0 * PI * m / extent
                })
                .collect(),
            Axis::Dirichlet { n, length } => (0..n).map(|m| m as f64 * PI / length).collect(),
        }
    }
}

/// Calls `op` on every line of `data` (row-major, dimensions `shape`) that
/// runs along `axis`. Lines are gathered into a scratch buffer.
pub fn for_each_line(data: &mut [C64], shape: &[usize], axis: usize, mut op: impl FnMut(&mut [C64])) {
    let len = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut line = vec![C64::new(0.0, 0.0); len];
    for o in 0..outer {
        let base = o * len * stride;
        for b in 0..stride {
            for (m, slot) in line.iter_mut().enumerate() {
                *slot = data[base + m * stride + b];
            }
            op(&mut line);
            for (m, v) in line.iter().enumerate() {
                data[base + m * stride + b] = *v;
            }
        }
    }
}

/// Unnormalized multidimensional FFT over a row-major tensor.
pub fn fft_nd(data: &mut [C64], shape: &[usize], inverse: bool) {
    let mut planner = FftPlanner::new();
    for (axis, &n) in shape.iter().enumerate() {
        let fft = if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        };
        let mut scratch = vec![C64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        for_each_line(data, shape, axis, |line| fft.process_with_scratch(line, &mut scratch));
    }
}

enum AxisPlan {
    Fourier {
        n: usize,
        scale: f64,
        fwd: Arc<dyn Fft<f64>>,
        inv: Arc<dyn Fft<f64>>,
    },
    Sine {
        n: usize,
        /// `basis[m * n + j] = sqrt(2/L) sin(pi m j / n)`
        basis: Vec<f64>,
        spacing: f64,
    },
}

/// Cached transforms for a fixed list of axes.
pub struct SpectralPlan {
    axes: Vec<Axis>,
    plans: Vec<AxisPlan>,
}

impl SpectralPlan {
    pub fn new(axes: &[Axis]) -> Self {
        let mut planner = FftPlanner::new();
        let plans = axes
            .iter()
            .map(|axis| match *axis {
                Axis::Periodic { n, extent } => AxisPlan::Fourier {
                    n,
                    scale: extent.sqrt() / n as f64,
                    fwd: planner.plan_fft_forward(n),
                    inv: planner.plan_fft_inverse(n),
                },
                Axis::Dirichlet { n, length } => {
                    let norm = (2.0 / length).sqrt();
                    let mut basis = vec![0.0; n * n];
                    for m in 1..n {
                        for j in 1..n {
                            basis[m * n + j] = norm * (PI * (m * j) as f64 / n as f64).sin();
                        }
                    }
                    AxisPlan::Sine {
                        n,
                        basis,
                        spacing: length / n as f64,
                    }
                }
            })
            .collect();
        Self {
            axes: axes.to_vec(),
            plans,
        }
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::len).collect()
    }

    /// Position samples to spectral coefficients, in place.
    pub fn forward(&self, data: &mut [C64]) {
        let shape = self.shape();
        for (k, plan) in self.plans.iter().enumerate() {
            self.forward_axis(plan, data, &shape, k);
        }
    }

    /// Spectral coefficients to position samples, in place.
    pub fn inverse(&self, data: &mut [C64]) {
        let shape = self.shape();
        for (k, plan) in self.plans.iter().enumerate() {
            self.inverse_axis(plan, data, &shape, k);
        }
    }

    fn forward_axis(&self, plan: &AxisPlan, data: &mut [C64], shape: &[usize], k: usize) {
        match plan {
            AxisPlan::Fourier { scale, fwd, .. } => {
                let mut scratch = vec![C64::new(0.0, 0.0); fwd.get_inplace_scratch_len()];
                for_each_line(data, shape, k, |line| {
                    fwd.process_with_scratch(line, &mut scratch);
                    for v in line.iter_mut() {
                        *v *= *scale;
                    }
                });
            }
            AxisPlan::Sine { n, basis, spacing } => {
                let n = *n;
                let mut out = vec![C64::new(0.0, 0.0); n];
                for_each_line(data, shape, k, |line| {
                    out[0] = C64::new(0.0, 0.0);
                    for m in 1..n {
                        let row = &basis[m * n..(m + 1) * n];
                        let mut acc = C64::new(0.0, 0.0);
                        for j in 1..n {
                            acc += line[j] * row[j];
                        }
                        out[m] = acc * *spacing;
                    }
                    line.copy_from_slice(&out);
                });
            }
        }
    }

    fn inverse_axis(&self, plan: &AxisPlan, data: &mut [C64], shape: &[usize], k: usize) {
        match plan {
            AxisPlan::Fourier { n, scale, inv, .. } => {
                let mut scratch = vec![C64::new(0.0, 0.0); inv.get_inplace_scratch_len()];
                let factor = 1.0 / (*n as f64 * *scale);
                for_each_line(data, shape, k, |line| {
                    inv.process_with_scratch(line, &mut scratch);
                    for v in line.iter_mut() {
                        *v *= factor;
                    }
                });
            }
            AxisPlan::Sine { n, basis, .. } => {
                let n = *n;
                let mut out = vec![C64::new(0.0, 0.0); n];
                for_each_line(data, shape, k, |line| {
                    for v in out.iter_mut() {
                        *v = C64::new(0.0, 0.0);
                    }
                    for m in 1..n {
                        let c = line[m];
                        if c == C64::new(0.0, 0.0) {
                            continue;
                        }
                        let row = &basis[m * n..(m + 1) * n];
                        for j in 1..n {
                            out[j] += c * row[j];
                        }
                    }
                    line.copy_from_slice(&out);
                });
            }
        }
    }

    /// Applies the spectral multiplier `symbol(multi-index)` in place. The
    /// symbol receives the wavenumber of each axis.
    pub fn apply_multiplier(&self, data: &mut [C64], symbol: impl Fn(&[f64]) -> C64) {
        self.forward(data);
        let table = self.symbol_table(symbol);
        for (v, s) in data.iter_mut().zip(table.iter()) {
            *v *= *s;
        }
        self.inverse(data);
    }

    /// Tabulates `symbol` over all spectral slots in row-major order.
    pub fn symbol_table(&self, symbol: impl Fn(&[f64]) -> C64) -> Vec<C64> {
        let waves: Vec<Vec<f64>> = self.axes.iter().map(Axis::wavenumbers).collect();
        let shape = self.shape();
        let total: usize = shape.iter().product();
        let mut idx = vec![0usize; shape.len()];
        let mut ks = vec![0.0; shape.len()];
        let mut out = Vec::with_capacity(total);
        for _ in 0..total {
            for (d, &i) in idx.iter().enumerate() {
                ks[d] = waves[d][i];
            }
            out.push(symbol(&ks));
            for d in (0..shape.len()).rev() {
                idx[d] += 1;
                if idx[d] < shape[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
        out
    }
}

/// Dense matrix of a one-dimensional spectral multiplier, `U = T^-1 diag(g) T`.
/// Applied along tensor axes by [`AxisOperator::apply`].
#[derive(Debug, Clone)]
pub struct AxisOperator {
    n: usize,
    matrix: Vec<C64>,
}

impl AxisOperator {
    pub fn from_multiplier(axis: Axis, symbol: impl Fn(f64) -> C64) -> Self {
        let n = axis.len();
        let plan = SpectralPlan::new(&[axis]);
        let mut matrix = vec![C64::new(0.0, 0.0); n * n];
        let mut column = vec![C64::new(0.0, 0.0); n];
        for l in 0..n {
            for (j, v) in column.iter_mut().enumerate() {
                *v = if j == l { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            }
            plan.apply_multiplier(&mut column, |k| symbol(k[0]));
            for (m, v) in column.iter().enumerate() {
                matrix[m * n + l] = *v;
            }
        }
        Self { n, matrix }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Applies the operator along `axis` of a row-major tensor. `scratch`
    /// must hold at least `shape[axis] * stride` elements.
    pub fn apply(&self, data: &mut [C64], shape: &[usize], axis: usize, scratch: &mut Vec<C64>) {
        let n = self.n;
        debug_assert_eq!(shape[axis], n);
        let stride: usize = shape[axis + 1..].iter().product();
        let outer: usize = shape[..axis].iter().product();
        let block = n * stride;
        scratch.resize(block, C64::new(0.0, 0.0));
        for o in 0..outer {
            let chunk = &mut data[o * block..(o + 1) * block];
            for v in scratch.iter_mut() {
                *v = C64::new(0.0, 0.0);
            }
            for m in 0..n {
                let out_row = &mut scratch[m * stride..(m + 1) * stride];
                for l in 0..n {
                    let u = self.matrix[m * n + l];
                    if u.norm_sqr() < 1e-300 {
                        continue;
                    }
                    let in_row = &chunk[l * stride..(l + 1) * stride];
                    for (acc, x) in out_row.iter_mut().zip(in_row.iter()) {
                        *acc += u * *x;
                    }
                }
            }
            chunk.copy_from_slice(&scratch[..block]);
        }
    }
}
