//! Vector field `ξ` with `∇·ξ = f` in three dimensions,
//! `ξ = x/(4π|x|³) * f`.
//!
//! The Green's function is truncated at radius `R = √3 L`, beyond the
//! diameter of the box, which leaves the field inside the box unchanged
//! but makes its Fourier transform smooth: `Ĝ(k) = 2 sin²(R|k|/2)/|k|²`.
//! Sampling on a 4× padded periodic grid then avoids wrap-around.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{fft_nd, Axis, C64};

/// Cube `[-L/2, L/2)³` with `n` nodes per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonGrid {
    pub n: usize,
    pub extent: f64,
}

impl PoissonGrid {
    pub fn new(n: usize, extent: f64) -> Result<Self> {
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidDomain(format!("n = {n} must be a power of two >= 8")));
        }
        if !(extent > 0.0) {
            return Err(Error::InvalidDomain("extent must be positive".into()));
        }
        Ok(Self { n, extent })
    }

    pub fn spacing(&self) -> f64 {
        self.extent / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n.pow(3)
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(3)
    }

    pub fn point(&self, index: usize) -> [f64; 3] {
        let n = self.n;
        let h = self.spacing();
        let c = |j: usize| -0.5 * self.extent + j as f64 * h;
        [c(index / (n * n)), c((index / n) % n), c(index % n)]
    }

    pub fn sample(&self, f: impl Fn([f64; 3]) -> f64) -> Vec<f64> {
        (0..self.len()).map(|i| f(self.point(i))).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub grid: PoissonGrid,
    pub components: [Vec<f64>; 3],
    /// `∇·ξ` on the box, differentiated spectrally on the padded grid.
    pub divergence: Vec<f64>,
}

impl VectorField {
    pub fn magnitude(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| self.components.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
            .collect()
    }
}

pub fn poisson_vector_field(grid: PoissonGrid, f: &[f64]) -> Result<VectorField> {
    let n = grid.n;
    if f.len() != grid.len() {
        return Err(Error::DomainMismatch(format!("{} samples for a grid of {}", f.len(), grid.len())));
    }
    let sup = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let tol = 1e-12 * sup.max(f64::MIN_POSITIVE);
    for (i, v) in f.iter().enumerate() {
        let idx = [i / (n * n), (i / n) % n, i % n];
        if idx.iter().any(|&j| j == 0 || j == n - 1) && v.abs() > tol {
            return Err(Error::SupportTooWide(format!(
                "f = {v:e} on the outer layer of the box at node {idx:?}"
            )));
        }
    }

    let p = 4 * n;
    let offset = 3 * n / 2;
    let shape = [p, p, p];
    let big = |a: usize, b: usize, c: usize| (a * p + b) * p + c;
    let mut fhat = vec![C64::new(0.0, 0.0); p * p * p];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                fhat[big(a + offset, b + offset, c + offset)] = C64::new(f[(a * n + b) * n + c], 0.0);
            }
        }
    }
    fft_nd(&mut fhat, &shape, false);
    // the Nyquist wavenumber is kept: it enters the divergence squared, and
    // any imaginary residue in the components is dropped on the way back
    let k = Axis::Periodic { n: p, extent: 4.0 * grid.extent }.wavenumbers();
    let radius = 3f64.sqrt() * grid.extent;
    let green = |kk: f64| {
        if kk == 0.0 {
            0.5 * radius * radius
        } else {
            2.0 * (0.5 * radius * kk).sin().powi(2) / (kk * kk)
        }
    };
    let scale = 1.0 / (p * p * p) as f64;
    let mut comps: Vec<Vec<C64>> = Vec::with_capacity(3);
    for axis in 0..3 {
        let mut v = fhat.clone();
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    let idx = [a, b, c];
                    let kk = (k[a].powi(2) + k[b].powi(2) + k[c].powi(2)).sqrt();
                    v[big(a, b, c)] *= C64::new(0.0, -k[idx[axis]] * green(kk));
                }
            }
        }
        comps.push(v);
    }
    // divergence from the spectral components, before transforming back
    let mut div = vec![C64::new(0.0, 0.0); p * p * p];
    for a in 0..p {
        for b in 0..p {
            for c in 0..p {
                let i = big(a, b, c);
                let ks = [k[a], k[b], k[c]];
                div[i] = (0..3).map(|ax| comps[ax][i] * C64::new(0.0, ks[ax])).sum();
            }
        }
    }
    let restrict = |mut v: Vec<C64>| -> Vec<f64> {
        fft_nd(&mut v, &shape, true);
        let mut out = vec![0.0; grid.len()];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    out[(a * n + b) * n + c] = v[big(a + offset, b + offset, c + offset)].re * scale;
                }
            }
        }
        out
    };
    let divergence = restrict(div);
    let mut it = comps.into_iter().map(restrict);
    let components = [it.next().unwrap(), it.next().unwrap(), it.next().unwrap()];
    Ok(VectorField { grid, components, divergence })
}

/// `‖∇·ξ − f‖_{L²} / ‖f‖_{L²}` on the box.
pub fn divergence_residual(field: &VectorField, f: &[f64]) -> f64 {
    let num: f64 = field.divergence.iter().zip(f).map(|(d, v)| (d - v).powi(2)).sum();
    let den: f64 = f.iter().map(|v| v * v).sum();
    if den == 0.0 {
        return num.sqrt();
    }
    (num / den).sqrt()
}

/// `‖g‖_{L^p}` of box samples.
pub fn box_lp_norm(grid: &PoissonGrid, values: &[f64], p: f64) -> f64 {
    (values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * grid.cell_volume()).powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(radius: f64) -> impl Fn([f64; 3]) -> f64 {
        move |x| {
            let r2 = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (radius * radius);
            if r2 < 1.0 {
                (1.0 - r2).powi(6)
            } else {
                0.0
            }
        }
    }

    #[test]
    fn zero_source_zero_field() {
        let g = PoissonGrid::new(8, 2.0).unwrap();
        let field = poisson_vector_field(g, &vec![0.0; g.len()]).unwrap();
        assert!(field.components.iter().flatten().all(|v| *v == 0.0));
    }

    #[test]
    fn linear_in_the_source() {
        let g = PoissonGrid::new(16, 2.0).unwrap();
        let f1 = g.sample(bump(0.6));
        let f2 = g.sample(|x| bump(0.4)([x[0] - 0.2, x[1], x[2] + 0.1]));
        let sum: Vec<f64> = f1.iter().zip(&f2).map(|(a, b)| a + 2.0 * b).collect();
        let a = poisson_vector_field(g, &f1).unwrap();
        let b = poisson_vector_field(g, &f2).unwrap();
        let c = poisson_vector_field(g, &sum).unwrap();
        for ax in 0..3 {
            for i in 0..g.len() {
                let lin = a.components[ax][i] + 2.0 * b.components[ax][i];
                assert!((c.components[ax][i] - lin).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn source_on_boundary_is_rejected() {
        let g = PoissonGrid::new(8, 2.0).unwrap();
        assert!(poisson_vector_field(g, &g.sample(|_| 1.0)).is_err());
        assert!(PoissonGrid::new(12, 2.0).is_err());
    }
}
