//! Discretized geometry: the periodic free box, the hard-wall confined box,
//! their product, and sampled functions on them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{Axis, SpectralPlan, C64};

/// Free directions: a periodic box centred at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeDomain {
    pub extent: Vec<f64>,
    pub points: Vec<usize>,
}

impl FreeDomain {
    pub fn new(extent: Vec<f64>, points: Vec<usize>) -> Result<Self> {
        let d = Self { extent, points };
        d.validate()?;
        Ok(d)
    }

    /// Same extent and point count on every axis.
    pub fn cube(dim: usize, extent: f64, points: usize) -> Result<Self> {
        Self::new(vec![extent; dim], vec![points; dim])
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.extent.len()) || self.extent.len() != self.points.len() {
            return Err(Error::InvalidDomain(format!(
                "free dimension must be 1 or 2 with matching point counts (got {} extents, {} counts)",
                self.extent.len(),
                self.points.len()
            )));
        }
        for (&l, &n) in self.extent.iter().zip(&self.points) {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidDomain(format!("free extent must be positive, got {l}")));
            }
            if n < 8 || !n.is_power_of_two() {
                return Err(Error::InvalidDomain(format!(
                    "free point count must be a power of two >= 8, got {n}"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.extent.len()
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.extent[axis] / self.points[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    pub fn volume(&self) -> f64 {
        self.extent.iter().product()
    }

    /// Node coordinates along `axis`: `-L/2 + j h`.
    pub fn nodes(&self, axis: usize) -> Vec<f64> {
        let h = self.spacing(axis);
        let l = self.extent[axis];
        (0..self.points[axis]).map(|j| -0.5 * l + j as f64 * h).collect()
    }

    pub fn axes(&self) -> Vec<Axis> {
        self.extent
            .iter()
            .zip(&self.points)
            .map(|(&extent, &n)| Axis::Periodic { n, extent })
            .collect()
    }

    /// Coordinates of flat node `index`.
    pub fn point(&self, index: usize) -> Vec<f64> {
        let mut rem = index;
        let mut out = vec![0.0; self.dim()];
        for a in (0..self.dim()).rev() {
            let j = rem % self.points[a];
            rem /= self.points[a];
            out[a] = -0.5 * self.extent[a] + j as f64 * self.spacing(a);
        }
        out
    }

    /// Minimum-image displacement between flat nodes `i` and `j` (x_i - x_j).
    pub fn min_image(&self, i: usize, j: usize) -> Vec<f64> {
        let (mut ri, mut rj) = (i, j);
        let mut out = vec![0.0; self.dim()];
        for a in (0..self.dim()).rev() {
            let n = self.points[a];
            let di = (ri % n) as i64 - (rj % n) as i64;
            ri /= n;
            rj /= n;
            let half = n as i64 / 2;
            let wrapped = ((di + half).rem_euclid(n as i64)) - half;
            out[a] = wrapped as f64 * self.spacing(a);
        }
        out
    }
}

/// Confined directions: a hard-wall box with confinement strength `epsilon`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfinedDomain {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub points: Vec<usize>,
    pub epsilon: f64,
}

impl ConfinedDomain {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, points: Vec<usize>, epsilon: f64) -> Result<Self> {
        let d = Self {
            lower,
            upper,
            points,
            epsilon,
        };
        d.validate()?;
        Ok(d)
    }

    /// The same interval `[c, d]` on each of `dim` axes.
    pub fn cube(dim: usize, c: f64, d: f64, points: usize, epsilon: f64) -> Result<Self> {
        Self::new(vec![c; dim], vec![d; dim], vec![points; dim], epsilon)
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.lower.len();
        if !(1..=2).contains(&dim) || self.upper.len() != dim || self.points.len() != dim {
            return Err(Error::InvalidDomain(
                "confined dimension must be 1 or 2 with matching bounds and point counts".into(),
            ));
        }
        for a in 0..dim {
            let (c, d) = (self.lower[a], self.upper[a]);
            if !(c < 0.0 && 0.0 < d) {
                return Err(Error::InvalidDomain(format!(
                    "confined interval [{c}, {d}] must contain 0 in its interior"
                )));
            }
            let n = self.points[a];
            if n < 4 || !n.is_power_of_two() {
                return Err(Error::InvalidDomain(format!(
                    "confined point count must be a power of two >= 4, got {n}"
                )));
            }
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::InvalidDomain(format!(
                "epsilon must lie in (0, 1], got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn len(&self) -> usize {
        self.points.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn length(&self, axis: usize) -> f64 {
        self.upper[axis] - self.lower[axis]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.length(axis) / self.points[axis] as f64
    }

    pub fn cell_volume(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    /// Node coordinates along `axis`: `c + j h`; node 0 is the wall.
    pub fn nodes(&self, axis: usize) -> Vec<f64> {
        let h = self.spacing(axis);
        (0..self.points[axis]).map(|j| self.lower[axis] + j as f64 * h).collect()
    }

    pub fn axes(&self) -> Vec<Axis> {
        (0..self.dim())
            .map(|a| Axis::Dirichlet {
                n: self.points[a],
                length: self.length(a),
            })
            .collect()
    }

    pub fn point(&self, index: usize) -> Vec<f64> {
        let mut rem = index;
        let mut out = vec![0.0; self.dim()];
        for a in (0..self.dim()).rev() {
            let j = rem % self.points[a];
            rem /= self.points[a];
            out[a] = self.lower[a] + j as f64 * self.spacing(a);
        }
        out
    }

    /// Per-axis node indices of flat node `index`.
    pub fn node_indices(&self, index: usize) -> Vec<usize> {
        let mut rem = index;
        let mut out = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            out[a] = rem % self.points[a];
            rem /= self.points[a];
        }
        out
    }

    /// True when the flat node lies on a wall.
    pub fn on_wall(&self, index: usize) -> bool {
        self.node_indices(index).contains(&0)
    }

    /// Lowest Dirichlet eigenvalue of `-Δ` on the box, without the ε scaling.
    pub fn ground_eigenvalue(&self) -> f64 {
        (0..self.dim()).map(|a| (PI / self.length(a)).powi(2)).sum()
    }
}

/// Product domain Ω = Ω_f × Ω_c. Flat one-body index: free axes first,
/// then confined axes, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub free: FreeDomain,
    pub confined: ConfinedDomain,
}

impl Domain {
    pub fn new(free: FreeDomain, confined: ConfinedDomain) -> Result<Self> {
        free.validate()?;
        confined.validate()?;
        Ok(Self { free, confined })
    }

    pub fn epsilon(&self) -> f64 {
        self.confined.epsilon
    }

    pub fn len(&self) -> usize {
        self.free.len() * self.confined.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        self.free.cell_volume() * self.confined.cell_volume()
    }

    pub fn axes(&self) -> Vec<Axis> {
        let mut a = self.free.axes();
        a.extend(self.confined.axes());
        a
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes().iter().map(Axis::len).collect()
    }

    /// Total spatial dimension d_f + d_c.
    pub fn total_dim(&self) -> usize {
        self.free.dim() + self.confined.dim()
    }

    pub fn split_index(&self, index: usize) -> (usize, usize) {
        (index / self.confined.len(), index % self.confined.len())
    }
}

/// Which domain a [`GridFunction`] lives on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GridDomain {
    Free(FreeDomain),
    Confined(ConfinedDomain),
    Product(Domain),
}

impl GridDomain {
    pub fn axes(&self) -> Vec<Axis> {
        match self {
            GridDomain::Free(f) => f.axes(),
            GridDomain::Confined(c) => c.axes(),
            GridDomain::Product(p) => p.axes(),
        }
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes().iter().map(Axis::len).collect()
    }

    pub fn len(&self) -> usize {
        self.shape().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> f64 {
        match self {
            GridDomain::Free(f) => f.cell_volume(),
            GridDomain::Confined(c) => c.cell_volume(),
            GridDomain::Product(p) => p.cell_volume(),
        }
    }

    /// Confinement strength, if the domain has confined axes.
    pub fn epsilon(&self) -> Option<f64> {
        match self {
            GridDomain::Free(_) => None,
            GridDomain::Confined(c) => Some(c.epsilon),
            GridDomain::Product(p) => Some(p.epsilon()),
        }
    }

    /// Indices (into `axes()`) of the free and of the confined axes.
    pub fn axis_roles(&self) -> (Vec<usize>, Vec<usize>) {
        match self {
            GridDomain::Free(f) => ((0..f.dim()).collect(), vec![]),
            GridDomain::Confined(c) => (vec![], (0..c.dim()).collect()),
            GridDomain::Product(p) => {
                let df = p.free.dim();
                ((0..df).collect(), (df..df + p.confined.dim()).collect())
            }
        }
    }
}

/// Position-space samples or spectral coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    Position,
    Spectral,
}

/// Complex samples on a grid domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    pub domain: GridDomain,
    pub values: Vec<C64>,
    pub space: Space,
}

pub const BOUNDARY_TOLERANCE: f64 = 1e-12;

impl GridFunction {
    pub fn new(domain: GridDomain, values: Vec<C64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::DomainMismatch(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                domain.len()
            )));
        }
        Ok(Self {
            domain,
            values,
            space: Space::Position,
        })
    }

    pub fn zeros(domain: GridDomain) -> Self {
        let n = domain.len();
        Self {
            domain,
            values: vec![C64::new(0.0, 0.0); n],
            space: Space::Position,
        }
    }

    /// Samples `f` at the nodes of a free domain.
    pub fn from_free_fn(domain: &FreeDomain, f: impl Fn(&[f64]) -> C64) -> Self {
        let values = (0..domain.len()).map(|i| f(&domain.point(i))).collect();
        Self {
            domain: GridDomain::Free(domain.clone()),
            values,
            space: Space::Position,
        }
    }

    /// Samples `f` at the nodes of a confined domain; wall nodes are set to 0.
    pub fn from_confined_fn(domain: &ConfinedDomain, f: impl Fn(&[f64]) -> C64) -> Self {
        let values = (0..domain.len())
            .map(|i| if domain.on_wall(i) { C64::new(0.0, 0.0) } else { f(&domain.point(i)) })
            .collect();
        Self {
            domain: GridDomain::Confined(domain.clone()),
            values,
            space: Space::Position,
        }
    }

    /// Product of a free and a confined function.
    pub fn product(free: &GridFunction, confined: &GridFunction) -> Result<Self> {
        let (GridDomain::Free(f), GridDomain::Confined(c)) = (&free.domain, &confined.domain) else {
            return Err(Error::DomainMismatch("product needs a free and a confined factor".into()));
        };
        let mut values = Vec::with_capacity(f.len() * c.len());
        for a in &free.values {
            for b in &confined.values {
                values.push(a * b);
            }
        }
        Ok(Self {
            domain: GridDomain::Product(Domain::new(f.clone(), c.clone())?),
            values,
            space: Space::Position,
        })
    }

    fn weight(&self) -> f64 {
        match self.space {
            Space::Position => self.domain.cell_volume(),
            Space::Spectral => 1.0,
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.weight()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        for v in &mut self.values {
            *v /= n;
        }
        Ok(self)
    }

    pub fn scale(&mut self, s: C64) {
        for v in &mut self.values {
            *v *= s;
        }
    }

    pub fn to_spectral(&self) -> Self {
        if self.space == Space::Spectral {
            return self.clone();
        }
        let mut out = self.clone();
        SpectralPlan::new(&self.domain.axes()).forward(&mut out.values);
        out.space = Space::Spectral;
        out
    }

    pub fn to_position(&self) -> Self {
        if self.space == Space::Position {
            return self.clone();
        }
        let mut out = self.clone();
        SpectralPlan::new(&self.domain.axes()).inverse(&mut out.values);
        out.space = Space::Position;
        out
    }

    /// Largest magnitude found on a Dirichlet wall node.
    pub fn wall_magnitude(&self) -> f64 {
        let (_, confined_axes) = self.domain.axis_roles();
        if confined_axes.is_empty() || self.space == Space::Spectral {
            return 0.0;
        }
        let shape = self.domain.shape();
        let mut worst: f64 = 0.0;
        let mut idx = vec![0usize; shape.len()];
        for v in &self.values {
            if confined_axes.iter().any(|&a| idx[a] == 0) {
                worst = worst.max(v.norm());
            }
            for d in (0..shape.len()).rev() {
                idx[d] += 1;
                if idx[d] < shape[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
        worst
    }

    fn require_position(&self, what: &str) -> Result<()> {
        if self.space != Space::Position {
            return Err(Error::DomainMismatch(format!("{what} expects position-space samples")));
        }
        Ok(())
    }
}

/// `-Δ_x f` via the Fourier multiplier `|k|²` on the free axes.
pub fn laplacian_free(f: &GridFunction) -> Result<GridFunction> {
    f.require_position("laplacian_free")?;
    let (free_axes, _) = f.domain.axis_roles();
    if free_axes.is_empty() {
        return Err(Error::DomainMismatch("laplacian_free needs free axes".into()));
    }
    let plan = SpectralPlan::new(&f.domain.axes());
    let mut out = f.clone();
    plan.apply_multiplier(&mut out.values, |k| {
        C64::new(free_axes.iter().map(|&a| k[a] * k[a]).sum(), 0.0)
    });
    Ok(out)
}

/// `-ε⁻² Δ_y f` via the sine-series multiplier `(m π / (d - c))²`.
/// Wall values above the tolerance are rejected.
pub fn laplacian_confined(f: &GridFunction, epsilon: f64) -> Result<GridFunction> {
    f.require_position("laplacian_confined")?;
    let (_, conf_axes) = f.domain.axis_roles();
    if conf_axes.is_empty() {
        return Err(Error::DomainMismatch("laplacian_confined needs confined axes".into()));
    }
    if !(epsilon > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let wall = f.wall_magnitude();
    let tol = BOUNDARY_TOLERANCE * f.sup_norm().max(1.0);
    if wall > tol {
        return Err(Error::BoundaryViolation {
            value: wall,
            tolerance: tol,
        });
    }
    let plan = SpectralPlan::new(&f.domain.axes());
    let scale = epsilon.powi(-2);
    let mut out = f.clone();
    plan.apply_multiplier(&mut out.values, |k| {
        C64::new(scale * conf_axes.iter().map(|&a| k[a] * k[a]).sum::<f64>(), 0.0)
    });
    Ok(out)
}

/// `⟨f, g⟩`, conjugate-linear in `f`, midpoint quadrature (or the plain sum
/// for spectral coefficients).
pub fn inner_product(f: &GridFunction, g: &GridFunction) -> Result<Complex64> {
    if f.domain != g.domain {
        return Err(Error::DomainMismatch("inner product of functions on different domains".into()));
    }
    if f.space != g.space {
        return Err(Error::DomainMismatch("inner product mixes position and spectral samples".into()));
    }
    let sum: Complex64 = f.values.iter().zip(&g.values).map(|(a, b)| a.conj() * b).sum();
    Ok(sum * f.weight())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free1() -> FreeDomain {
        FreeDomain::cube(1, 4.0, 32).unwrap()
    }

    fn conf1() -> ConfinedDomain {
        ConfinedDomain::cube(1, -0.5, 0.5, 16, 1.0).unwrap()
    }

    #[test]
    fn domain_invariants_are_enforced() {
        assert!(FreeDomain::cube(1, 4.0, 6).is_err());
        assert!(FreeDomain::cube(1, 4.0, 12).is_err());
        assert!(FreeDomain::cube(3, 4.0, 16).is_err());
        assert!(FreeDomain::cube(1, -1.0, 16).is_err());
        assert!(ConfinedDomain::cube(1, 0.0, 1.0, 8, 1.0).is_err());
        assert!(ConfinedDomain::cube(1, -0.5, 0.5, 8, 0.0).is_err());
        assert!(ConfinedDomain::cube(1, -0.5, 0.5, 8, 1.5).is_err());
    }

    #[test]
    fn laplacian_of_constant_vanishes() {
        let f = GridFunction::from_free_fn(&free1(), |_| C64::new(2.5, -1.0));
        let lap = laplacian_free(&f).unwrap();
        assert!(lap.sup_norm() < 1e-12);
    }

    #[test]
    fn laplacian_of_fourier_mode() {
        let d = free1();
        let l = d.extent[0];
        let k = 2.0 * PI / l;
        let f = GridFunction::from_free_fn(&d, |x| C64::new((k * x[0]).sin(), 0.0));
        let lap = laplacian_free(&f).unwrap();
        for (a, b) in lap.values.iter().zip(&f.values) {
            assert!((a - b * k * k).norm() < 1e-11);
        }
    }

    #[test]
    fn confined_laplacian_eigenmodes_and_scaling() {
        let d = conf1();
        let len = d.length(0);
        let c = d.lower[0];
        for (m, eps) in [(1usize, 1.0), (1, 0.1), (2, 1.0)] {
            let f = GridFunction::from_confined_fn(&d, |y| {
                C64::new((m as f64 * PI * (y[0] - c) / len).sin(), 0.0)
            });
            let lap = laplacian_confined(&f, eps).unwrap();
            let ev = (m as f64 * PI / len).powi(2) / (eps * eps);
            for (a, b) in lap.values.iter().zip(&f.values) {
                assert!((a - b * ev).norm() < 1e-9 * ev, "m={m} eps={eps}");
            }
        }
    }

    #[test]
    fn confined_laplacian_rejects_wall_values() {
        let d = conf1();
        let mut f = GridFunction::from_confined_fn(&d, |_| C64::new(1.0, 0.0));
        f.values[0] = C64::new(1e-6, 0.0);
        assert!(matches!(
            laplacian_confined(&f, 1.0),
            Err(Error::BoundaryViolation { .. })
        ));
    }

    #[test]
    fn orthogonal_sine_modes() {
        let d = conf1();
        let len = d.length(0);
        let c = d.lower[0];
        let f = GridFunction::from_confined_fn(&d, |y| C64::new((PI * (y[0] - c) / len).sin(), 0.0));
        let g = GridFunction::from_confined_fn(&d, |y| C64::new((3.0 * PI * (y[0] - c) / len).sin(), 0.0));
        assert!(inner_product(&f, &g).unwrap().norm() < 1e-12);
        let ff = inner_product(&f, &f).unwrap();
        assert!(ff.im.abs() < 1e-15 && ff.re > 0.0);
    }

    #[test]
    fn inner_product_rejects_domain_mismatch() {
        let f = GridFunction::from_free_fn(&free1(), |_| C64::new(1.0, 0.0));
        let g = GridFunction::from_free_fn(&FreeDomain::cube(1, 8.0, 32).unwrap(), |_| C64::new(1.0, 0.0));
        assert!(inner_product(&f, &g).is_err());
        assert!(laplacian_confined(&f, 1.0).is_err());
    }

    #[test]
    fn min_image_wraps() {
        let d = FreeDomain::cube(1, 8.0, 8).unwrap();
        assert_eq!(d.min_image(7, 0), vec![-1.0]);
        assert_eq!(d.min_image(0, 7), vec![1.0]);
        assert_eq!(d.min_image(3, 1), vec![2.0]);
    }
}
