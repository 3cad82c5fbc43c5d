use nalgebra::DMatrix;

use super::{Condensate, TensorView};
use crate::error::{Error, Result};
use crate::spectral::C64;

/// One-particle density matrix in the orthonormal grid basis
/// `e_r / √dv`, so that `trace = 1` for a normalized state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    pub matrix: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `⟨φ, γ φ⟩`.
    pub fn expectation(&self, cond: &Condensate) -> f64 {
        let u = basis_vector(cond);
        (u.adjoint() * &self.matrix * &u)[(0, 0)].re
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.matrix.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev
    }
}

fn basis_vector(cond: &Condensate) -> DMatrix<C64> {
    let s = cond.dv.sqrt();
    DMatrix::from_iterator(cond.phi.len(), 1, cond.phi.iter().map(|v| v * s))
}

/// `γ(r, r') = ∫ ψ(r, ·) ψ̄(r', ·)` over coordinates 2..N.
pub fn density_matrix(psi: &TensorView) -> DensityMatrix {
    let m = psi.m;
    let rest = psi.values.len() / m;
    let w = psi.weight();
    let mut g = DMatrix::<C64>::zeros(m, m);
    for r in 0..m {
        let row_r = &psi.values[r * rest..(r + 1) * rest];
        for s in r..m {
            let row_s = &psi.values[s * rest..(s + 1) * rest];
            let v: C64 = row_r.iter().zip(row_s).map(|(a, b)| a * b.conj()).sum::<C64>() * w;
            g[(r, s)] = v;
            g[(s, r)] = v.conj();
        }
    }
    DensityMatrix { matrix: g }
}

/// `Tr |γ − |φ⟩⟨φ||` by a Hermitian eigendecomposition.
pub fn trace_distance(gamma: &DensityMatrix, cond: &Condensate) -> Result<f64> {
    if gamma.dim() != cond.phi.len() {
        return Err(Error::DomainMismatch("density matrix and condensate sizes differ".into()));
    }
    let u = basis_vector(cond);
    let diff = &gamma.matrix - &u * u.adjoint();
    Ok(diff.symmetric_eigen().eigenvalues.iter().map(|v| v.abs()).sum())
}
