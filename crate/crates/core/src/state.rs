//! Pure states and density matrices tied to their basis.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::basis::FockBasis;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-8;
pub const NORM_TOL: f64 = 1e-10;

/// Largest entrywise deviation `|m_ij - conj(m_ji)|`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for j in 0..n {
        for i in 0..=j {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub(crate) fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[derive(Debug, Clone)]
pub struct StateVector {
    basis: Arc<FockBasis>,
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(basis: Arc<FockBasis>, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: amplitudes.len(),
            });
        }
        Ok(Self { basis, amplitudes })
    }

    /// Real amplitudes, convenient for states written in the Fock basis.
    pub fn from_real(basis: Arc<FockBasis>, amplitudes: &[f64]) -> Result<Self> {
        let v = CVector::from_iterator(
            amplitudes.len(),
            amplitudes.iter().map(|&a| Complex64::new(a, 0.0)),
        );
        Self::new(basis, v)
    }

    /// The Fock state at position `index`.
    pub fn basis_state(basis: Arc<FockBasis>, index: usize) -> Self {
        let mut v = CVector::zeros(basis.dim());
        v[index] = Complex64::new(1.0, 0.0);
        Self {
            basis,
            amplitudes: v,
        }
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn ensure_normalized(&self) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::Unnormalized(norm));
        }
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Unnormalized(norm));
        }
        self.amplitudes.unscale_mut(norm);
        Ok(self)
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.basis.ensure_same(&other.basis)?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Copy into the `Sector(N)` top block of `target`, a `Full(N)` basis.
    pub fn embed_top_block(&self, target: Arc<FockBasis>) -> Result<StateVector> {
        if !self.basis.is_sector() {
            return Err(Error::UnsupportedBasis {
                operation: "embed_top_block",
                kind: self.basis.kind(),
            });
        }
        let mut v = CVector::zeros(target.dim());
        for (i, s) in self.basis.states().iter().enumerate() {
            let j = target.index_of(*s).ok_or_else(|| {
                Error::InvalidParameter(format!("{s} is not part of the {} basis", target.kind()))
            })?;
            v[j] = self.amplitudes[i];
        }
        StateVector::new(target, v)
    }
}

/// Hermitian, unit-trace, positive semidefinite matrix on a Fock basis.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    basis: Arc<FockBasis>,
    data: CMatrix,
}

impl DensityMatrix {
    /// Validated constructor.
    pub fn new(basis: Arc<FockBasis>, data: CMatrix) -> Result<Self> {
        let rho = Self::from_parts_unchecked(basis, data)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Only checks the shape. Trajectory code uses this and validates separately.
    pub fn from_parts_unchecked(basis: Arc<FockBasis>, data: CMatrix) -> Result<Self> {
        let d = basis.dim();
        if data.nrows() != d || data.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: data.nrows().max(data.ncols()),
            });
        }
        Ok(Self { basis, data })
    }

    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        psi.ensure_normalized()?;
        let a = psi.amplitudes();
        Ok(Self {
            basis: psi.basis().clone(),
            data: a * a.adjoint(),
        })
    }

    pub fn maximally_mixed(basis: Arc<FockBasis>) -> Self {
        let d = basis.dim();
        let data = CMatrix::identity(d, d) / Complex64::new(d as f64, 0.0);
        Self { basis, data }
    }

    pub fn validate(&self) -> Result<()> {
        let herm = hermiticity_deviation(&self.data);
        if herm > HERMITICITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "not Hermitian (deviation {herm:.3e})"
            )));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace is {tr}")));
        }
        let min = self.min_eigenvalue();
        if min < -POSITIVITY_TOL {
            return Err(Error::InvalidDensityMatrix(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_data(self) -> CMatrix {
        self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        self.data.trace().re
    }

    /// `Tr ρ²`, computed as the squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.data)[0]
    }

    pub fn hermiticity_deviation(&self) -> f64 {
        hermiticity_deviation(&self.data)
    }

    /// Relabel rows and columns: entry `(i, j)` of the result is `(p[i], p[j])` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let d = self.dim();
        let data = CMatrix::from_fn(d, d, |i, j| self.data[(perm[i], perm[j])]);
        Self {
            basis: self.basis.clone(),
            data,
        }
    }

    /// `ρ_ii` for every basis state.
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.data[(i, i)].re).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{full_basis, sector_basis};

    #[test]
    fn pure_state_density_is_valid() {
        let b = sector_basis(1);
        let s = 0.5_f64.sqrt();
        let psi = StateVector::from_real(b, &[s, s]).unwrap();
        let rho = DensityMatrix::from_pure(&psi).unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-14);
        assert!((rho.data()[(0, 1)].re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_matrices() {
        let b = sector_basis(1);
        let c = |x: f64| Complex64::new(x, 0.0);
        let not_unit = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(1.0)]);
        assert!(DensityMatrix::new(b.clone(), not_unit).is_err());
        let negative = CMatrix::from_row_slice(2, 2, &[c(0.5), c(0.9), c(0.9), c(0.5)]);
        assert!(DensityMatrix::new(b.clone(), negative).is_err());
        let non_herm = CMatrix::from_row_slice(2, 2, &[c(0.5), c(0.1), c(0.0), c(0.5)]);
        assert!(DensityMatrix::new(b, non_herm).is_err());
    }

    #[test]
    fn unnormalized_pure_state_rejected() {
        let psi = StateVector::from_real(sector_basis(1), &[1.0, 1.0]).unwrap();
        assert!(matches!(DensityMatrix::from_pure(&psi), Err(Error::Unnormalized(_))));
    }

    #[test]
    fn embedding_fills_top_block() {
        let psi = StateVector::from_real(sector_basis(2), &[0.6, 0.0, 0.8]).unwrap();
        let full = psi.embed_top_block(full_basis(2)).unwrap();
        let amps: Vec<f64> = full.amplitudes().iter().map(|z| z.re).collect();
        assert_eq!(amps, vec![0.6, 0.0, 0.8, 0.0, 0.0, 0.0]);
    }
}
