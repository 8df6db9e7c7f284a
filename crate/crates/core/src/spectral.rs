//! Hermitian eigendecomposition and the states built from it: ground states,
//! canonical (Gibbs) states and the action of `exp(s H)` on vectors.

use std::sync::Arc;

use num_complex::Complex64;

use crate::basis::FockBasis;
use crate::error::{Error, Result};
use crate::operators::OperatorMatrix;
use crate::state::{CMatrix, CVector, DensityMatrix, StateVector};

/// Relative gap below which the lowest level counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    basis: Arc<FockBasis>,
    eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in eigenvalue order.
    eigenvectors: CMatrix,
}

impl SpectralDecomposition {
    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, i: usize) -> StateVector {
        StateVector::new(self.basis.clone(), self.eigenvectors.column(i).into_owned())
            .expect("eigenvector length equals basis dimension")
    }

    /// `V diag(f(λ)) V†`.
    pub fn apply_function(&self, f: impl Fn(f64) -> Complex64) -> CMatrix {
        let d = self.eigenvalues.len();
        let mut scaled = self.eigenvectors.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let w = f(lambda);
            for i in 0..d {
                scaled[(i, k)] *= w;
            }
        }
        scaled * self.eigenvectors.adjoint()
    }

    /// `exp(scale · H) ψ` using the cached decomposition.
    pub fn exp_action(&self, scale: Complex64, psi: &StateVector) -> Result<StateVector> {
        self.basis.ensure_same(psi.basis())?;
        let coeffs = self.eigenvectors.adjoint() * psi.amplitudes();
        let phased = CVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(&self.eigenvalues)
                .map(|(c, &lambda)| c * (scale * lambda).exp()),
        );
        StateVector::new(self.basis.clone(), &self.eigenvectors * phased)
    }

    /// Expansion coefficients `⟨v_i|ψ⟩`.
    pub fn coefficients(&self, psi: &StateVector) -> Result<CVector> {
        self.basis.ensure_same(psi.basis())?;
        Ok(self.eigenvectors.adjoint() * psi.amplitudes())
    }
}

fn is_diagonal(m: &CMatrix) -> bool {
    let n = m.nrows();
    (0..n).all(|j| (0..n).all(|i| i == j || m[(i, j)] == Complex64::new(0.0, 0.0)))
}

/// Multiply each column by a unit phase so that its largest-magnitude entry
/// (first one on ties) is real and positive.
fn fix_phases(vectors: &mut CMatrix) {
    for mut col in vectors.column_iter_mut() {
        let max = col.iter().fold(0.0_f64, |m, z| m.max(z.norm()));
        if max == 0.0 {
            continue;
        }
        let pivot = col
            .iter()
            .copied()
            .find(|z| z.norm() >= max * (1.0 - 1e-10))
            .expect("column has a maximal entry");
        let phase = pivot.conj() / pivot.norm();
        for z in col.iter_mut() {
            *z *= phase;
        }
    }
}

/// Full eigendecomposition of a Hermitian operator, eigenvalues ascending.
pub fn eigh(op: &OperatorMatrix) -> Result<SpectralDecomposition> {
    op.ensure_hermitian()?;
    let a = op.data();
    let d = op.dim();

    // Exactly diagonal input keeps Fock states as eigenvectors, so degenerate
    // levels (J = 0) resolve to occupation states rather than solver-dependent mixtures.
    let (values, vectors): (Vec<f64>, CMatrix) = if is_diagonal(a) {
        ((0..d).map(|i| a[(i, i)].re).collect(), CMatrix::identity(d, d))
    } else {
        let herm = (a + a.adjoint()) * Complex64::new(0.5, 0.0);
        let eig = nalgebra::SymmetricEigen::new(herm);
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    let eigenvalues = order.iter().map(|&i| values[i]).collect();
    let mut eigenvectors = CMatrix::from_fn(d, d, |r, c| vectors[(r, order[c])]);
    fix_phases(&mut eigenvectors);

    Ok(SpectralDecomposition {
        basis: op.basis().clone(),
        eigenvalues,
        eigenvectors,
    })
}

#[derive(Debug, Clone)]
pub struct GroundState {
    pub state: StateVector,
    pub energy: f64,
    /// `E₁ - E₀`, infinite for one-dimensional spaces.
    pub gap: f64,
    pub degenerate: bool,
}

pub fn ground_state_of(decomp: &SpectralDecomposition) -> GroundState {
    let ev = decomp.eigenvalues();
    let energy = ev[0];
    let gap = ev.get(1).map_or(f64::INFINITY, |e1| e1 - energy);
    GroundState {
        state: decomp.eigenvector(0),
        energy,
        gap,
        degenerate: gap <= DEGENERACY_TOL * energy.abs().max(1.0),
    }
}

pub fn ground_state(op: &OperatorMatrix) -> Result<GroundState> {
    Ok(ground_state_of(&eigh(op)?))
}

/// Boltzmann weights `exp(-β(λᵢ - λ₀))`, normalized.
pub fn boltzmann_weights(eigenvalues: &[f64], beta: f64) -> Result<Vec<f64>> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidBeta(beta));
    }
    let e0 = eigenvalues[0];
    let w: Vec<f64> = eigenvalues
        .iter()
        .map(|&e| if beta == 0.0 { 1.0 } else { (-beta * (e - e0)).exp() })
        .collect();
    let z: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / z).collect())
}

pub fn gibbs_state_of(decomp: &SpectralDecomposition, beta: f64) -> Result<DensityMatrix> {
    let weights = boltzmann_weights(decomp.eigenvalues(), beta)?;
    let v = decomp.eigenvectors();
    let d = weights.len();
    let mut data = CMatrix::zeros(d, d);
    for (k, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let col = v.column(k);
        data += (col * col.adjoint()) * Complex64::new(w, 0.0);
    }
    DensityMatrix::from_parts_unchecked(decomp.basis().clone(), data)
}

/// `exp(-βH) / Tr exp(-βH)`.
pub fn gibbs_state(op: &OperatorMatrix, beta: f64) -> Result<DensityMatrix> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidBeta(beta));
    }
    gibbs_state_of(&eigh(op)?, beta)
}

/// `exp(scale · H) ψ`; `scale = -i t` gives unitary evolution.
pub fn matrix_exp_hermitian_action(
    op: &OperatorMatrix,
    scale: Complex64,
    psi: &StateVector,
) -> Result<StateVector> {
    op.basis().ensure_same(psi.basis())?;
    eigh(op)?.exp_action(scale, psi)
}
