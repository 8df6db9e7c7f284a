//! Second-quantized operators of the two-site Bose-Hubbard model as dense
//! matrices on a [`FockBasis`].
//!
//! ```text
//! H(J, U) = -J K + U O
//! K = b_A† b_B + b_A b_B†
//! O = Σ_α n_α (n_α - 1) / 2
//! ```
//!
//! Units: ħ = 1, energies in units of U, times in units of 1/U.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::basis::{FockBasis, FockState};
use crate::error::{Error, Result};
use crate::state::{hermiticity_deviation, max_abs, CMatrix, DensityMatrix, StateVector};

const OPERATOR_HERMITICITY_TOL: f64 = 1e-12;
const EXPECTATION_IMAG_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Well {
    A,
    B,
}

impl Well {
    fn occupation(self, s: FockState) -> usize {
        match self {
            Well::A => s.n_a,
            Well::B => s.n_b,
        }
    }
}

impl fmt::Display for Well {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Well::A => f.write_str("A"),
            Well::B => f.write_str("B"),
        }
    }
}

/// Hopping amplitude `j` and on-site interaction `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub j: f64,
    pub u: f64,
}

impl ModelParams {
    pub fn new(j: f64, u: f64) -> Result<Self> {
        if !j.is_finite() || !u.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "model parameters must be finite (J = {j}, U = {u})"
            )));
        }
        Ok(Self { j, u })
    }
}

#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    basis: Arc<FockBasis>,
    data: CMatrix,
    hermitian: bool,
}

impl OperatorMatrix {
    /// Wraps `data`, setting the Hermitian flag from an entrywise check.
    pub fn new(basis: Arc<FockBasis>, data: CMatrix) -> Result<Self> {
        let d = basis.dim();
        if data.nrows() != d || data.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: data.nrows().max(data.ncols()),
            });
        }
        let tol = OPERATOR_HERMITICITY_TOL * max_abs(&data).max(1.0);
        let hermitian = hermiticity_deviation(&data) <= tol;
        Ok(Self {
            basis,
            data,
            hermitian,
        })
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn data(&self) -> &CMatrix {
        &self.data
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn ensure_hermitian(&self) -> Result<()> {
        if self.hermitian {
            Ok(())
        } else {
            Err(Error::NotHermitian {
                deviation: hermiticity_deviation(&self.data),
            })
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            basis: self.basis.clone(),
            data: self.data.adjoint(),
            hermitian: self.hermitian,
        }
    }

    pub fn product(&self, rhs: &OperatorMatrix) -> Result<Self> {
        self.basis.ensure_same(&rhs.basis)?;
        Self::new(self.basis.clone(), &self.data * &rhs.data)
    }

    /// `Σ cᵢ Aᵢ` over operators on a common basis.
    pub fn linear_combination(terms: &[(f64, &OperatorMatrix)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty linear combination".into()))?;
        let basis = first.basis.clone();
        let d = basis.dim();
        let mut data = CMatrix::zeros(d, d);
        for (c, op) in terms {
            basis.ensure_same(&op.basis)?;
            data += &op.data * Complex64::new(*c, 0.0);
        }
        Self::new(basis, data)
    }

    pub fn commutator(&self, rhs: &OperatorMatrix) -> Result<CMatrix> {
        self.basis.ensure_same(&rhs.basis)?;
        Ok(&self.data * &rhs.data - &rhs.data * &self.data)
    }

    /// `Tr[ρ A]` for Hermitian `A`.
    pub fn expectation(&self, rho: &DensityMatrix) -> Result<f64> {
        self.basis.ensure_same(rho.basis())?;
        self.ensure_hermitian()?;
        let r = rho.data();
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..d {
            for j in 0..d {
                acc += r[(i, j)] * self.data[(j, i)];
            }
        }
        real_part_checked(acc)
    }

    /// `⟨ψ|A|ψ⟩` for Hermitian `A`.
    pub fn expectation_pure(&self, psi: &StateVector) -> Result<f64> {
        self.basis.ensure_same(psi.basis())?;
        self.ensure_hermitian()?;
        let v = psi.amplitudes();
        real_part_checked(v.dotc(&(&self.data * v)))
    }
}

fn real_part_checked(z: Complex64) -> Result<f64> {
    if z.im.abs() > EXPECTATION_IMAG_TOL * z.re.abs().max(1.0) {
        return Err(Error::ComplexExpectation(z.im));
    }
    Ok(z.re)
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn diagonal_op(basis: &Arc<FockBasis>, f: impl Fn(FockState) -> f64) -> OperatorMatrix {
    let d = basis.dim();
    let mut data = CMatrix::zeros(d, d);
    for (i, s) in basis.states().iter().enumerate() {
        data[(i, i)] = real(f(*s));
    }
    OperatorMatrix {
        basis: basis.clone(),
        data,
        hermitian: true,
    }
}

/// `b_α`. Only defined on full bases, since it leaves any fixed-N sector.
pub fn annihilator(basis: &Arc<FockBasis>, well: Well) -> Result<OperatorMatrix> {
    if basis.is_sector() {
        return Err(Error::UnsupportedBasis {
            operation: "annihilator",
            kind: basis.kind(),
        });
    }
    let d = basis.dim();
    let mut data = CMatrix::zeros(d, d);
    for (i, s) in basis.states().iter().enumerate() {
        let n = well.occupation(*s);
        if n == 0 {
            continue;
        }
        let target = match well {
            Well::A => FockState::new(s.n_a - 1, s.n_b),
            Well::B => FockState::new(s.n_a, s.n_b - 1),
        };
        // Full bases are closed under removing a particle.
        let j = basis
            .index_of(target)
            .expect("full basis contains every lower-occupation state");
        data[(j, i)] = real((n as f64).sqrt());
    }
    Ok(OperatorMatrix {
        basis: basis.clone(),
        data,
        hermitian: false,
    })
}

/// `b_α†`, the adjoint of [`annihilator`]. On a truncated full basis the top
/// sector is mapped to zero.
pub fn creator(basis: &Arc<FockBasis>, well: Well) -> Result<OperatorMatrix> {
    Ok(annihilator(basis, well)?.adjoint())
}

pub fn number_op(basis: &Arc<FockBasis>, well: Well) -> OperatorMatrix {
    diagonal_op(basis, |s| well.occupation(s) as f64)
}

pub fn total_number_op(basis: &Arc<FockBasis>) -> OperatorMatrix {
    diagonal_op(basis, |s| s.total() as f64)
}

/// `K = b_A† b_B + b_A b_B†`, tridiagonal inside each sector.
pub fn hopping_op(basis: &Arc<FockBasis>) -> OperatorMatrix {
    let d = basis.dim();
    let mut data = CMatrix::zeros(d, d);
    for (i, s) in basis.states().iter().enumerate() {
        if s.n_a == 0 {
            continue;
        }
        // b_A b_B† |n_a, n_b⟩ = √(n_a (n_b + 1)) |n_a - 1, n_b + 1⟩
        let target = FockState::new(s.n_a - 1, s.n_b + 1);
        if let Some(j) = basis.index_of(target) {
            let amp = real(((s.n_a * (s.n_b + 1)) as f64).sqrt());
            data[(j, i)] = amp;
            data[(i, j)] = amp;
        }
    }
    OperatorMatrix {
        basis: basis.clone(),
        data,
        hermitian: true,
    }
}

/// `O = Σ_α n_α (n_α - 1) / 2`.
pub fn interaction_op(basis: &Arc<FockBasis>) -> OperatorMatrix {
    let pairs = |n: usize| (n * n.saturating_sub(1)) as f64 / 2.0;
    diagonal_op(basis, |s| pairs(s.n_a) + pairs(s.n_b))
}

pub fn hamiltonian(basis: &Arc<FockBasis>, params: ModelParams) -> OperatorMatrix {
    let k = hopping_op(basis);
    let o = interaction_op(basis);
    let data = k.data * real(-params.j) + o.data * real(params.u);
    OperatorMatrix {
        basis: basis.clone(),
        data,
        hermitian: true,
    }
}
