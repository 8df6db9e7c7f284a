//! Seeded random pair-basis states for cross-checking the entanglement code.

use dwell_core::entanglement::{eof_bound_with, negativity_pair, negativity_pt_oracle, pure_state_eof, SBoundReading};
use dwell_core::{sector_basis, CMatrix, CVector, DensityMatrix, StateVector};
use num_complex::Complex64;
use rand::Rng;

use crate::error::Result;

/// Mixed state on the `n`-particle sector: random populations, off-diagonal
/// elements with random modulus (bounded by `√(pᵢpⱼ)`) and phase, mixed with
/// the identity just enough to be positive semidefinite.
pub fn random_pair_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityMatrix {
    let basis = sector_basis(n);
    let d = basis.dim();
    let p: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
    let mut a = CMatrix::zeros(d, d);
    for i in 0..d {
        a[(i, i)] = Complex64::new(p[i], 0.0);
        for j in i + 1..d {
            let r = rng.random_range(0.0..1.0) * (p[i] * p[j]).sqrt();
            let z = Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU));
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
    let lowest = DensityMatrix::from_parts_unchecked(basis.clone(), a.clone())
        .expect("square")
        .min_eigenvalue();
    if lowest < 0.0 {
        for i in 0..d {
            a[(i, i)] -= Complex64::new(lowest, 0.0);
        }
    }
    let tr: f64 = (0..d).map(|i| a[(i, i)].re).sum();
    a.unscale_mut(tr);
    DensityMatrix::new(basis, a).expect("constructed state is valid")
}

/// Uniformly random pure state on the `n`-particle sector.
pub fn random_pure_pair_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> StateVector {
    let basis = sector_basis(n);
    let d = basis.dim();
    loop {
        let amps = CVector::from_fn(d, |_, _| {
            Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let norm = amps.norm();
        if norm > 1e-6 {
            return StateVector::new(basis.clone(), amps.unscale(norm)).expect("normalized");
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOutcome {
    pub trials: usize,
    /// Largest `|pair formula − partial-transpose oracle|` over mixed states.
    pub max_negativity_gap: f64,
    /// Largest `max(F, G, s) − S(ρ_A)` over pure states; should stay ≤ 0.
    pub max_bound_excess: f64,
}

/// Runs `trials` mixed and `trials` pure states on the `n`-particle sector.
pub fn verify_sector<R: Rng + ?Sized>(n: usize, trials: usize, reading: SBoundReading, rng: &mut R) -> Result<VerifyOutcome> {
    let mut gap = 0.0_f64;
    let mut excess = f64::NEG_INFINITY;
    for _ in 0..trials {
        let rho = random_pair_state(n, rng);
        let pair = negativity_pair(&rho)?.value;
        let oracle = negativity_pt_oracle(&rho)?;
        gap = gap.max((pair - oracle).abs());

        let psi = random_pure_pair_state(n, rng);
        let bound = eof_bound_with(&DensityMatrix::from_pure(&psi)?, reading)?;
        let entropy = pure_state_eof(&psi)?;
        excess = excess.max(bound.f.max(bound.g).max(bound.s) - entropy);
    }
    Ok(VerifyOutcome {
        trials,
        max_negativity_gap: gap,
        max_bound_excess: excess,
    })
}
