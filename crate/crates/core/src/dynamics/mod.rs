//! Time evolution after a sudden parameter change, closed or coupled to a
//! dephasing or particle-loss bath.

mod linalg;
mod lindblad;
pub mod series;

use num_complex::Complex64;

pub use linalg::MAX_EIGENVECTOR_CONDITION;
pub use lindblad::{
    lindblad_evolve_exact, lindblad_evolve_rk4, liouvillian, Channel, JumpOperator, LindbladModel, Liouvillian,
    MAX_EXACT_DIM, MAX_LIOUVILLIAN_DIM, RK4_MAX_HALVINGS, RK4_STEP_FACTOR, RK4_TRACE_DRIFT_TOL,
    TRAJECTORY_HERMITICITY_TOL, TRAJECTORY_POSITIVITY_TOL, TRAJECTORY_TRACE_TOL,
};
pub use series::TimeSeries;

use crate::basis::{full_basis, sector_basis};
use crate::entanglement::negativity_pair;
use crate::error::{Error, Result};
use crate::operators::{hamiltonian, ModelParams};
use crate::spectral::{eigh, ground_state, GroundState};
use crate::state::{DensityMatrix, StateVector};

/// Prepare the ground state of `initial`, evolve under `evolution`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuenchSpec {
    pub initial: ModelParams,
    pub evolution: ModelParams,
    /// In units of 1/U.
    pub t_max: f64,
    pub samples: usize,
    /// Start from a degenerate ground state anyway (the choice of state is then basis-dependent).
    pub allow_degenerate: bool,
}

impl QuenchSpec {
    pub fn new(initial: ModelParams, evolution: ModelParams, t_max: f64, samples: usize) -> Result<Self> {
        let spec = Self {
            initial,
            evolution,
            t_max,
            samples,
            allow_degenerate: false,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Coherent quench `J: 0.1 → 1` at `U = 1`.
    pub fn coherent_default() -> Self {
        Self {
            initial: ModelParams { j: 0.1, u: 1.0 },
            evolution: ModelParams { j: 1.0, u: 1.0 },
            t_max: 50.0,
            samples: 2001,
            allow_degenerate: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        ModelParams::new(self.initial.j, self.initial.u)?;
        ModelParams::new(self.evolution.j, self.evolution.u)?;
        series::uniform_times(self.t_max, self.samples)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Integrator {
    #[default]
    Rk4,
    Exact,
}

/// Ground state of the pre-quench Hamiltonian on the `n`-particle sector,
/// refusing degenerate levels unless `allow_degenerate` is set.
pub fn initial_ground_state(spec: &QuenchSpec, n: usize) -> Result<GroundState> {
    let gs = ground_state(&hamiltonian(&sector_basis(n), spec.initial))?;
    if gs.degenerate && !spec.allow_degenerate {
        return Err(Error::DegenerateGroundState { gap: gs.gap });
    }
    Ok(gs)
}

/// Closed evolution `|ψ(t)⟩ = Σ cᵢ e^{-iEᵢt} |ψᵢ⟩` of the pre-quench ground
/// state. Channels: negativity, its running time average, energy.
pub fn quench_evolve(spec: &QuenchSpec, n: usize) -> Result<TimeSeries> {
    spec.validate()?;
    let gs = initial_ground_state(spec, n)?;
    let h_e = hamiltonian(&sector_basis(n), spec.evolution);
    let decomp = eigh(&h_e)?;
    let coeffs = decomp.coefficients(&gs.state)?;
    let times = series::uniform_times(spec.t_max, spec.samples)?;

    let mut negativity = Vec::with_capacity(times.len());
    let mut energy = Vec::with_capacity(times.len());
    for &t in &times {
        let phased = coeffs
            .iter()
            .zip(decomp.eigenvalues())
            .map(|(c, &e)| c * Complex64::new(0.0, -e * t).exp());
        let amps = decomp.eigenvectors() * crate::state::CVector::from_iterator(coeffs.len(), phased);
        let psi = StateVector::new(decomp.basis().clone(), amps)?;
        energy.push(h_e.expectation_pure(&psi)?);
        negativity.push(negativity_pair(&DensityMatrix::from_pure(&psi)?)?.value);
    }
    let avg = series::running_time_average(&times, &negativity);
    let mut ts = TimeSeries::new(times);
    ts.insert(series::NEGATIVITY, negativity);
    ts.insert(series::NEGATIVITY_AVG, avg);
    ts.insert(series::ENERGY, energy);
    Ok(ts)
}

/// Negativity of the post-quench Hamiltonian's ground state, the adiabatic reference.
pub fn evolution_ground_state_negativity(spec: &QuenchSpec, n: usize) -> Result<f64> {
    let gs = ground_state(&hamiltonian(&sector_basis(n), spec.evolution))?;
    Ok(negativity_pair(&DensityMatrix::from_pure(&gs.state)?)?.value)
}

/// Initial density matrix for an open run: the sector ground state, placed in
/// the top block of the full basis for loss runs.
pub fn open_initial_state(spec: &QuenchSpec, channel: Channel, n: usize) -> Result<DensityMatrix> {
    let gs = initial_ground_state(spec, n)?;
    let psi = match channel {
        Channel::Dephasing => gs.state,
        Channel::Loss => gs.state.embed_top_block(full_basis(n))?,
    };
    DensityMatrix::from_pure(&psi)
}

/// Ground state of `spec.initial` evolved under `spec.evolution` plus the
/// dissipator of `channel` at rate `gamma` on both wells. With
/// `initial == evolution` this is the decay of an eigenstate.
pub fn quenched_open_run(
    spec: &QuenchSpec,
    channel: Channel,
    gamma: f64,
    n: usize,
    integrator: Integrator,
) -> Result<TimeSeries> {
    spec.validate()?;
    let rho0 = open_initial_state(spec, channel, n)?;
    let model = LindbladModel::build(channel, spec.evolution, n, gamma)?;
    match integrator {
        Integrator::Rk4 => lindblad_evolve_rk4(&model, &rho0, spec.t_max, spec.samples),
        Integrator::Exact => lindblad_evolve_exact(&model, &rho0, spec.t_max, spec.samples),
    }
}
