//! Markovian open-system evolution
//!
//! ```text
//! dρ/dt = -i[H, ρ] + Σ_k γ_k (L_k ρ L_k† - ½ {L_k† L_k, ρ})
//! ```
//!
//! with unit-normalized jump operators `L_k` (`n_A`, `n_B` for dephasing,
//! `b_A`, `b_B` for one-body loss) and rates `γ_k`. Density matrices are
//! column-stacked, so `vec(A ρ B) = (Bᵀ ⊗ A) vec(ρ)`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use super::linalg::{eigensystem, expm, MAX_EIGENVECTOR_CONDITION};
use super::series::{self, TimeSeries};
use crate::basis::{full_basis, sector_basis, FockBasis};
use crate::entanglement::negativity_pair;
use crate::error::{Error, Result};
use crate::operators::{annihilator, hamiltonian, number_op, total_number_op, ModelParams, OperatorMatrix, Well};
use crate::spectral::eigh;
use crate::state::{CMatrix, CVector, DensityMatrix};

/// Largest superoperator dimension `d²` assembled densely.
pub const MAX_LIOUVILLIAN_DIM: usize = 10_000;
/// Largest `d²` accepted by the spectral integrator.
pub const MAX_EXACT_DIM: usize = 2_500;
/// RK4 step bound: `h · (2‖H‖₂ + Σ γ‖L†L‖₂) ≤ RK4_STEP_FACTOR`.
pub const RK4_STEP_FACTOR: f64 = 0.05;
pub const RK4_MAX_HALVINGS: u32 = 20;
pub const RK4_TRACE_DRIFT_TOL: f64 = 1e-8;

/// Limits checked at every sample of an open trajectory.
pub const TRAJECTORY_TRACE_TOL: f64 = 1e-8;
pub const TRAJECTORY_HERMITICITY_TOL: f64 = 1e-9;
pub const TRAJECTORY_POSITIVITY_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Dephasing,
    Loss,
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Channel::Dephasing => f.write_str("dephasing"),
            Channel::Loss => f.write_str("loss"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct JumpOperator {
    pub operator: OperatorMatrix,
    pub rate: f64,
}

#[derive(Debug, Clone)]
pub struct LindbladModel {
    hamiltonian: OperatorMatrix,
    jumps: Vec<JumpOperator>,
    channel: Channel,
}

impl LindbladModel {
    pub fn new(hamiltonian: OperatorMatrix, jumps: Vec<JumpOperator>, channel: Channel) -> Result<Self> {
        hamiltonian.ensure_hermitian()?;
        let basis = hamiltonian.basis().clone();
        match (channel, basis.is_sector()) {
            (Channel::Dephasing, true) | (Channel::Loss, false) => {}
            _ => {
                return Err(Error::UnsupportedBasis {
                    operation: match channel {
                        Channel::Dephasing => "dephasing channel",
                        Channel::Loss => "loss channel",
                    },
                    kind: basis.kind(),
                })
            }
        }
        for jump in &jumps {
            basis.ensure_same(jump.operator.basis())?;
            if !(jump.rate.is_finite() && jump.rate >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "jump rates must be finite and non-negative, got {}",
                    jump.rate
                )));
            }
        }
        Ok(Self {
            hamiltonian,
            jumps,
            channel,
        })
    }

    /// Dephasing on the `n`-particle sector with per-well rates.
    pub fn dephasing_with_rates(params: ModelParams, n: usize, rate_a: f64, rate_b: f64) -> Result<Self> {
        let basis = sector_basis(n);
        let jumps = vec![
            JumpOperator {
                operator: number_op(&basis, Well::A),
                rate: rate_a,
            },
            JumpOperator {
                operator: number_op(&basis, Well::B),
                rate: rate_b,
            },
        ];
        Self::new(hamiltonian(&basis, params), jumps, Channel::Dephasing)
    }

    /// One-body loss on the truncated space with at most `n_max` particles.
    pub fn loss_with_rates(params: ModelParams, n_max: usize, rate_a: f64, rate_b: f64) -> Result<Self> {
        let basis = full_basis(n_max);
        let jumps = vec![
            JumpOperator {
                operator: annihilator(&basis, Well::A)?,
                rate: rate_a,
            },
            JumpOperator {
                operator: annihilator(&basis, Well::B)?,
                rate: rate_b,
            },
        ];
        Self::new(hamiltonian(&basis, params), jumps, Channel::Loss)
    }

    /// Equal rates `γ_A = γ_B = γ`.
    pub fn build(channel: Channel, params: ModelParams, n: usize, gamma: f64) -> Result<Self> {
        match channel {
            Channel::Dephasing => Self::dephasing_with_rates(params, n, gamma, gamma),
            Channel::Loss => Self::loss_with_rates(params, n, gamma, gamma),
        }
    }

    pub fn hamiltonian(&self) -> &OperatorMatrix {
        &self.hamiltonian
    }

    pub fn jumps(&self) -> &[JumpOperator] {
        &self.jumps
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        self.hamiltonian.basis()
    }

    /// Direct evaluation of the right-hand side on a matrix.
    pub fn rhs(&self, rho: &CMatrix) -> CMatrix {
        let h = self.hamiltonian.data();
        let minus_i = Complex64::new(0.0, -1.0);
        let mut out = (h * rho - rho * h) * minus_i;
        for jump in &self.jumps {
            let l = jump.operator.data();
            let ldl = l.adjoint() * l;
            let g = Complex64::new(jump.rate, 0.0);
            out += (l * rho * l.adjoint() - (&ldl * rho + rho * &ldl) * Complex64::new(0.5, 0.0)) * g;
        }
        out
    }

    /// Step-size scale `2‖H‖₂ + Σ γ‖L†L‖₂`.
    fn stiffness(&self) -> Result<f64> {
        let spectral_norm = |op: &OperatorMatrix| -> Result<f64> {
            Ok(eigh(op)?.eigenvalues().iter().fold(0.0_f64, |m, l| m.max(l.abs())))
        };
        let mut total = 2.0 * spectral_norm(&self.hamiltonian)?;
        for jump in &self.jumps {
            if jump.rate > 0.0 {
                total += jump.rate * spectral_norm(&jump.operator.adjoint().product(&jump.operator)?)?;
            }
        }
        Ok(total)
    }
}

/// Dense superoperator acting on column-stacked density matrices.
#[derive(Debug, Clone)]
pub struct Liouvillian {
    basis: Arc<FockBasis>,
    matrix: CMatrix,
}

impl Liouvillian {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    /// Dimension `d²` of the superoperator.
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let d = self.basis.dim();
        let v = CVector::from_column_slice(rho.as_slice());
        let out = &self.matrix * v;
        CMatrix::from_column_slice(d, d, out.as_slice())
    }
}

pub fn liouvillian(model: &LindbladModel) -> Result<Liouvillian> {
    let d = model.basis().dim();
    let dim = d * d;
    if dim > MAX_LIOUVILLIAN_DIM {
        return Err(Error::LiouvillianTooLarge {
            dim,
            limit: MAX_LIOUVILLIAN_DIM,
        });
    }
    let id = CMatrix::identity(d, d);
    let h = model.hamiltonian.data();
    let mut matrix = (id.kronecker(h) - h.transpose().kronecker(&id)) * Complex64::new(0.0, -1.0);
    for jump in &model.jumps {
        if jump.rate == 0.0 {
            continue;
        }
        let l = jump.operator.data();
        let ldl = l.adjoint() * l;
        let dissipator = l.conjugate().kronecker(l)
            - (id.kronecker(&ldl) + ldl.transpose().kronecker(&id)) * Complex64::new(0.5, 0.0);
        matrix += dissipator * Complex64::new(jump.rate, 0.0);
    }
    Ok(Liouvillian {
        basis: model.basis().clone(),
        matrix,
    })
}

/// Compressed-row copy of the superoperator; the Liouvillian has O(d²) nonzeros.
struct SparseRows {
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl SparseRows {
    fn from_dense(m: &CMatrix) -> Self {
        let mut row_start = Vec::with_capacity(m.nrows() + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..m.nrows() {
            row_start.push(cols.len());
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                if z.re != 0.0 || z.im != 0.0 {
                    cols.push(j);
                    vals.push(z);
                }
            }
        }
        row_start.push(cols.len());
        Self {
            row_start,
            cols,
            vals,
        }
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_start[i]..self.row_start[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yi = acc;
        }
    }
}

fn rk4_trajectory(op: &SparseRows, rho0: &[Complex64], dt: f64, steps_per_sample: usize, samples: usize) -> Vec<Vec<Complex64>> {
    let n = rho0.len();
    let h = dt / steps_per_sample as f64;
    let mut v = rho0.to_vec();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
        vec![Complex64::default(); n],
    );
    let mut out = Vec::with_capacity(samples);
    out.push(v.clone());
    for _ in 1..samples {
        for _ in 0..steps_per_sample {
            op.apply(&v, &mut k1);
            for i in 0..n {
                tmp[i] = v[i] + k1[i] * (0.5 * h);
            }
            op.apply(&tmp, &mut k2);
            for i in 0..n {
                tmp[i] = v[i] + k2[i] * (0.5 * h);
            }
            op.apply(&tmp, &mut k3);
            for i in 0..n {
                tmp[i] = v[i] + k3[i] * h;
            }
            op.apply(&tmp, &mut k4);
            for i in 0..n {
                v[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
            }
        }
        out.push(v.clone());
    }
    out
}

fn trace_of_vec(v: &[Complex64], d: usize) -> f64 {
    (0..d).map(|i| v[i + i * d].re).sum()
}

/// Observables recorded along an open trajectory.
struct Recorder {
    basis: Arc<FockBasis>,
    energy_op: OperatorMatrix,
    number_op: OperatorMatrix,
    negativity: Vec<f64>,
    energy: Vec<f64>,
    trace: Vec<f64>,
    purity: Vec<f64>,
    particles: Vec<f64>,
    min_eigenvalue: Vec<f64>,
    hermiticity: Vec<f64>,
    blocks: Vec<(usize, Vec<f64>, Vec<f64>)>,
}

impl Recorder {
    fn new(model: &LindbladModel) -> Result<Self> {
        let basis = model.basis().clone();
        let blocks = if basis.is_sector() {
            Vec::new()
        } else {
            basis
                .sector_slices()?
                .into_iter()
                .map(|sl| (sl.total, Vec::new(), Vec::new()))
                .collect()
        };
        Ok(Self {
            energy_op: model.hamiltonian.clone(),
            number_op: total_number_op(&basis),
            basis,
            negativity: Vec::new(),
            energy: Vec::new(),
            trace: Vec::new(),
            purity: Vec::new(),
            particles: Vec::new(),
            min_eigenvalue: Vec::new(),
            hermiticity: Vec::new(),
            blocks,
        })
    }

    fn record(&mut self, t: f64, data: CMatrix) -> Result<()> {
        let rho = DensityMatrix::from_parts_unchecked(self.basis.clone(), data)?;
        let trace = rho.trace();
        let herm = rho.hermiticity_deviation();
        let min_ev = rho.min_eigenvalue();
        if (trace - 1.0).abs() > TRAJECTORY_TRACE_TOL {
            return Err(Error::Numerical(format!("trace {trace} at t = {t}")));
        }
        if herm > TRAJECTORY_HERMITICITY_TOL {
            return Err(Error::Numerical(format!("hermiticity error {herm:.3e} at t = {t}")));
        }
        if min_ev < -TRAJECTORY_POSITIVITY_TOL {
            return Err(Error::Numerical(format!("negative eigenvalue {min_ev:.3e} at t = {t}")));
        }
        let neg = negativity_pair(&rho)?;
        if let Some(per_block) = &neg.per_block {
            let slices = self.basis.sector_slices()?;
            for ((slot, (_, value)), sl) in self.blocks.iter_mut().zip(per_block).zip(&slices) {
                slot.1.push(sl.range.clone().map(|i| rho.data()[(i, i)].re).sum());
                slot.2.push(*value);
            }
        }
        self.negativity.push(neg.value);
        self.energy.push(self.energy_op.expectation(&rho)?);
        self.particles.push(self.number_op.expectation(&rho)?);
        self.trace.push(trace);
        self.purity.push(rho.purity());
        self.min_eigenvalue.push(min_ev);
        self.hermiticity.push(herm);
        Ok(())
    }

    fn finish(self, times: Vec<f64>) -> TimeSeries {
        let avg = series::running_time_average(&times, &self.negativity);
        let mut ts = TimeSeries::new(times);
        ts.insert(series::NEGATIVITY, self.negativity);
        ts.insert(series::NEGATIVITY_AVG, avg);
        ts.insert(series::ENERGY, self.energy);
        ts.insert(series::TRACE, self.trace);
        ts.insert(series::PURITY, self.purity);
        ts.insert(series::PARTICLE_NUMBER, self.particles);
        ts.insert(series::MIN_EIGENVALUE, self.min_eigenvalue);
        ts.insert(series::HERMITICITY_ERROR, self.hermiticity);
        for (total, populations, negativities) in self.blocks {
            ts.insert(series::population_channel(total), populations);
            ts.insert(series::block_negativity_channel(total), negativities);
        }
        ts
    }
}

fn check_initial(model: &LindbladModel, rho0: &DensityMatrix) -> Result<()> {
    model.basis().ensure_same(rho0.basis())?;
    rho0.validate()
}

/// Fixed-step RK4 on the vectorized master equation. The step is halved
/// until the trace drift over the whole run is at most [`RK4_TRACE_DRIFT_TOL`].
pub fn lindblad_evolve_rk4(model: &LindbladModel, rho0: &DensityMatrix, t_max: f64, samples: usize) -> Result<TimeSeries> {
    check_initial(model, rho0)?;
    let times = series::uniform_times(t_max, samples)?;
    let dt = times[1] - times[0];
    let superop = liouvillian(model)?;
    let sparse = SparseRows::from_dense(superop.matrix());
    let d = model.basis().dim();
    let initial_trace = rho0.trace();

    let stiffness = model.stiffness()?;
    let mut steps = if stiffness > 0.0 {
        ((dt * stiffness / RK4_STEP_FACTOR).ceil() as usize).max(1)
    } else {
        1
    };
    let mut halvings = 0;
    let trajectory = loop {
        let traj = rk4_trajectory(&sparse, rho0.data().as_slice(), dt, steps, samples);
        let drift = traj
            .iter()
            .map(|v| (trace_of_vec(v, d) - initial_trace).abs())
            .fold(0.0, f64::max);
        if drift <= RK4_TRACE_DRIFT_TOL {
            break traj;
        }
        if halvings == RK4_MAX_HALVINGS {
            return Err(Error::StepControlFailed { halvings, drift });
        }
        halvings += 1;
        steps *= 2;
    };

    let mut recorder = Recorder::new(model)?;
    for (t, v) in times.iter().zip(trajectory) {
        recorder.record(*t, CMatrix::from_vec(d, d, v))?;
    }
    Ok(recorder.finish(times))
}

/// Evolution from the eigendecomposition of the Liouvillian. Falls back to a
/// scaling-and-squaring propagator over one sample interval when the
/// eigenvector matrix is too ill-conditioned.
pub fn lindblad_evolve_exact(model: &LindbladModel, rho0: &DensityMatrix, t_max: f64, samples: usize) -> Result<TimeSeries> {
    check_initial(model, rho0)?;
    let times = series::uniform_times(t_max, samples)?;
    let d = model.basis().dim();
    if d * d > MAX_EXACT_DIM {
        return Err(Error::LiouvillianTooLarge {
            dim: d * d,
            limit: MAX_EXACT_DIM,
        });
    }
    let superop = liouvillian(model)?;
    let v0 = CVector::from_column_slice(rho0.data().as_slice());

    let states: Vec<CVector> = match eigensystem(superop.matrix()).filter(|es| es.condition <= MAX_EIGENVECTOR_CONDITION) {
        Some(es) => {
            let coeffs = &es.inverse * &v0;
            times.iter().map(|&t| es.propagate(&coeffs, t)).collect()
        }
        None => {
            let dt = times[1] - times[0];
            let step = expm(&(superop.matrix() * Complex64::new(dt, 0.0)));
            let mut out = Vec::with_capacity(samples);
            let mut v = v0;
            out.push(v.clone());
            for _ in 1..samples {
                v = &step * v;
                out.push(v.clone());
            }
            out
        }
    };

    let mut recorder = Recorder::new(model)?;
    for (t, v) in times.iter().zip(states) {
        recorder.record(*t, CMatrix::from_column_slice(d, d, v.as_slice()))?;
    }
    Ok(recorder.finish(times))
}
