//! Exact numerics for bosons in a double-well potential.
//!
//! The two-site Bose-Hubbard Hamiltonian `H = -J K + U O` is built as a dense
//! matrix over an occupation-number basis. On top of it the crate provides
//! thermal and ground states, closed and open (Lindblad) time evolution, and
//! entanglement quantifiers valid for pair-basis states: the negativity and
//! lower bounds on the entanglement of formation.

pub mod basis;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod operators;
pub mod spectral;
pub mod state;

pub use basis::{full_basis, sector_basis, BasisKind, FockBasis, FockState, SectorSlice};
pub use error::{Error, Result};
pub use operators::{ModelParams, OperatorMatrix, Well};
pub use spectral::{eigh, gibbs_state, ground_state, GroundState, SpectralDecomposition};
pub use state::{CMatrix, CVector, DensityMatrix, StateVector};
