//! Fast-forward control of driven (1+1)-dimensional Dirac and Schrödinger
//! dynamics.
//!
//! The crate synthesizes auxiliary potentials that carry an instantaneous
//! eigenstate of a driven Hamiltonian to the eigenstate of the final
//! Hamiltonian in finite time, and checks the result by direct propagation.

pub mod calculus;
pub mod eigen;
pub mod fastforward;
pub mod propagator;
pub mod diagnostics;
pub mod config;
pub mod runner;
pub mod error;
pub mod field;
pub mod grid;
pub mod params;
pub mod potential;
pub mod protocol;
pub mod spin;
pub mod state;

pub use error::{Error, Result};
pub use field::{FieldKind, Gauge};
pub use grid::{wavenumber_lattice, Boundary, GridSpec, Window};
pub use params::PhysicalParams;
pub use potential::{DiracAuxiliary, PotentialMatrix, PotentialSlice, ScalarAuxiliary};
pub use protocol::DriveProtocol;
pub use spin::{Branch, Representation};
pub use state::{ScalarWavefunction, SpinorField};
