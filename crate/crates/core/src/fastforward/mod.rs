//! Fast-forward phases and auxiliary potentials.

mod closed_form;
mod control;
mod dirac;
mod phase;
mod schrodinger;

pub use closed_form::{closed_form_potential_matrix, closed_form_schrodinger_potential, homogeneous_pseudoscalar};
pub use control::{DiracControl, LatticeRow, SchrodingerControl};
pub use dirac::{dirac_ff_potentials, DiracSnapshot, DiracSynthesis, DETERMINANT_TOLERANCE};
pub use phase::{phase_ode_residual, solve_phase_ode, PhaseField, NODE_TOLERANCE};
pub use schrodinger::{schrodinger_ff_potential, SchrodingerSnapshot};
