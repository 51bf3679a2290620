//! Fast-forward potentials expressed as controls added to the lab
//! Hamiltonian.
//!
//! A synthesized potential `V_rel` is relative to the instantaneous
//! Hamiltonian of the family's gauge. The lab Hamiltonian of that gauge
//! already contains the gauge drive `D` (zero in the velocity gauge,
//! `-(1/c) int_0^x dA/dt` in the length gauge), so the control to add is
//! `V_rel - D`. Multiplicative potentials are gauge invariant, so the same
//! control applies in any lab gauge.

use std::fmt;
use std::sync::Arc;

use super::{
    closed_form_potential_matrix, dirac_ff_potentials, schrodinger_ff_potential, DiracSnapshot,
    PhaseField, SchrodingerSnapshot,
};
use crate::eigen::{DiracFamily, SchrodingerFamily};
use crate::error::Result;
use crate::field::{FieldKind, Gauge};
use crate::grid::GridSpec;
use crate::params::PhysicalParams;
use crate::potential::{DiracAuxiliary, PotentialMatrix, PotentialSlice, ScalarAuxiliary};
use crate::protocol::DriveProtocol;
use crate::spin::Representation;

#[derive(Clone)]
enum Source {
    ClosedForm,
    Family(Arc<dyn DiracFamily>),
}

/// Fast-forward control for Dirac dynamics with `f = 0`.
#[derive(Clone)]
pub struct DiracControl {
    source: Source,
    kind: FieldKind,
    params: PhysicalParams,
    family_gauge: Gauge,
    family_representation: Representation,
    protocol: DriveProtocol,
    lab_representation: Representation,
}

impl fmt::Debug for DiracControl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let source = match &self.source {
            Source::ClosedForm => "closed_form".to_string(),
            Source::Family(fam) => format!("{fam:?}"),
        };
        f.debug_struct("DiracControl")
            .field("source", &source)
            .field("kind", &self.kind)
            .field("lab_representation", &self.lab_representation)
            .finish()
    }
}

impl DiracControl {
    /// Uses the printed closed forms (kinetic-z, natural gauge).
    pub fn closed_form(
        kind: FieldKind,
        params: PhysicalParams,
        protocol: DriveProtocol,
        lab_representation: Representation,
    ) -> Self {
        Self {
            source: Source::ClosedForm,
            kind,
            params,
            family_gauge: kind.natural_gauge(),
            family_representation: Representation::KineticZ,
            protocol,
            lab_representation,
        }
    }

    /// Runs the general solver on a family at every requested time.
    pub fn from_family(
        family: Arc<dyn DiracFamily>,
        protocol: DriveProtocol,
        lab_representation: Representation,
    ) -> Self {
        Self {
            kind: family.kind(),
            params: *family.params(),
            family_gauge: family.gauge(),
            family_representation: family.representation(),
            source: Source::Family(family),
            protocol,
            lab_representation,
        }
    }

    pub fn protocol(&self) -> &DriveProtocol {
        &self.protocol
    }

    /// Potential relative to the family's instantaneous Hamiltonian, in the
    /// family's representation and gauge.
    pub fn relative(&self, grid: &GridSpec, t: f64) -> Result<PotentialSlice> {
        match &self.source {
            Source::ClosedForm => Ok(PotentialSlice {
                t,
                representation: Representation::KineticZ,
                values: (0..grid.n_points)
                    .map(|j| closed_form_potential_matrix(self.kind, &self.params, &self.protocol, t, grid.x(j)))
                    .collect(),
            }),
            Source::Family(family) => {
                let snap = DiracSnapshot::from_family(family.as_ref(), grid, &self.protocol, t)?;
                Ok(dirac_ff_potentials(&snap, &PhaseField::zero(grid, t), &self.params)?.potential)
            }
        }
    }

    /// Control added to the lab Hamiltonian, in the lab representation.
    pub fn control(&self, grid: &GridSpec, t: f64) -> Result<PotentialSlice> {
        let rel = self.relative(grid, t)?;
        let alpha_dot = self.protocol.alpha_dot(t);
        let mut out = rel.in_representation(self.lab_representation);
        for (j, v) in out.values.iter_mut().enumerate() {
            v.v_t -= self.family_gauge.drive(self.kind, grid.x(j), alpha_dot, &self.params);
        }
        Ok(out)
    }

    /// Relative potential and control on a `times x grid` lattice.
    pub fn lattice(&self, grid: &GridSpec, times: &[f64]) -> Result<Vec<LatticeRow>> {
        let mut rows = Vec::with_capacity(times.len() * grid.n_points);
        for &t in times {
            let rel = self.relative(grid, t)?;
            let ctl = self.control(grid, t)?;
            for j in 0..grid.n_points {
                rows.push(LatticeRow {
                    t,
                    x: grid.x(j),
                    relative: rel.values[j],
                    control: ctl.values[j],
                });
            }
        }
        Ok(rows)
    }

    pub fn family_representation(&self) -> Representation {
        self.family_representation
    }
}

impl DiracAuxiliary for DiracControl {
    fn representation(&self) -> Representation {
        self.lab_representation
    }

    fn sample(&self, grid: &GridSpec, t: f64) -> Result<Vec<PotentialMatrix>> {
        Ok(self.control(grid, t)?.values)
    }

    fn is_uniform(&self) -> bool {
        // The homogeneous drive term cancels against the gauge drive, leaving
        // a pure sy control.
        self.kind == FieldKind::Homogeneous
    }
}

/// One sample of the synthesized potentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatticeRow {
    pub t: f64,
    pub x: f64,
    pub relative: PotentialMatrix,
    pub control: PotentialMatrix,
}

/// Fast-forward control for Schrödinger dynamics with `f = 0`.
#[derive(Debug, Clone)]
pub struct SchrodingerControl {
    family: SchrodingerFamily,
    protocol: DriveProtocol,
}

impl SchrodingerControl {
    pub fn new(family: SchrodingerFamily, protocol: DriveProtocol) -> Self {
        Self { family, protocol }
    }

    pub fn relative(&self, grid: &GridSpec, t: f64) -> Result<Vec<f64>> {
        let snap = SchrodingerSnapshot::from_family(&self.family, grid, &self.protocol, t)?;
        schrodinger_ff_potential(&snap, &PhaseField::zero(grid, t), &self.family.params)
    }

    pub fn control(&self, grid: &GridSpec, t: f64) -> Result<Vec<f64>> {
        let alpha_dot = self.protocol.alpha_dot(t);
        let mut v = self.relative(grid, t)?;
        for (j, vj) in v.iter_mut().enumerate() {
            *vj -= self
                .family
                .gauge
                .drive(self.family.kind, grid.x(j), alpha_dot, &self.family.params);
        }
        Ok(v)
    }
}

impl ScalarAuxiliary for SchrodingerControl {
    fn sample(&self, grid: &GridSpec, t: f64) -> Result<Vec<f64>> {
        self.control(grid, t)
    }
}
