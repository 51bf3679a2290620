use num_complex::Complex64;

use super::{
    DiracEigenpair, DiracFamily, FamilyPoint, NumericFamily, ScalarPhase, SchrodingerEigenpair,
    GAP_TOLERANCE,
};
use crate::error::{invalid, Error, Result};
use crate::field::{FieldKind, Gauge};
use crate::grid::GridSpec;
use crate::params::PhysicalParams;
use crate::spin::{Branch, Representation};
use crate::state::ScalarWavefunction;

/// `s = sqrt(r^2 + 1) - r`, evaluated without cancellation.
pub(crate) fn lower_component(r: f64) -> f64 {
    let q = (r * r + 1.0).sqrt();
    if r >= 0.0 {
        1.0 / (q + r)
    } else {
        q - r
    }
}

/// Printed eigenstate family: envelope `(1, s)/sqrt(1 + s^2)` for the
/// positive branch and `(s, -1)/sqrt(1 + s^2)` for the negative one, with
/// `s = sqrt(r^2 + 1) - r` and `r` the kinetic ratio. Valid in the
/// kinetic-z representation and in each field's natural gauge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormFamily {
    kind: FieldKind,
    params: PhysicalParams,
    branch: Branch,
    gauge: Gauge,
}

impl ClosedFormFamily {
    pub fn new(kind: FieldKind, params: PhysicalParams, branch: Branch) -> Result<Self> {
        params.validate()?;
        if params.mass <= 0.0 {
            return Err(invalid(
                "the closed-form eigenspinor needs m > 0; use the numeric family for massless runs",
            ));
        }
        Ok(Self {
            kind,
            params,
            branch,
            gauge: kind.natural_gauge(),
        })
    }

    /// The same family in another gauge (only the scalar phase changes).
    pub fn in_gauge(self, gauge: Gauge) -> Self {
        Self { gauge, ..self }
    }

    fn ratio(&self, alpha: f64) -> f64 {
        self.phase().kinetic(0.0, alpha) / self.params.rest_energy()
    }
}

impl DiracFamily for ClosedFormFamily {
    fn kind(&self) -> FieldKind {
        self.kind
    }

    fn params(&self) -> &PhysicalParams {
        &self.params
    }

    fn representation(&self) -> Representation {
        Representation::KineticZ
    }

    fn gauge(&self) -> Gauge {
        self.gauge
    }

    fn branch(&self) -> Branch {
        self.branch
    }

    fn energy(&self, alpha: f64) -> Result<f64> {
        let r = self.ratio(alpha);
        Ok(self.branch.sign() * self.params.rest_energy() * (r * r + 1.0).sqrt())
    }

    fn point(&self, x: f64, alpha: f64) -> Result<FamilyPoint> {
        let r = self.ratio(alpha);
        let s = lower_component(r);
        let n2 = 1.0 + s * s;
        let n = n2.sqrt();
        let n3 = n2 * n;
        let ds_dr = -s / (r * r + 1.0).sqrt();
        let dr_da = self.kind.kinetic_slope() / self.params.rest_energy();
        let chain = ds_dr * dr_da;
        let (u, du_ds) = match self.branch {
            Branch::Positive => ([1.0 / n, s / n], [-s / n3, 1.0 / n3]),
            Branch::Negative => ([s / n, -1.0 / n], [1.0 / n3, s / n3]),
        };
        let ph = self.phase();
        Ok(FamilyPoint {
            u,
            du: [du_ds[0] * chain, du_ds[1] * chain],
            theta: ph.value(x, alpha),
            dtheta_dalpha: ph.d_alpha(x),
        })
    }
}

/// Printed eigenspinor on a grid, in the kinetic-z representation and the
/// field's natural gauge. Massless inputs fall back to diagonalization.
pub fn dirac_eigenspinor_closed_form(
    kind: FieldKind,
    params: PhysicalParams,
    alpha: f64,
    grid: &GridSpec,
    branch: Branch,
) -> Result<DiracEigenpair> {
    params.validate()?;
    grid.check_lattice_wavenumber(params.kappa)?;
    if params.mass == 0.0 {
        let ph = ScalarPhase::new(kind, kind.natural_gauge(), params);
        let gap = 2.0 * ph.kinetic(0.0, alpha).abs();
        if gap <= GAP_TOLERANCE * params.rest_energy() {
            return Err(Error::DegenerateEigenpair {
                gap,
                threshold: GAP_TOLERANCE * params.rest_energy(),
            });
        }
        return NumericFamily::new(kind, params, branch, Representation::KineticZ)?.eigenpair(grid, alpha);
    }
    ClosedFormFamily::new(kind, params, branch)?.eigenpair(grid, alpha)
}

/// Schrödinger eigenstate family with unit amplitude: shifted plane waves
/// for the homogeneous field (length gauge), chirped waves for the linear
/// field (velocity gauge).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchrodingerFamily {
    pub kind: FieldKind,
    pub params: PhysicalParams,
    pub gauge: Gauge,
}

impl SchrodingerFamily {
    pub fn new(kind: FieldKind, params: PhysicalParams) -> Result<Self> {
        params.validate()?;
        if params.mass <= 0.0 {
            return Err(invalid("Schrödinger dynamics needs m > 0"));
        }
        Ok(Self {
            kind,
            params,
            gauge: kind.natural_gauge(),
        })
    }

    pub fn in_gauge(self, gauge: Gauge) -> Self {
        Self { gauge, ..self }
    }

    pub fn phase(&self) -> ScalarPhase {
        ScalarPhase::new(self.kind, self.gauge, self.params)
    }

    /// Kinetic momentum `hbar dgamma/dx + A/c`, independent of `x`.
    pub fn momentum(&self, alpha: f64) -> f64 {
        self.phase().kinetic(0.0, alpha) / self.params.light_speed
    }

    pub fn energy(&self, alpha: f64) -> f64 {
        let k = self.momentum(alpha);
        k * k / (2.0 * self.params.mass)
    }

    pub fn eigenpair(&self, grid: &GridSpec, alpha: f64) -> Result<SchrodingerEigenpair> {
        let beta = 1.0 / grid.length().sqrt();
        let ph = self.phase();
        let phase: Vec<f64> = grid.points().iter().map(|&x| ph.value(x, alpha)).collect();
        let values = phase.iter().map(|&g| Complex64::from_polar(beta, g)).collect();
        Ok(SchrodingerEigenpair {
            state: ScalarWavefunction::new(*grid, self.gauge, values)?,
            energy: self.energy(alpha),
            amplitude: vec![beta; grid.n_points],
            phase,
            kind: self.kind,
            params: self.params,
            alpha,
        })
    }
}

/// Instantaneous Schrödinger eigenstate in the field's natural gauge.
pub fn schrodinger_eigenstate(
    kind: FieldKind,
    params: PhysicalParams,
    alpha: f64,
    grid: &GridSpec,
) -> Result<SchrodingerEigenpair> {
    grid.check_lattice_wavenumber(params.kappa)?;
    SchrodingerFamily::new(kind, params)?.eigenpair(grid, alpha)
}
