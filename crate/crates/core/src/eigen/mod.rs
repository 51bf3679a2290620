//! Instantaneous eigenstates of the driven Hamiltonians.
//!
//! Every eigenstate is stored as `exp(i theta(x)) u(x)` with an analytic
//! scalar phase `theta` and a real envelope `u`. For Dirac states the envelope
//! is a unit 2-vector at each point whose first component is real and
//! non-negative, which fixes the phase smoothly in `x` and `alpha`.

mod appendix;
mod closed_form;
mod numeric;

use std::fmt;

use num_complex::Complex64;

pub use appendix::{appendix_component_ratio, appendix_linear_eigensystem, rotated_component_ratio};
pub use closed_form::{
    dirac_eigenspinor_closed_form, schrodinger_eigenstate, ClosedFormFamily, SchrodingerFamily,
};
pub use numeric::{dirac_eigenspinor_numeric, NumericFamily};

use crate::calculus::grid_derivative;
use crate::error::{invalid, Result};
use crate::field::{gauge_shift, FieldKind, Gauge};
use crate::grid::GridSpec;
use crate::params::PhysicalParams;
use crate::spin::{Branch, Representation};
use crate::state::{ScalarWavefunction, SpinorField};

type C64 = Complex64;

/// Relative size of the spectral gap below which an eigenpair is rejected.
pub const GAP_TOLERANCE: f64 = 1e-12;

/// Scalar phase of the standard eigenstate family in a given gauge.
///
/// In the velocity gauge the homogeneous family is `exp(i kappa x)` and the
/// linear one `exp(i kappa x - i alpha x^2 / 2 hbar c)`; the length gauge adds
/// `int_0^x A / hbar c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarPhase {
    pub kind: FieldKind,
    pub gauge: Gauge,
    pub params: PhysicalParams,
}

impl ScalarPhase {
    pub fn new(kind: FieldKind, gauge: Gauge, params: PhysicalParams) -> Self {
        Self { kind, gauge, params }
    }

    fn hc(&self) -> f64 {
        self.params.hbar * self.params.light_speed
    }

    // Weight of int_0^x A / hbar c in the phase.
    fn weight(&self) -> f64 {
        let chirp = match self.kind {
            FieldKind::Homogeneous => 0.0,
            FieldKind::Linear => 1.0,
        };
        let length = match self.gauge {
            Gauge::Velocity => 0.0,
            Gauge::Length => 1.0,
        };
        length - chirp
    }

    pub fn value(&self, x: f64, alpha: f64) -> f64 {
        self.params.kappa * x + self.weight() * self.kind.antiderivative(x, alpha) / self.hc()
    }

    pub fn d_x(&self, x: f64, alpha: f64) -> f64 {
        self.params.kappa + self.weight() * self.kind.evaluate(x, alpha) / self.hc()
    }

    pub fn d_alpha(&self, x: f64) -> f64 {
        self.weight() * self.kind.antiderivative(x, 1.0) / self.hc()
    }

    /// Kinetic term `c hbar dtheta/dx + A_gauge` felt by the family. It does
    /// not depend on `x` for either field kind.
    pub fn kinetic(&self, x: f64, alpha: f64) -> f64 {
        self.hc() * self.d_x(x, alpha) + self.gauge.vector_potential(self.kind, x, alpha)
    }
}

/// Envelope data of a Dirac family at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyPoint {
    pub u: [f64; 2],
    /// `du/d(alpha)`.
    pub du: [f64; 2],
    pub theta: f64,
    pub dtheta_dalpha: f64,
}

/// A smooth family of Dirac eigenstates parameterized by the control value.
pub trait DiracFamily: Send + Sync + fmt::Debug {
    fn kind(&self) -> FieldKind;
    fn params(&self) -> &PhysicalParams;
    fn representation(&self) -> Representation;
    fn gauge(&self) -> Gauge;
    fn branch(&self) -> Branch;
    fn energy(&self, alpha: f64) -> Result<f64>;
    fn point(&self, x: f64, alpha: f64) -> Result<FamilyPoint>;

    fn phase(&self) -> ScalarPhase {
        ScalarPhase::new(self.kind(), self.gauge(), *self.params())
    }

    fn kinetic_ratio(&self, alpha: f64) -> f64 {
        self.phase().kinetic(0.0, alpha) / self.params().rest_energy()
    }

    /// Samples the family on a grid.
    fn eigenpair(&self, grid: &GridSpec, alpha: f64) -> Result<DiracEigenpair> {
        let n = grid.n_points;
        let mut phase = Vec::with_capacity(n);
        let mut env = [Vec::with_capacity(n), Vec::with_capacity(n)];
        for j in 0..n {
            let p = self.point(grid.x(j), alpha)?;
            phase.push(p.theta);
            env[0].push(p.u[0]);
            env[1].push(p.u[1]);
        }
        DiracEigenpair::assemble(
            grid,
            EigenTags {
                kind: self.kind(),
                params: *self.params(),
                alpha,
                representation: self.representation(),
                gauge: self.gauge(),
                branch: self.branch(),
            },
            self.energy(alpha)?,
            self.kinetic_ratio(alpha),
            phase,
            env,
        )
    }
}

/// Labels shared by every sample of an eigenpair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct EigenTags {
    pub kind: FieldKind,
    pub params: PhysicalParams,
    pub alpha: f64,
    pub representation: Representation,
    pub gauge: Gauge,
    pub branch: Branch,
}

/// Instantaneous Dirac eigenstate on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracEigenpair {
    pub spinor: SpinorField,
    pub energy: f64,
    pub branch: Branch,
    /// `(c hbar kappa + alpha)/m c^2` for the homogeneous field,
    /// `hbar kappa / m c` for the linear one.
    pub kinetic_ratio: f64,
    pub representation: Representation,
    pub gauge: Gauge,
    pub kind: FieldKind,
    pub params: PhysicalParams,
    pub alpha: f64,
    pub phase: Vec<f64>,
    pub envelope: [Vec<f64>; 2],
}

impl DiracEigenpair {
    pub(crate) fn assemble(
        grid: &GridSpec,
        tags: EigenTags,
        energy: f64,
        kinetic_ratio: f64,
        phase: Vec<f64>,
        envelope: [Vec<f64>; 2],
    ) -> Result<Self> {
        let scale = 1.0 / grid.length().sqrt();
        let comp = |c: usize| -> Vec<C64> {
            phase
                .iter()
                .zip(&envelope[c])
                .map(|(&th, &u)| C64::from_polar(1.0, th) * (u * scale))
                .collect()
        };
        let spinor = SpinorField::new(*grid, tags.representation, tags.gauge, comp(0), comp(1))?;
        Ok(Self {
            spinor,
            energy,
            branch: tags.branch,
            kinetic_ratio,
            representation: tags.representation,
            gauge: tags.gauge,
            kind: tags.kind,
            params: tags.params,
            alpha: tags.alpha,
            phase,
            envelope,
        })
    }

    fn tags(&self) -> EigenTags {
        EigenTags {
            kind: self.kind,
            params: self.params,
            alpha: self.alpha,
            representation: self.representation,
            gauge: self.gauge,
            branch: self.branch,
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.spinor.grid
    }

    /// `||(H - energy) psi|| / ||psi||` with `H` the Dirac operator of the
    /// family's gauge. The derivative acts on the envelope only; the phase
    /// gradient enters analytically.
    pub fn residual(&self) -> Result<f64> {
        let grid = *self.grid();
        let ph = ScalarPhase::new(self.kind, self.gauge, self.params);
        let mass = self.params.rest_energy();
        let hc = self.params.hbar * self.params.light_speed;
        let scale = 1.0 / grid.length().sqrt();
        let v: [Vec<C64>; 2] = [0, 1].map(|c| {
            self.envelope[c]
                .iter()
                .map(|&u| C64::new(u * scale, 0.0))
                .collect()
        });
        let dv = [grid_derivative(&v[0], &grid)?, grid_derivative(&v[1], &grid)?];
        let kin = self.representation.kinetic_axis().hermitian(1.0);
        let minus_i_hc = C64::new(0.0, -hc);
        let mut acc = 0.0;
        for j in 0..grid.n_points {
            let k = ph.kinetic(grid.x(j), self.alpha);
            let h = self.representation.local_matrix(k, mass, &Default::default());
            let w = h.apply([v[0][j], v[1][j]]);
            let d = kin.apply([dv[0][j], dv[1][j]]);
            for c in 0..2 {
                acc += (w[c] + minus_i_hc * d[c] - v[c][j] * self.energy).norm_sqr();
            }
        }
        Ok((acc * grid.dx()).sqrt() / self.spinor.norm())
    }

    /// The same eigenstate written in another gauge.
    pub fn to_gauge(&self, target: Gauge) -> Result<Self> {
        if target == self.gauge {
            return Ok(self.clone());
        }
        let grid = *self.grid();
        let phase: Vec<f64> = self
            .phase
            .iter()
            .enumerate()
            .map(|(j, th)| {
                th + gauge_shift(self.kind, self.gauge, target, grid.x(j), self.alpha, &self.params)
            })
            .collect();
        let tags = EigenTags {
            gauge: target,
            ..self.tags()
        };
        Self::assemble(
            &grid,
            tags,
            self.energy,
            self.kinetic_ratio,
            phase,
            self.envelope.clone(),
        )
    }
}

/// Instantaneous Schrödinger eigenstate `beta exp(i gamma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchrodingerEigenpair {
    pub state: ScalarWavefunction,
    pub energy: f64,
    /// Normalized amplitude; constant for both field kinds.
    pub amplitude: Vec<f64>,
    pub phase: Vec<f64>,
    pub kind: FieldKind,
    pub params: PhysicalParams,
    pub alpha: f64,
}

impl SchrodingerEigenpair {
    /// `||(H - energy) psi|| / ||psi||` for `H = (p + A/c)^2 / 2m` in the
    /// state's gauge, with the phase gradient applied analytically.
    pub fn residual(&self) -> Result<f64> {
        let grid = self.state.grid;
        let ph = ScalarPhase::new(self.kind, self.state.gauge, self.params);
        let p = &self.params;
        if p.mass <= 0.0 {
            return Err(invalid("Schrödinger dynamics needs m > 0"));
        }
        let k: Vec<f64> = (0..grid.n_points)
            .map(|j| ph.kinetic(grid.x(j), self.alpha) / p.light_speed)
            .collect();
        // (K - i hbar d/dx) applied twice to the envelope.
        let apply = |v: &[C64]| -> Result<Vec<C64>> {
            let d = grid_derivative(v, &grid)?;
            Ok(v.iter()
                .zip(&d)
                .zip(&k)
                .map(|((a, b), kk)| a * kk + C64::new(0.0, -p.hbar) * b)
                .collect())
        };
        let env: Vec<C64> = self.amplitude.iter().map(|&b| C64::new(b, 0.0)).collect();
        let h = apply(&apply(&env)?)?;
        let acc: f64 = h
            .iter()
            .zip(&env)
            .map(|(hv, v)| (hv / (2.0 * p.mass) - v * self.energy).norm_sqr())
            .sum();
        Ok((acc * grid.dx()).sqrt() / self.state.norm())
    }
}
