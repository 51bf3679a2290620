//! Time integration of the driven Dirac and Schrödinger equations.
//!
//! All dynamics run in the velocity gauge: the field enters only through
//! the kinetic term `c p + A`, and auxiliary potentials are added as given.

mod banded;
mod convergence;
mod crank_nicolson;
mod mode;
mod spectral;

use std::sync::Arc;

use num_complex::Complex64 as C64;

pub use banded::{BandLu, BandMatrix};
pub use convergence::{convergence_order, ConvergenceReport};
pub use mode::{mode_ode_oracle, ModeOracle, ORACLE_TOLERANCE};

use crate::error::{invalid, Error, Result};
use crate::field::{FieldKind, Gauge};
use crate::grid::GridSpec;
use crate::params::PhysicalParams;
use crate::potential::{DiracAuxiliary, ScalarAuxiliary};
use crate::protocol::DriveProtocol;
use crate::spin::Representation;
use crate::state::{ScalarWavefunction, SpinorField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    Dirac,
    Schrodinger,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    /// Strang splitting with FFT kinetic steps. Periodic grids only.
    #[serde(alias = "spectral")]
    SpectralSplitStep,
    /// Cayley step with finite differences and reflecting walls. Bounded
    /// grids only.
    #[serde(alias = "cn")]
    CrankNicolson,
    /// Independent two-level integration of every occupied Fourier mode.
    /// Homogeneous field, Dirac only.
    ModeOde,
}

/// Potential added to the lab Hamiltonian.
#[derive(Debug, Clone, Default)]
pub enum Auxiliary {
    #[default]
    None,
    Dirac(Arc<dyn DiracAuxiliary>),
    Scalar(Arc<dyn ScalarAuxiliary>),
}

/// Wavefunction of either equation.
#[derive(Debug, Clone, PartialEq)]
pub enum WaveState {
    Dirac(SpinorField),
    Schrodinger(ScalarWavefunction),
}

impl WaveState {
    pub fn grid(&self) -> &GridSpec {
        match self {
            WaveState::Dirac(s) => &s.grid,
            WaveState::Schrodinger(s) => &s.grid,
        }
    }

    pub fn gauge(&self) -> Gauge {
        match self {
            WaveState::Dirac(s) => s.gauge,
            WaveState::Schrodinger(s) => s.gauge,
        }
    }

    pub fn equation(&self) -> Equation {
        match self {
            WaveState::Dirac(_) => Equation::Dirac,
            WaveState::Schrodinger(_) => Equation::Schrodinger,
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            WaveState::Dirac(s) => s.norm(),
            WaveState::Schrodinger(s) => s.norm(),
        }
    }

    pub fn as_dirac(&self) -> Option<&SpinorField> {
        match self {
            WaveState::Dirac(s) => Some(s),
            WaveState::Schrodinger(_) => None,
        }
    }

    pub fn as_schrodinger(&self) -> Option<&ScalarWavefunction> {
        match self {
            WaveState::Schrodinger(s) => Some(s),
            WaveState::Dirac(_) => None,
        }
    }

    fn components(&self) -> Vec<Vec<C64>> {
        match self {
            WaveState::Dirac(s) => s.components.to_vec(),
            WaveState::Schrodinger(s) => vec![s.values.clone()],
        }
    }

    fn with_components(&self, mut comps: Vec<Vec<C64>>) -> Self {
        match self {
            WaveState::Dirac(s) => {
                let second = comps.pop().expect("two components");
                let first = comps.pop().expect("two components");
                WaveState::Dirac(SpinorField {
                    components: [first, second],
                    ..s.clone()
                })
            }
            WaveState::Schrodinger(s) => WaveState::Schrodinger(ScalarWavefunction {
                values: comps.pop().expect("one component"),
                ..s.clone()
            }),
        }
    }
}

impl From<SpinorField> for WaveState {
    fn from(s: SpinorField) -> Self {
        WaveState::Dirac(s)
    }
}

impl From<ScalarWavefunction> for WaveState {
    fn from(s: ScalarWavefunction) -> Self {
        WaveState::Schrodinger(s)
    }
}

/// Everything needed to advance a state from `t = 0` to `t = tau`.
#[derive(Debug, Clone)]
pub struct EvolutionSpec {
    pub equation: Equation,
    pub kind: FieldKind,
    pub params: PhysicalParams,
    pub protocol: DriveProtocol,
    pub auxiliary: Auxiliary,
    pub backend: Backend,
    pub dt: f64,
    pub representation: Representation,
    /// Finite-difference order of the Crank-Nicolson backend (2, 4 or 6).
    pub fd_order: usize,
    /// Store every `k`-th state in the trajectory; `None` keeps only the
    /// initial and final states.
    pub record_every: Option<usize>,
}

/// Slack allowed in `tau / dt` before it stops counting as an integer.
pub const STEP_COUNT_TOLERANCE: f64 = 1e-9;

impl EvolutionSpec {
    pub fn new(
        equation: Equation,
        kind: FieldKind,
        params: PhysicalParams,
        protocol: DriveProtocol,
        backend: Backend,
        dt: f64,
    ) -> Self {
        Self {
            equation,
            kind,
            params,
            protocol,
            auxiliary: Auxiliary::None,
            backend,
            dt,
            representation: Representation::KineticZ,
            fd_order: 6,
            record_every: None,
        }
    }

    pub fn with_auxiliary(mut self, auxiliary: Auxiliary) -> Self {
        self.auxiliary = auxiliary;
        self
    }

    pub fn with_representation(mut self, representation: Representation) -> Self {
        self.representation = representation;
        self
    }

    pub fn with_fd_order(mut self, order: usize) -> Self {
        self.fd_order = order;
        self
    }

    pub fn with_record_every(mut self, every: usize) -> Self {
        self.record_every = Some(every);
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    /// Number of steps, checked to be an integer.
    pub fn steps(&self) -> Result<usize> {
        step_count(self.protocol.duration(), self.dt)
    }

    /// Checks the spec against a grid and an equation.
    pub fn validate(&self, grid: &GridSpec) -> Result<()> {
        self.steps()?;
        self.params.validate()?;
        match self.backend {
            Backend::SpectralSplitStep => {
                if !grid.is_periodic() {
                    return Err(invalid("the spectral backend needs a periodic grid"));
                }
                grid.require_power_of_two()?;
                if self.equation == Equation::Schrodinger && self.kind != FieldKind::Homogeneous {
                    return Err(Error::Unsupported(
                        "spectral Schrödinger steps support only the homogeneous field".into(),
                    ));
                }
            }
            Backend::CrankNicolson => {
                if grid.is_periodic() {
                    return Err(invalid("the Crank-Nicolson backend needs a bounded grid"));
                }
                if ![2, 4, 6].contains(&self.fd_order) {
                    return Err(invalid(format!("finite-difference order {} not in {{2, 4, 6}}", self.fd_order)));
                }
            }
            Backend::ModeOde => {
                if self.kind != FieldKind::Homogeneous {
                    return Err(invalid("the mode integrator needs the homogeneous field"));
                }
                if self.equation != Equation::Dirac {
                    return Err(Error::Unsupported("the mode integrator is Dirac only".into()));
                }
                if !grid.is_periodic() {
                    return Err(invalid("the mode integrator needs a periodic grid"));
                }
                if let Auxiliary::Dirac(a) = &self.auxiliary {
                    if !a.is_uniform() {
                        return Err(invalid("the mode integrator needs a uniform auxiliary potential"));
                    }
                }
            }
        }
        match (&self.auxiliary, self.equation) {
            (Auxiliary::Scalar(_), Equation::Dirac) => Err(invalid("scalar auxiliary on a Dirac run")),
            (Auxiliary::Dirac(_), Equation::Schrodinger) => Err(invalid("matrix auxiliary on a Schrödinger run")),
            _ => Ok(()),
        }
    }
}

/// `tau / dt` as an integer, or an error suggesting the nearest valid `dt`.
pub fn step_count(tau: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(invalid(format!("dt must be positive, got {dt}")));
    }
    let ratio = tau / dt;
    let n = ratio.round().max(1.0);
    if (ratio - n).abs() > STEP_COUNT_TOLERANCE * n {
        return Err(invalid(format!(
            "dt = {dt} does not divide tau = {tau}; nearest valid dt is {}",
            tau / n
        )));
    }
    Ok(n as usize)
}

/// Sampled states and the norm after every step.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<WaveState>,
    /// Norm at `t = 0` followed by the norm after each step.
    pub norms: Vec<f64>,
    pub steps: usize,
}

impl Trajectory {
    pub fn final_state(&self) -> &WaveState {
        self.states.last().expect("trajectory holds at least the initial state")
    }

    /// `max_t | ||psi(t)|| - 1 |`.
    pub fn max_norm_drift(&self) -> f64 {
        self.norms.iter().fold(0.0, |m, n| m.max((n - 1.0).abs()))
    }
}

/// One-step update of raw components.
pub(crate) trait Stepper {
    fn step(&mut self, comps: &mut [Vec<C64>], t: f64, dt: f64) -> Result<()>;
}

fn components_norm(comps: &[Vec<C64>], dx: f64) -> f64 {
    (comps.iter().flatten().map(|z| z.norm_sqr()).sum::<f64>() * dx).sqrt()
}

/// Advances `initial` from `t = 0` to `t = tau`.
pub fn propagate(initial: &WaveState, spec: &EvolutionSpec) -> Result<Trajectory> {
    let grid = *initial.grid();
    spec.validate(&grid)?;
    if initial.equation() != spec.equation {
        return Err(invalid("initial state does not match the equation"));
    }
    if initial.gauge() != Gauge::Velocity {
        return Err(Error::GaugeMismatch {
            expected: Gauge::Velocity,
            found: initial.gauge(),
        });
    }
    if let WaveState::Dirac(s) = initial {
        if s.representation != spec.representation {
            return Err(Error::RepresentationMismatch {
                expected: spec.representation,
                found: s.representation,
            });
        }
    }
    let n0 = initial.norm();
    if (n0 - 1.0).abs() > 1e-10 {
        return Err(invalid(format!("initial state is not normalized (norm {n0})")));
    }
    let steps = spec.steps()?;
    let tau = spec.protocol.duration();

    if spec.backend == Backend::ModeOde {
        let comps = mode::evolve_modes(initial.components(), &grid, spec)?;
        let fin = initial.with_components(comps);
        let norms = vec![n0, fin.norm()];
        return Ok(Trajectory {
            times: vec![0.0, tau],
            states: vec![initial.clone(), fin],
            norms,
            steps,
        });
    }

    let dt = tau / steps as f64;
    let mut comps = initial.components();
    let mut stepper: Box<dyn Stepper> = match spec.backend {
        Backend::SpectralSplitStep => spectral::build(&grid, spec, dt)?,
        Backend::CrankNicolson => crank_nicolson::build(&grid, spec, &comps)?,
        Backend::ModeOde => unreachable!(),
    };
    let dx = grid.dx();
    let mut times = vec![0.0];
    let mut states = vec![initial.clone()];
    let mut norms = Vec::with_capacity(steps + 1);
    norms.push(n0);
    for k in 0..steps {
        let t = k as f64 * dt;
        stepper.step(&mut comps, t, dt)?;
        norms.push(components_norm(&comps, dx));
        let done = k + 1;
        if done < steps && spec.record_every.is_some_and(|e| e > 0 && done % e == 0) {
            times.push(done as f64 * dt);
            states.push(initial.with_components(comps.clone()));
        }
    }
    times.push(tau);
    states.push(initial.with_components(comps));
    Ok(Trajectory {
        times,
        states,
        norms,
        steps,
    })
}

#[cfg(test)]
mod tests;
