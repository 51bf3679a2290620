use std::sync::Arc;

use num_complex::Complex64 as C64;
use ode_solvers::{Dopri5, OutputType, System, Vector4};
use rustfft::FftPlanner;

use super::{Auxiliary, EvolutionSpec};
use crate::error::{invalid, Error, Result};
use crate::grid::{wavenumber_lattice, GridSpec};
use crate::params::PhysicalParams;
use crate::potential::{DiracAuxiliary, PotentialMatrix};
use crate::protocol::DriveProtocol;
use crate::spin::Representation;

/// Relative and absolute tolerance of the adaptive integrator.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

/// Modes whose weight is below this fraction of the largest one are left
/// untouched by the mode backend.
const OCCUPATION_CUTOFF: f64 = 1e-30;

/// Two-level dynamics of one momentum mode of the homogeneous field,
/// `i hbar a' = [(c hbar kappa + alpha) s_kin + m c^2 s_mass + V(t)] a`.
#[derive(Debug, Clone)]
pub struct ModeOracle {
    pub params: PhysicalParams,
    pub protocol: DriveProtocol,
    pub representation: Representation,
    pub auxiliary: Option<Arc<dyn DiracAuxiliary>>,
}

struct ModeSystem<'a> {
    oracle: &'a ModeOracle,
    kappa: f64,
}

impl ModeOracle {
    pub fn new(
        params: PhysicalParams,
        protocol: DriveProtocol,
        representation: Representation,
        auxiliary: Option<Arc<dyn DiracAuxiliary>>,
    ) -> Result<Self> {
        if let Some(a) = &auxiliary {
            if !a.is_uniform() {
                return Err(invalid("the mode oracle needs a uniform auxiliary potential"));
            }
        }
        Ok(Self {
            params,
            protocol,
            representation,
            auxiliary,
        })
    }

    fn potential(&self, t: f64) -> PotentialMatrix {
        match &self.auxiliary {
            None => PotentialMatrix::default(),
            Some(a) => {
                let v = a
                    .at(0.0, t)
                    .unwrap_or(PotentialMatrix::new(f64::NAN, f64::NAN, f64::NAN, f64::NAN));
                if a.representation() != self.representation {
                    v.rotated()
                } else {
                    v
                }
            }
        }
    }

    /// Amplitudes at `t = tau` starting from `initial` at `t = 0`.
    pub fn evolve(&self, kappa: f64, initial: [C64; 2]) -> Result<[C64; 2]> {
        let y0 = Vector4::new(initial[0].re, initial[0].im, initial[1].re, initial[1].im);
        let tau = self.protocol.duration();
        let sys = ModeSystem { oracle: self, kappa };
        let mut solver = Dopri5::new(sys, 0.0, tau, tau, y0, ORACLE_TOLERANCE, ORACLE_TOLERANCE);
        solver.set_output(OutputType::Sparse);
        solver
            .integrate()
            .map_err(|e| Error::InvalidArgument(format!("mode integration failed: {e}")))?;
        let y = solver
            .y_out()
            .last()
            .copied()
            .ok_or_else(|| invalid("mode integration produced no output"))?;
        if !y.iter().all(|v| v.is_finite()) {
            return Err(invalid("auxiliary potential could not be evaluated"));
        }
        Ok([C64::new(y[0], y[1]), C64::new(y[2], y[3])])
    }
}

impl System<f64, Vector4<f64>> for ModeSystem<'_> {
    fn system(&self, t: f64, y: &Vector4<f64>, dy: &mut Vector4<f64>) {
        let o = self.oracle;
        let p = &o.params;
        let kinetic = p.light_speed * p.hbar * self.kappa + o.protocol.alpha(t);
        let h = o
            .representation
            .local_matrix(kinetic, p.rest_energy(), &o.potential(t));
        let a = [C64::new(y[0], y[1]), C64::new(y[2], y[3])];
        let ha = h.apply(a);
        // a' = -i H a / hbar
        let d = [ha[0] * C64::new(0.0, -1.0 / p.hbar), ha[1] * C64::new(0.0, -1.0 / p.hbar)];
        *dy = Vector4::new(d[0].re, d[0].im, d[1].re, d[1].im);
    }
}

/// Final two-level amplitude of mode `kappa` (velocity gauge).
pub fn mode_ode_oracle(
    params: &PhysicalParams,
    protocol: &DriveProtocol,
    kappa: f64,
    representation: Representation,
    auxiliary: Option<Arc<dyn DiracAuxiliary>>,
    initial: [C64; 2],
) -> Result<[C64; 2]> {
    ModeOracle::new(*params, protocol.clone(), representation, auxiliary)?.evolve(kappa, initial)
}

/// Integrates every occupied Fourier mode of a homogeneous-field spinor.
pub(super) fn evolve_modes(mut comps: Vec<Vec<C64>>, grid: &GridSpec, spec: &EvolutionSpec) -> Result<Vec<Vec<C64>>> {
    let n = grid.n_points;
    let k = wavenumber_lattice(grid)?;
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    for c in comps.iter_mut() {
        fwd.process(c);
    }
    let aux = match &spec.auxiliary {
        Auxiliary::Dirac(a) => Some(a.clone()),
        _ => None,
    };
    let oracle = ModeOracle::new(spec.params, spec.protocol.clone(), spec.representation, aux)?;
    let weight = |j: usize| comps[0][j].norm_sqr() + comps[1][j].norm_sqr();
    let peak = (0..n).map(weight).fold(0.0, f64::max);
    let occupied: Vec<usize> = (0..n).filter(|&j| weight(j) > OCCUPATION_CUTOFF * peak).collect();
    for j in occupied {
        let [a, b] = oracle.evolve(k[j], [comps[0][j], comps[1][j]])?;
        comps[0][j] = a;
        comps[1][j] = b;
    }
    let scale = 1.0 / n as f64;
    for c in comps.iter_mut() {
        inv.process(c);
        c.iter_mut().for_each(|z| *z *= scale);
    }
    Ok(comps)
}
