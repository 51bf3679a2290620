use std::sync::Arc;

use num_complex::Complex64 as C64;
use rustfft::{Fft, FftPlanner};

use super::{Auxiliary, Equation, EvolutionSpec, Stepper};
use crate::error::Result;
use crate::field::{FieldKind, Gauge};
use crate::grid::{wavenumber_lattice, GridSpec};
use crate::params::PhysicalParams;
use crate::potential::PotentialMatrix;
use crate::protocol::DriveProtocol;
use crate::spin::{Mat2, Representation};

struct Fourier {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    scratch: Vec<C64>,
    scale: f64,
}

impl Fourier {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        Self {
            forward,
            inverse,
            scratch: vec![C64::new(0.0, 0.0); len],
            scale: 1.0 / n as f64,
        }
    }

    fn forward(&mut self, v: &mut [C64]) {
        self.forward.process_with_scratch(v, &mut self.scratch);
    }

    fn inverse(&mut self, v: &mut [C64]) {
        self.inverse.process_with_scratch(v, &mut self.scratch);
        for z in v.iter_mut() {
            *z *= self.scale;
        }
    }
}

pub(super) fn build(grid: &GridSpec, spec: &EvolutionSpec, dt: f64) -> Result<Box<dyn Stepper>> {
    let k = wavenumber_lattice(grid)?;
    let fourier = Fourier::new(grid.n_points);
    Ok(match spec.equation {
        Equation::Dirac => Box::new(DiracSplit::new(grid, spec, &k, dt, fourier)),
        Equation::Schrodinger => Box::new(SchrodingerSplit {
            grid: *grid,
            params: spec.params,
            protocol: spec.protocol.clone(),
            auxiliary: spec.auxiliary.clone(),
            k,
            fourier,
        }),
    })
}

/// Strang step `P(dt/2) K(dt) P(dt/2)` with the local part sampled at the
/// midpoint time. The kinetic factor `exp(-i dt c k s_kin)` is exact and
/// time independent.
struct DiracSplit {
    grid: GridSpec,
    kind: FieldKind,
    params: PhysicalParams,
    protocol: DriveProtocol,
    auxiliary: Auxiliary,
    representation: Representation,
    kinetic: Vec<Mat2>,
    fourier: Fourier,
    uniform: bool,
    local: Vec<Mat2>,
}

impl DiracSplit {
    fn new(grid: &GridSpec, spec: &EvolutionSpec, k: &[f64], dt: f64, fourier: Fourier) -> Self {
        let p = spec.params;
        let axis = spec.representation.kinetic_axis();
        let kinetic = k
            .iter()
            .map(|&kn| axis.hermitian(p.light_speed * p.hbar * kn).exp_i(dt / p.hbar))
            .collect();
        let uniform = spec.kind == FieldKind::Homogeneous
            && match &spec.auxiliary {
                Auxiliary::Dirac(a) => a.is_uniform(),
                _ => true,
            };
        Self {
            grid: *grid,
            kind: spec.kind,
            params: p,
            protocol: spec.protocol.clone(),
            auxiliary: spec.auxiliary.clone(),
            representation: spec.representation,
            kinetic,
            fourier,
            uniform,
            local: Vec::new(),
        }
    }

    fn local_factors(&mut self, t: f64, half_dt: f64) -> Result<()> {
        let alpha = self.protocol.alpha(t);
        let mc2 = self.params.rest_energy();
        let theta = half_dt / self.params.hbar;
        let aux_rep = match &self.auxiliary {
            Auxiliary::Dirac(a) => Some(a.representation()),
            _ => None,
        };
        let to_local = |x: f64, v: PotentialMatrix| {
            let v = match aux_rep {
                Some(r) if r != self.representation => v.rotated(),
                _ => v,
            };
            let a = Gauge::Velocity.vector_potential(self.kind, x, alpha);
            self.representation.local_matrix(a, mc2, &v).exp_i(theta)
        };
        if self.uniform {
            let x0 = self.grid.x(0);
            let v = match &self.auxiliary {
                Auxiliary::Dirac(a) => a.at(x0, t)?,
                _ => PotentialMatrix::default(),
            };
            self.local = vec![to_local(x0, v)];
        } else {
            let values = match &self.auxiliary {
                Auxiliary::Dirac(a) => a.sample(&self.grid, t)?,
                _ => vec![PotentialMatrix::default(); self.grid.n_points],
            };
            self.local = values
                .into_iter()
                .enumerate()
                .map(|(j, v)| to_local(self.grid.x(j), v))
                .collect();
        }
        Ok(())
    }

    fn apply_local(&self, comps: &mut [Vec<C64>]) {
        let (a, b) = comps.split_at_mut(1);
        for j in 0..a[0].len() {
            let m = if self.uniform { &self.local[0] } else { &self.local[j] };
            let [u, v] = m.apply([a[0][j], b[0][j]]);
            a[0][j] = u;
            b[0][j] = v;
        }
    }
}

impl Stepper for DiracSplit {
    fn step(&mut self, comps: &mut [Vec<C64>], t: f64, dt: f64) -> Result<()> {
        self.local_factors(t + 0.5 * dt, 0.5 * dt)?;
        self.apply_local(comps);
        for c in comps.iter_mut() {
            self.fourier.forward(c);
        }
        {
            let (a, b) = comps.split_at_mut(1);
            for (j, m) in self.kinetic.iter().enumerate() {
                let [u, v] = m.apply([a[0][j], b[0][j]]);
                a[0][j] = u;
                b[0][j] = v;
            }
        }
        for c in comps.iter_mut() {
            self.fourier.inverse(c);
        }
        self.apply_local(comps);
        Ok(())
    }
}

/// Homogeneous-field Schrödinger step: the minimal-coupling kinetic term
/// `(hbar k + alpha/c)^2 / 2m` is diagonal in `k`, and the scalar auxiliary
/// is split symmetrically around it.
struct SchrodingerSplit {
    grid: GridSpec,
    params: PhysicalParams,
    protocol: DriveProtocol,
    auxiliary: Auxiliary,
    k: Vec<f64>,
    fourier: Fourier,
}

impl Stepper for SchrodingerSplit {
    fn step(&mut self, comps: &mut [Vec<C64>], t: f64, dt: f64) -> Result<()> {
        let tm = t + 0.5 * dt;
        let p = self.params;
        let shift = self.protocol.alpha(tm) / p.light_speed;
        let half = match &self.auxiliary {
            Auxiliary::Scalar(a) => Some(
                a.sample(&self.grid, tm)?
                    .into_iter()
                    .map(|v| C64::from_polar(1.0, -0.5 * dt * v / p.hbar))
                    .collect::<Vec<_>>(),
            ),
            _ => None,
        };
        let psi = &mut comps[0];
        if let Some(h) = &half {
            psi.iter_mut().zip(h).for_each(|(z, w)| *z *= w);
        }
        self.fourier.forward(psi);
        for (z, &kn) in psi.iter_mut().zip(&self.k) {
            let q = p.hbar * kn + shift;
            *z *= C64::from_polar(1.0, -dt * q * q / (2.0 * p.mass * p.hbar));
        }
        self.fourier.inverse(psi);
        if let Some(h) = &half {
            psi.iter_mut().zip(h).for_each(|(z, w)| *z *= w);
        }
        Ok(())
    }
}
