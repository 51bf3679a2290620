use num_complex::Complex64 as C64;

use super::{Auxiliary, BandMatrix, Equation, EvolutionSpec, Stepper};
use crate::calculus::{first_derivative_weights, high_wavenumber_fraction, second_derivative_weights};
use crate::error::{Error, Result};
use crate::field::{FieldKind, Gauge};
use crate::grid::GridSpec;
use crate::params::PhysicalParams;
use crate::potential::PotentialMatrix;
use crate::protocol::DriveProtocol;
use crate::spin::Representation;

/// Largest spectral weight fraction above `0.8` Nyquist accepted in the
/// initial state. Central differences mix branches near Nyquist.
pub const RESOLUTION_LIMIT: f64 = 1e-10;

const I: C64 = C64 { re: 0.0, im: 1.0 };

pub(super) fn build(grid: &GridSpec, spec: &EvolutionSpec, comps: &[Vec<C64>]) -> Result<Box<dyn Stepper>> {
    let fraction = high_wavenumber_fraction(grid, comps);
    if fraction > RESOLUTION_LIMIT {
        return Err(Error::Unresolved {
            fraction,
            limit: RESOLUTION_LIMIT,
        });
    }
    let d1 = first_derivative_weights(spec.fd_order)?.to_vec();
    let d2 = second_derivative_weights(spec.fd_order)?.to_vec();
    Ok(Box::new(CrankNicolson {
        grid: *grid,
        equation: spec.equation,
        kind: spec.kind,
        params: spec.params,
        protocol: spec.protocol.clone(),
        auxiliary: spec.auxiliary.clone(),
        representation: spec.representation,
        d1,
        d2,
        rhs: Vec::new(),
    }))
}

/// Cayley step `(1 + i dt H/2 hbar) psi' = (1 - i dt H/2 hbar) psi` with
/// `H` at the midpoint time. The wave function vanishes outside the box.
struct CrankNicolson {
    grid: GridSpec,
    equation: Equation,
    kind: FieldKind,
    params: PhysicalParams,
    protocol: DriveProtocol,
    auxiliary: Auxiliary,
    representation: Representation,
    /// Central weights `w_s` for offsets `s = 1..=h` (first derivative) and
    /// `s = 0..=h` (second derivative), before dividing by powers of `dx`.
    d1: Vec<f64>,
    d2: Vec<f64>,
    rhs: Vec<C64>,
}

impl CrankNicolson {
    fn hamiltonian(&self, t: f64) -> Result<BandMatrix> {
        match self.equation {
            Equation::Dirac => self.dirac_hamiltonian(t),
            Equation::Schrodinger => self.schrodinger_hamiltonian(t),
        }
    }

    /// Interleaved unknowns `(psi1_0, psi2_0, psi1_1, ...)`.
    fn dirac_hamiltonian(&self, t: f64) -> Result<BandMatrix> {
        let n = self.grid.n_points;
        let h = self.d1.len();
        let p = self.params;
        let dx = self.grid.dx();
        let alpha = self.protocol.alpha(t);
        let values = match &self.auxiliary {
            Auxiliary::Dirac(a) => {
                let v = a.sample(&self.grid, t)?;
                if a.representation() != self.representation {
                    v.into_iter().map(PotentialMatrix::rotated).collect()
                } else {
                    v
                }
            }
            _ => vec![PotentialMatrix::default(); n],
        };
        let mut m = BandMatrix::zeros(2 * n, 2 * h + 1);
        let kin = self.representation.kinetic_axis().hermitian(1.0).to_mat();
        for (j, v) in values.iter().enumerate() {
            let a = Gauge::Velocity.vector_potential(self.kind, self.grid.x(j), alpha);
            let loc = self.representation.local_matrix(a, p.rest_energy(), v).to_mat();
            for r in 0..2 {
                for c in 0..2 {
                    m.add(2 * j + r, 2 * j + c, loc.0[r][c]);
                }
            }
            // -i hbar c D s_kin with D_{j, j+s} = w_s/dx, D_{j, j-s} = -w_s/dx.
            for (s, w) in self.d1.iter().enumerate().map(|(i, w)| (i + 1, *w)) {
                let coef = -I * p.hbar * p.light_speed * w / dx;
                for (l, sign) in [(j + s, 1.0), (j.wrapping_sub(s), -1.0)] {
                    if l >= n {
                        continue;
                    }
                    for r in 0..2 {
                        for c in 0..2 {
                            m.add(2 * j + r, 2 * l + c, coef * sign * kin.0[r][c]);
                        }
                    }
                }
            }
        }
        Ok(m)
    }

    /// `((p + A/c)^2)/2m + V` written as
    /// `(-hbar^2 D2 - i hbar D(a_j + a_l) + a^2)/2m + V` with `a = A/c`.
    fn schrodinger_hamiltonian(&self, t: f64) -> Result<BandMatrix> {
        let n = self.grid.n_points;
        let h = self.d1.len();
        let p = self.params;
        let dx = self.grid.dx();
        let alpha = self.protocol.alpha(t);
        let v = match &self.auxiliary {
            Auxiliary::Scalar(a) => a.sample(&self.grid, t)?,
            _ => vec![0.0; n],
        };
        let a: Vec<f64> = self
            .grid
            .points()
            .iter()
            .map(|&x| Gauge::Velocity.vector_potential(self.kind, x, alpha) / p.light_speed)
            .collect();
        let inv2m = 1.0 / (2.0 * p.mass);
        let mut m = BandMatrix::zeros(n, h);
        for j in 0..n {
            let diag = -p.hbar * p.hbar * self.d2[0] / (dx * dx) + a[j] * a[j];
            m.add(j, j, C64::new(diag * inv2m + v[j], 0.0));
            for s in 1..=h {
                for (l, sign) in [(j + s, 1.0), (j.wrapping_sub(s), -1.0)] {
                    if l >= n {
                        continue;
                    }
                    let lap = -p.hbar * p.hbar * self.d2[s] / (dx * dx);
                    let drift = -I * p.hbar * sign * self.d1[s - 1] / dx * (a[j] + a[l]);
                    m.add(j, l, (drift + lap) * inv2m);
                }
            }
        }
        Ok(m)
    }
}

impl Stepper for CrankNicolson {
    fn step(&mut self, comps: &mut [Vec<C64>], t: f64, dt: f64) -> Result<()> {
        let h = self.hamiltonian(t + 0.5 * dt)?;
        let size = h.size();
        let ncomp = comps.len();
        let factor = I * (0.5 * dt / self.params.hbar);
        // lhs = 1 + i dt H / 2 hbar; rhs = psi - i dt H psi / 2 hbar.
        let mut flat: Vec<C64> = (0..size).map(|i| comps[i % ncomp][i / ncomp]).collect();
        self.rhs.resize(size, C64::new(0.0, 0.0));
        h.matvec(&flat, &mut self.rhs);
        for (r, f) in self.rhs.iter_mut().zip(&flat) {
            *r = f - factor * *r;
        }
        let mut lhs = BandMatrix::zeros(size, h.half_bandwidth());
        for i in 0..size {
            let lo = i.saturating_sub(h.half_bandwidth());
            let hi = (i + h.half_bandwidth() + 1).min(size);
            for j in lo..hi {
                let delta = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                lhs.add(i, j, delta + factor * h.get(i, j));
            }
        }
        let lu = lhs
            .factorize()
            .ok_or_else(|| crate::error::invalid("Cayley matrix is singular"))?;
        flat.copy_from_slice(&self.rhs);
        lu.solve_in_place(&mut flat);
        for (i, z) in flat.into_iter().enumerate() {
            comps[i % ncomp][i / ncomp] = z;
        }
        Ok(())
    }
}
