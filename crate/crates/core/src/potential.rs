//! Potential matrices and auxiliary-potential sources for the propagators.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::GridSpec;
use crate::spin::Representation;

/// Pointwise coefficients of `v_t 1 + v_e s_kin + v_p sy + v_s s_mass`.
/// In the kinetic-x representation the roles are `sx`, `sy`, `sz` in that
/// order.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PotentialMatrix {
    pub v_t: f64,
    pub v_e: f64,
    pub v_p: f64,
    pub v_s: f64,
}

impl PotentialMatrix {
    pub fn new(v_t: f64, v_e: f64, v_p: f64, v_s: f64) -> Self {
        Self { v_t, v_e, v_p, v_s }
    }

    /// Same physical potential expressed in the other representation.
    pub fn rotated(self) -> Self {
        Self {
            v_p: -self.v_p,
            ..self
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.v_t.abs().max(self.v_e.abs()).max(self.v_p.abs()).max(self.v_s.abs())
    }

    pub fn is_finite(&self) -> bool {
        [self.v_t, self.v_e, self.v_p, self.v_s].iter().all(|v| v.is_finite())
    }
}

/// The four potential fields of a Dirac problem on a grid at one time.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSlice {
    pub t: f64,
    pub representation: Representation,
    pub values: Vec<PotentialMatrix>,
}

impl PotentialSlice {
    pub fn zeros(t: f64, representation: Representation, n: usize) -> Self {
        Self {
            t,
            representation,
            values: vec![PotentialMatrix::default(); n],
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.max_abs()).fold(0.0, f64::max)
    }

    pub fn in_representation(&self, target: Representation) -> Self {
        if target == self.representation {
            return self.clone();
        }
        Self {
            t: self.t,
            representation: target,
            values: self.values.iter().map(|v| v.rotated()).collect(),
        }
    }
}

/// Time-dependent Dirac potential added to the lab Hamiltonian.
pub trait DiracAuxiliary: Send + Sync + fmt::Debug {
    fn representation(&self) -> Representation;

    /// Potential on every grid point at time `t`.
    fn sample(&self, grid: &GridSpec, t: f64) -> Result<Vec<PotentialMatrix>>;

    /// Whether the potential is the same at every point (required by the
    /// single-mode integrator).
    fn is_uniform(&self) -> bool {
        false
    }

    /// Value at a single point.
    fn at(&self, x: f64, t: f64) -> Result<PotentialMatrix> {
        let g = GridSpec {
            x_min: x,
            x_max: x + 1.0,
            n_points: 1,
            boundary: crate::grid::Boundary::Bounded,
        };
        Ok(self.sample(&g, t)?[0])
    }
}

/// Time-dependent scalar potential for Schrödinger runs.
pub trait ScalarAuxiliary: Send + Sync + fmt::Debug {
    fn sample(&self, grid: &GridSpec, t: f64) -> Result<Vec<f64>>;
}

/// Potential given by a plain function of `(x, t)`.
pub struct FnDiracPotential<F> {
    representation: Representation,
    uniform: bool,
    f: F,
}

impl<F> FnDiracPotential<F>
where
    F: Fn(f64, f64) -> PotentialMatrix + Send + Sync,
{
    pub fn new(representation: Representation, f: F) -> Self {
        Self {
            representation,
            uniform: false,
            f,
        }
    }

    /// Declares the potential independent of `x`.
    pub fn uniform(representation: Representation, f: F) -> Self {
        Self {
            representation,
            uniform: true,
            f,
        }
    }
}

impl<F> fmt::Debug for FnDiracPotential<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnDiracPotential")
            .field("representation", &self.representation)
            .field("uniform", &self.uniform)
            .finish_non_exhaustive()
    }
}

impl<F> DiracAuxiliary for FnDiracPotential<F>
where
    F: Fn(f64, f64) -> PotentialMatrix + Send + Sync,
{
    fn representation(&self) -> Representation {
        self.representation
    }

    fn sample(&self, grid: &GridSpec, t: f64) -> Result<Vec<PotentialMatrix>> {
        Ok((0..grid.n_points).map(|j| (self.f)(grid.x(j), t)).collect())
    }

    fn is_uniform(&self) -> bool {
        self.uniform
    }

    fn at(&self, x: f64, t: f64) -> Result<PotentialMatrix> {
        Ok((self.f)(x, t))
    }
}

pub struct FnScalarPotential<F>(pub F);

impl<F> fmt::Debug for FnScalarPotential<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("FnScalarPotential")
    }
}

impl<F> ScalarAuxiliary for FnScalarPotential<F>
where
    F: Fn(f64, f64) -> f64 + Send + Sync,
{
    fn sample(&self, grid: &GridSpec, t: f64) -> Result<Vec<f64>> {
        Ok((0..grid.n_points).map(|j| (self.0)(grid.x(j), t)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_flips_only_pseudoscalar() {
        let v = PotentialMatrix::new(1.0, 0.0, -2.0, 3.0);
        assert_eq!(v.rotated(), PotentialMatrix::new(1.0, 0.0, 2.0, 3.0));
        assert_eq!(v.rotated().rotated(), v);
    }

    #[test]
    fn function_potential_samples_grid() {
        let g = GridSpec::bounded(0.0, 4.0, 4).unwrap();
        let p = FnDiracPotential::new(Representation::KineticZ, |x, t| PotentialMatrix::new(x * t, 0.0, 0.0, 0.0));
        let s = p.sample(&g, 2.0).unwrap();
        assert_eq!(s.iter().map(|v| v.v_t).collect::<Vec<_>>(), vec![0.0, 2.0, 4.0, 6.0]);
        assert_eq!(p.at(1.5, 2.0).unwrap().v_t, 3.0);
    }
}
