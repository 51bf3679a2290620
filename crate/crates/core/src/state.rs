//! Wavefunctions sampled on a grid.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::field::{gauge_shift, FieldKind, Gauge};
use crate::grid::{GridSpec, Window};
use crate::params::PhysicalParams;
use crate::spin::{rotate_spinor, Mat2, Representation};

pub type C64 = Complex64;

/// Two-component Dirac state. Amplitudes carry units of `1/sqrt(length)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    pub grid: GridSpec,
    pub representation: Representation,
    pub gauge: Gauge,
    pub components: [Vec<C64>; 2],
}

impl SpinorField {
    pub fn new(
        grid: GridSpec,
        representation: Representation,
        gauge: Gauge,
        first: Vec<C64>,
        second: Vec<C64>,
    ) -> Result<Self> {
        if first.len() != grid.n_points || second.len() != grid.n_points {
            return Err(invalid(format!(
                "spinor components need {} samples, got {} and {}",
                grid.n_points,
                first.len(),
                second.len()
            )));
        }
        Ok(Self {
            grid,
            representation,
            gauge,
            components: [first, second],
        })
    }

    pub fn zeros(grid: GridSpec, representation: Representation, gauge: Gauge) -> Self {
        let z = vec![C64::new(0.0, 0.0); grid.n_points];
        Self {
            grid,
            representation,
            gauge,
            components: [z.clone(), z],
        }
    }

    pub fn len(&self) -> usize {
        self.grid.n_points
    }

    pub fn is_empty(&self) -> bool {
        self.grid.n_points == 0
    }

    pub fn at(&self, j: usize) -> [C64; 2] {
        [self.components[0][j], self.components[1][j]]
    }

    pub fn set(&mut self, j: usize, v: [C64; 2]) {
        self.components[0][j] = v[0];
        self.components[1][j] = v[1];
    }

    pub fn norm_sqr(&self) -> f64 {
        let s: f64 = self
            .components
            .iter()
            .flat_map(|c| c.iter())
            .map(|z| z.norm_sqr())
            .sum();
        s * self.grid.dx()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(invalid("cannot normalize a state with zero or non-finite norm"));
        }
        self.scale(C64::new(1.0 / n, 0.0));
        Ok(())
    }

    pub fn scale(&mut self, s: C64) {
        for c in self.components.iter_mut() {
            for z in c.iter_mut() {
                *z *= s;
            }
        }
    }

    fn check_compatible(&self, other: &SpinorField) -> Result<()> {
        self.grid.same_as(&other.grid)?;
        if self.representation != other.representation {
            return Err(Error::RepresentationMismatch {
                expected: self.representation,
                found: other.representation,
            });
        }
        if self.gauge != other.gauge {
            return Err(Error::GaugeMismatch {
                expected: self.gauge,
                found: other.gauge,
            });
        }
        Ok(())
    }

    /// `<self, other>` with the Riemann rule.
    pub fn inner(&self, other: &SpinorField) -> Result<C64> {
        self.inner_over(other, 0..self.len())
    }

    pub fn inner_window(&self, other: &SpinorField, window: &Window) -> Result<C64> {
        self.check_compatible(other)?;
        let idx = window.indices(&self.grid);
        let mut acc = C64::new(0.0, 0.0);
        for j in idx {
            for c in 0..2 {
                acc += self.components[c][j].conj() * other.components[c][j];
            }
        }
        Ok(acc * self.grid.dx())
    }

    fn inner_over(&self, other: &SpinorField, range: std::ops::Range<usize>) -> Result<C64> {
        self.check_compatible(other)?;
        let mut acc = C64::new(0.0, 0.0);
        for j in range {
            for c in 0..2 {
                acc += self.components[c][j].conj() * other.components[c][j];
            }
        }
        Ok(acc * self.grid.dx())
    }

    /// Norm restricted to a window.
    pub fn norm_sqr_window(&self, window: &Window) -> f64 {
        let s: f64 = window
            .indices(&self.grid)
            .into_iter()
            .map(|j| self.components[0][j].norm_sqr() + self.components[1][j].norm_sqr())
            .sum();
        s * self.grid.dx()
    }

    /// Applies a constant 2x2 matrix at every grid point.
    pub fn apply_constant(&mut self, m: &Mat2) {
        for j in 0..self.len() {
            let v = m.apply(self.at(j));
            self.set(j, v);
        }
    }

    /// Same state expressed in `target`.
    pub fn to_representation(&self, target: Representation) -> Self {
        if target == self.representation {
            return self.clone();
        }
        let mut out = self.clone();
        for j in 0..self.len() {
            out.set(j, rotate_spinor(self.at(j)));
        }
        out.representation = target;
        out
    }

    /// Same state in another gauge at control value `alpha`.
    pub fn to_gauge(&self, target: Gauge, kind: FieldKind, alpha: f64, params: &PhysicalParams) -> Self {
        let mut out = self.clone();
        if target != self.gauge {
            for j in 0..self.len() {
                let phase = gauge_shift(kind, self.gauge, target, self.grid.x(j), alpha, params);
                let e = C64::from_polar(1.0, phase);
                out.components[0][j] *= e;
                out.components[1][j] *= e;
            }
            out.gauge = target;
        }
        out
    }
}

/// One-component Schrödinger state.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarWavefunction {
    pub grid: GridSpec,
    pub gauge: Gauge,
    pub values: Vec<C64>,
}

impl ScalarWavefunction {
    pub fn new(grid: GridSpec, gauge: Gauge, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.n_points {
            return Err(invalid(format!(
                "wavefunction needs {} samples, got {}",
                grid.n_points,
                values.len()
            )));
        }
        Ok(Self { grid, gauge, values })
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.dx()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(invalid("cannot normalize a state with zero or non-finite norm"));
        }
        for z in self.values.iter_mut() {
            *z /= n;
        }
        Ok(())
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    fn check_compatible(&self, other: &ScalarWavefunction) -> Result<()> {
        self.grid.same_as(&other.grid)?;
        if self.gauge != other.gauge {
            return Err(Error::GaugeMismatch {
                expected: self.gauge,
                found: other.gauge,
            });
        }
        Ok(())
    }

    pub fn inner(&self, other: &ScalarWavefunction) -> Result<C64> {
        self.check_compatible(other)?;
        let s: C64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * self.grid.dx())
    }

    pub fn inner_window(&self, other: &ScalarWavefunction, window: &Window) -> Result<C64> {
        self.check_compatible(other)?;
        let s: C64 = window
            .indices(&self.grid)
            .into_iter()
            .map(|j| self.values[j].conj() * other.values[j])
            .sum();
        Ok(s * self.grid.dx())
    }

    pub fn norm_sqr_window(&self, window: &Window) -> f64 {
        window
            .indices(&self.grid)
            .into_iter()
            .map(|j| self.values[j].norm_sqr())
            .sum::<f64>()
            * self.grid.dx()
    }

    pub fn to_gauge(&self, target: Gauge, kind: FieldKind, alpha: f64, params: &PhysicalParams) -> Self {
        let mut out = self.clone();
        if target != self.gauge {
            for (j, z) in out.values.iter_mut().enumerate() {
                let phase = gauge_shift(kind, self.gauge, target, self.grid.x(j), alpha, params);
                *z *= C64::from_polar(1.0, phase);
            }
            out.gauge = target;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn random_spinor(seed: &[(f64, f64)], grid: GridSpec) -> SpinorField {
        let n = grid.n_points;
        let c1 = (0..n).map(|j| C64::new(seed[j % seed.len()].0, seed[(j + 1) % seed.len()].1)).collect();
        let c2 = (0..n).map(|j| C64::new(seed[(j + 2) % seed.len()].1, -seed[j % seed.len()].0)).collect();
        SpinorField::new(grid, Representation::KineticZ, Gauge::Velocity, c1, c2).unwrap()
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(seed in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3..12)) {
            let grid = GridSpec::periodic(-3.0, 5.0, 32).unwrap();
            let s = random_spinor(&seed, grid);
            prop_assume!(s.norm() > 1e-6);
            let a = s.normalized().unwrap();
            prop_assert!((a.norm_sqr() - 1.0).abs() < 1e-12);
            let b = a.clone().normalized().unwrap();
            for c in 0..2 {
                for (x, y) in a.components[c].iter().zip(&b.components[c]) {
                    prop_assert!((x - y).norm() < 1e-14);
                }
            }
        }

        #[test]
        fn rotation_preserves_inner_products(seed in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3..12)) {
            let grid = GridSpec::periodic(0.0, 1.0, 16).unwrap();
            let a = random_spinor(&seed, grid);
            let mut b = a.clone();
            b.components.swap(0, 1);
            let before = a.inner(&b).unwrap();
            let ra = a.to_representation(Representation::KineticX);
            let rb = b.to_representation(Representation::KineticX);
            let after = ra.inner(&rb).unwrap();
            prop_assert!((before - after).norm() < 1e-12);
            let back = ra.to_representation(Representation::KineticZ);
            prop_assert!(back.components[0].iter().zip(&a.components[0]).all(|(x, y)| (x - y).norm() < 1e-14));
        }
    }

    #[test]
    fn mismatched_tags_are_rejected() {
        let grid = GridSpec::periodic(0.0, 1.0, 4).unwrap();
        let a = SpinorField::zeros(grid, Representation::KineticZ, Gauge::Velocity);
        let b = SpinorField::zeros(grid, Representation::KineticX, Gauge::Velocity);
        assert!(matches!(a.inner(&b), Err(Error::RepresentationMismatch { .. })));
        let c = SpinorField::zeros(grid, Representation::KineticZ, Gauge::Length);
        assert!(matches!(a.inner(&c), Err(Error::GaugeMismatch { .. })));
    }

    #[test]
    fn gauge_round_trip() {
        let grid = GridSpec::periodic(-2.0, 2.0, 8).unwrap();
        let p = PhysicalParams::default();
        let mut w = ScalarWavefunction::new(grid, Gauge::Velocity, vec![C64::new(1.0, 0.0); 8]).unwrap();
        w.normalize().unwrap();
        let l = w.to_gauge(Gauge::Length, FieldKind::Linear, 1.3, &p);
        assert_eq!(l.gauge, Gauge::Length);
        let back = l.to_gauge(Gauge::Velocity, FieldKind::Linear, 1.3, &p);
        for (a, b) in back.values.iter().zip(&w.values) {
            assert!((a - b).norm() < 1e-15);
        }
    }
}
