//! Vector-potential profiles and the two gauges used to describe them.

use serde::{Deserialize, Serialize};

use crate::params::PhysicalParams;

/// Spatial profile of the driven vector potential `A(x, alpha)` (energy units).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    /// `A(x, alpha) = alpha`.
    Homogeneous,
    /// `A(x, alpha) = alpha * x`.
    Linear,
}

impl FieldKind {
    pub fn evaluate(self, x: f64, alpha: f64) -> f64 {
        match self {
            FieldKind::Homogeneous => alpha,
            FieldKind::Linear => alpha * x,
        }
    }

    /// `dA/d(alpha)` at position `x`.
    pub fn d_alpha(self, x: f64) -> f64 {
        match self {
            FieldKind::Homogeneous => 1.0,
            FieldKind::Linear => x,
        }
    }

    /// `int_0^x A(x', alpha) dx'`.
    pub fn antiderivative(self, x: f64, alpha: f64) -> f64 {
        match self {
            FieldKind::Homogeneous => alpha * x,
            FieldKind::Linear => 0.5 * alpha * x * x,
        }
    }

    /// Gauge in which the standard eigenstate family of this field is written:
    /// plane waves with shifted momentum for the homogeneous field, chirped
    /// waves for the linear one.
    pub fn natural_gauge(self) -> Gauge {
        match self {
            FieldKind::Homogeneous => Gauge::Length,
            FieldKind::Linear => Gauge::Velocity,
        }
    }

    /// `d/d(alpha)` of the kinetic term `c hbar dtheta/dx + A` seen by the
    /// eigenstate family. The homogeneous field shifts the momentum, the
    /// linear field is absorbed by the chirp of the phase.
    pub fn kinetic_slope(self) -> f64 {
        match self {
            FieldKind::Homogeneous => 1.0,
            FieldKind::Linear => 0.0,
        }
    }
}

/// `Velocity`: the field enters through minimal coupling `c p + A`.
/// `Length`: the unitary `exp(i int_0^x A / hbar c)` removes `A` from the
/// kinetic term and replaces it by the scalar drive
/// `-(1/c) int_0^x dA/dt dx'`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    Velocity,
    Length,
}

impl Gauge {
    /// Vector potential appearing in the kinetic term.
    pub fn vector_potential(self, kind: FieldKind, x: f64, alpha: f64) -> f64 {
        match self {
            Gauge::Velocity => kind.evaluate(x, alpha),
            Gauge::Length => 0.0,
        }
    }

    /// Scalar potential generated by the time dependence of the gauge map.
    pub fn drive(self, kind: FieldKind, x: f64, alpha_dot: f64, params: &PhysicalParams) -> f64 {
        match self {
            Gauge::Velocity => 0.0,
            Gauge::Length => -kind.antiderivative(x, alpha_dot) / params.light_speed,
        }
    }
}

/// Phase `chi` with `psi_length = exp(i chi) psi_velocity`.
pub fn gauge_phase(kind: FieldKind, x: f64, alpha: f64, params: &PhysicalParams) -> f64 {
    kind.antiderivative(x, alpha) / (params.hbar * params.light_speed)
}

/// Phase to multiply by when moving a state from gauge `from` to gauge `to`.
pub fn gauge_shift(
    kind: FieldKind,
    from: Gauge,
    to: Gauge,
    x: f64,
    alpha: f64,
    params: &PhysicalParams,
) -> f64 {
    match (from, to) {
        (Gauge::Velocity, Gauge::Length) => gauge_phase(kind, x, alpha, params),
        (Gauge::Length, Gauge::Velocity) => -gauge_phase(kind, x, alpha, params),
        _ => 0.0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_is_exact() {
        assert_eq!(FieldKind::Homogeneous.evaluate(3.0, 1.25), 1.25);
        assert_eq!(FieldKind::Linear.evaluate(3.0, 1.25), 3.75);
    }

    #[test]
    fn antiderivative_matches_profile() {
        let h = 1e-6;
        for kind in [FieldKind::Homogeneous, FieldKind::Linear] {
            for x in [-2.0, 0.3, 5.0] {
                let d = (kind.antiderivative(x + h, 1.7) - kind.antiderivative(x - h, 1.7)) / (2.0 * h);
                assert!((d - kind.evaluate(x, 1.7)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn length_drive_matches_known_forms() {
        let p = PhysicalParams::default();
        assert_eq!(Gauge::Length.drive(FieldKind::Homogeneous, 2.0, 0.5, &p), -1.0);
        assert_eq!(Gauge::Length.drive(FieldKind::Linear, 2.0, 0.5, &p), -1.0);
        assert_eq!(Gauge::Velocity.drive(FieldKind::Linear, 2.0, 0.5, &p), 0.0);
    }
}
