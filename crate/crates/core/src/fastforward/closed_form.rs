use crate::field::FieldKind;
use crate::params::PhysicalParams;
use crate::potential::PotentialMatrix;
use crate::protocol::DriveProtocol;

/// Pseudoscalar component `-hbar Pi_dot / (2 + 2 Pi^2)` of the homogeneous
/// field, with `Pi = (c hbar kappa + alpha)/m c^2`, written as
/// `-hbar alpha_dot m c^2 / (2 ((m c^2)^2 + (c hbar kappa + alpha)^2))` so that
/// it stays finite for `m -> 0`.
pub fn homogeneous_pseudoscalar(params: &PhysicalParams, alpha: f64, alpha_dot: f64) -> f64 {
    let m = params.rest_energy();
    let k = params.kinetic_energy_of_kappa() + alpha;
    let d = m * m + k * k;
    if d == 0.0 {
        return 0.0;
    }
    -params.hbar * alpha_dot * m / (2.0 * d)
}

/// Known fast-forward potential matrix at `(x, t)` with `f = 0`, in the
/// kinetic-z representation and the field's natural gauge:
///
/// * homogeneous: `-(alpha_dot/c) x 1 - hbar Pi_dot/(2 + 2 Pi^2) sy`;
/// * linear: `(alpha_dot / 2c) x^2 1`.
pub fn closed_form_potential_matrix(
    kind: FieldKind,
    params: &PhysicalParams,
    protocol: &DriveProtocol,
    t: f64,
    x: f64,
) -> PotentialMatrix {
    let alpha = protocol.alpha(t);
    let alpha_dot = protocol.alpha_dot(t);
    match kind {
        FieldKind::Homogeneous => PotentialMatrix::new(
            -alpha_dot * x / params.light_speed,
            0.0,
            homogeneous_pseudoscalar(params, alpha, alpha_dot),
            0.0,
        ),
        FieldKind::Linear => {
            PotentialMatrix::new(alpha_dot * x * x / (2.0 * params.light_speed), 0.0, 0.0, 0.0)
        }
    }
}

/// Known Schrödinger fast-forward potential with `f = 0`: `-(alpha_dot/c) x`
/// for the homogeneous field and `(alpha_dot/2c) x^2` for the linear one.
pub fn closed_form_schrodinger_potential(
    kind: FieldKind,
    params: &PhysicalParams,
    protocol: &DriveProtocol,
    t: f64,
    x: f64,
) -> f64 {
    closed_form_potential_matrix(kind, params, protocol, t, x).v_t
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn examples() {
        let p = PhysicalParams::default();
        let prot = DriveProtocol::sinusoidal(1.0).unwrap();
        let v = closed_form_potential_matrix(FieldKind::Homogeneous, &p, &prot, 0.0, 3.0);
        assert_eq!(v.max_abs(), 0.0);

        let v = closed_form_potential_matrix(FieldKind::Linear, &p, &prot, 0.5, 2.0);
        assert!((v.v_t - PI).abs() < 1e-14);
        assert_eq!((v.v_e, v.v_p, v.v_s), (0.0, 0.0, 0.0));

        let v = closed_form_potential_matrix(FieldKind::Homogeneous, &p, &prot, 0.5, 2.0);
        assert!((v.v_t + PI).abs() < 1e-14);
        assert!((v.v_p + PI / 13.0).abs() < 1e-15);
    }

    #[test]
    fn stable_form_matches_ratio_form() {
        let p = PhysicalParams::new(1.7, 0.9, 1.1, 0.3).unwrap();
        for (alpha, alpha_dot) in [(0.2, 1.0), (2.5, -0.4), (-1.0, 3.0)] {
            let pi = (p.kinetic_energy_of_kappa() + alpha) / p.rest_energy();
            let pi_dot = alpha_dot / p.rest_energy();
            let direct = -p.hbar * pi_dot / (2.0 + 2.0 * pi * pi);
            assert!((homogeneous_pseudoscalar(&p, alpha, alpha_dot) - direct).abs() < 1e-14);
        }
    }
}
