use super::PhaseField;
use crate::eigen::DiracFamily;
use crate::error::{invalid, Error, Result};
use crate::field::Gauge;
use crate::grid::GridSpec;
use crate::params::PhysicalParams;
use crate::potential::{PotentialMatrix, PotentialSlice};
use crate::protocol::DriveProtocol;
use crate::spin::Representation;

/// Target eigenstate and its time derivative at one instant, in the form
/// `exp(i theta) u` with a real envelope `u`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracSnapshot {
    pub grid: GridSpec,
    pub t: f64,
    pub representation: Representation,
    pub gauge: Gauge,
    pub u: [Vec<f64>; 2],
    pub u_t: [Vec<f64>; 2],
    pub theta_t: Vec<f64>,
}

impl DiracSnapshot {
    /// Samples a family along a protocol. Time derivatives go through
    /// `d/d(alpha)` and the protocol's analytic `alpha_dot`.
    pub fn from_family(
        family: &dyn DiracFamily,
        grid: &GridSpec,
        protocol: &DriveProtocol,
        t: f64,
    ) -> Result<Self> {
        let alpha = protocol.alpha(t);
        let alpha_dot = protocol.alpha_dot(t);
        let n = grid.n_points;
        let mut u = [Vec::with_capacity(n), Vec::with_capacity(n)];
        let mut u_t = [Vec::with_capacity(n), Vec::with_capacity(n)];
        let mut theta_t = Vec::with_capacity(n);
        for j in 0..n {
            let p = family.point(grid.x(j), alpha)?;
            for c in 0..2 {
                u[c].push(p.u[c]);
                u_t[c].push(p.du[c] * alpha_dot);
            }
            theta_t.push(p.dtheta_dalpha * alpha_dot);
        }
        Ok(Self {
            grid: *grid,
            t,
            representation: family.representation(),
            gauge: family.gauge(),
            u,
            u_t,
            theta_t,
        })
    }
}

/// Output of the Dirac synthesis.
#[derive(Debug, Clone, PartialEq)]
pub struct DiracSynthesis {
    /// Potential relative to the instantaneous Hamiltonian of the snapshot's
    /// gauge.
    pub potential: PotentialSlice,
    /// Largest violation of the imaginary-part equations, which the
    /// least-squares `v_p` cannot absorb. Zero for norm-preserving envelopes.
    pub consistency: f64,
}

/// Relative size of the real-part determinant below which the scalar
/// component is considered undetermined.
pub const DETERMINANT_TOLERANCE: f64 = 1e-12;

/// Auxiliary potential matrix that keeps `exp(i f) exp(i theta) u` on the
/// eigenstate manifold.
///
/// Writing the potential as `v_t + v_p sy + v_s s_mass` (no vector part),
/// the imaginary part of the transport equation gives `v_p` from the envelope
/// velocity, the real part gives `v_s` from `f_x`, and either component then
/// yields `v_t`.
pub fn dirac_ff_potentials(
    snapshot: &DiracSnapshot,
    phase: &PhaseField,
    params: &PhysicalParams,
) -> Result<DiracSynthesis> {
    snapshot.grid.same_as(&phase.grid)?;
    let f_t = phase.f_t()?;
    let hbar = params.hbar;
    let chb = params.light_speed * hbar;
    let n = snapshot.grid.n_points;
    let mut values = Vec::with_capacity(n);
    let mut consistency: f64 = 0.0;
    for j in 0..n {
        let (u1, u2) = (snapshot.u[0][j], snapshot.u[1][j]);
        let (u1t, u2t) = (snapshot.u_t[0][j], snapshot.u_t[1][j]);
        let norm = u1 * u1 + u2 * u2;
        if !(norm > 0.0) {
            return Err(invalid(format!("envelope vanishes at x = {}", snapshot.grid.x(j))));
        }
        let v_p = hbar * (u2t * u1 - u1t * u2) / norm;
        consistency = consistency
            .max((v_p * u2 + hbar * u1t).abs())
            .max((v_p * u1 - hbar * u2t).abs());

        // Real part: rows of M (w, v_s) = rhs, with w = v_t + hbar (f_t + theta_t).
        let g = chb * phase.f_x[j];
        let (m, rhs) = match snapshot.representation {
            Representation::KineticZ => ([[u1, u2], [u2, u1]], [-g * u1, g * u2]),
            Representation::KineticX => ([[u1, u1], [u2, -u2]], [-g * u2, -g * u1]),
        };
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let (w, v_s) = if det.abs() > DETERMINANT_TOLERANCE * norm {
            (
                (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det,
                (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / det,
            )
        } else if g.abs() <= f64::EPSILON * chb {
            (0.0, 0.0)
        } else {
            return Err(Error::Underdetermined {
                x: snapshot.grid.x(j),
            });
        };
        let v_t = w - hbar * (f_t[j] + snapshot.theta_t[j]);
        values.push(PotentialMatrix::new(v_t, 0.0, v_p, v_s));
    }
    Ok(DiracSynthesis {
        potential: PotentialSlice {
            t: snapshot.t,
            representation: snapshot.representation,
            values,
        },
        consistency,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::ClosedFormFamily;
    use crate::field::FieldKind;
    use crate::spin::Branch;
    use std::f64::consts::PI;

    #[test]
    fn homogeneous_midpoint_value() {
        let g = GridSpec::periodic(-16.0 * PI, 16.0 * PI, 8).unwrap();
        let p = PhysicalParams::default();
        let prot = DriveProtocol::sinusoidal(1.0).unwrap();
        let fam = ClosedFormFamily::new(FieldKind::Homogeneous, p, Branch::Positive).unwrap();
        let snap = DiracSnapshot::from_family(&fam, &g, &prot, 0.5).unwrap();
        let out = dirac_ff_potentials(&snap, &PhaseField::zero(&g, 0.5), &p).unwrap();
        for (j, v) in out.potential.values.iter().enumerate() {
            assert!((v.v_p + PI / 13.0).abs() < 1e-14);
            assert_eq!(v.v_s, 0.0);
            assert!((v.v_t + PI / 2.0 * g.x(j)).abs() < 1e-12);
        }
        assert!(out.consistency < 1e-15);
    }

    #[test]
    fn singular_real_part_with_phase_gradient_is_reported() {
        let g = GridSpec::periodic(-16.0 * PI, 16.0 * PI, 8).unwrap();
        let p = PhysicalParams::default();
        let prot = DriveProtocol::sinusoidal(1.0).unwrap();
        let fam = ClosedFormFamily::new(FieldKind::Homogeneous, p, Branch::Positive).unwrap();
        // kappa = -1 cancels alpha(0) = 1, so the envelope is (1, 1)/sqrt 2.
        let fam_eq = ClosedFormFamily::new(FieldKind::Homogeneous, p.with_kappa(-1.0), Branch::Positive).unwrap();
        let snap = DiracSnapshot::from_family(&fam_eq, &g, &prot, 0.0).unwrap();
        let mut phase = PhaseField::zero(&g, 0.0);
        phase.f_x = vec![0.1; 8];
        let r = dirac_ff_potentials(&snap, &phase, &p);
        assert!(matches!(r, Err(Error::Underdetermined { .. })));
        // Away from equal components a gradient is absorbed by v_s.
        let snap = DiracSnapshot::from_family(&fam, &g, &prot, 0.3).unwrap();
        let out = dirac_ff_potentials(&snap, &phase, &p).unwrap();
        assert!(out.potential.values.iter().all(|v| v.v_s != 0.0));
    }

    #[test]
    fn transport_equation_holds_with_nonzero_phase() {
        use crate::eigen::NumericFamily;
        use num_complex::Complex64;
        let g = GridSpec::bounded(-3.0, 3.0, 24).unwrap();
        let p = PhysicalParams::new(1.3, 0.8, 0.9, 0.4).unwrap();
        let prot = DriveProtocol::sinusoidal(1.0).unwrap();
        let t = 0.37;
        for rep in [Representation::KineticX, Representation::KineticZ] {
            let fam = NumericFamily::new(FieldKind::Homogeneous, p, Branch::Negative, rep).unwrap();
            let snap = DiracSnapshot::from_family(&fam, &g, &prot, t).unwrap();
            let mut phase = PhaseField::zero(&g, t);
            phase.f_x = g.points().iter().map(|x| 0.2 * x.sin()).collect();
            phase.f_t = Some(g.points().iter().map(|x| 0.1 * x.cos()).collect());
            let out = dirac_ff_potentials(&snap, &phase, &p).unwrap();
            let (a, ad, h) = (prot.alpha(t), prot.alpha_dot(t), 1e-6);
            for j in 0..g.n_points {
                let x = g.x(j);
                let spinor = |alpha: f64| {
                    let q = fam.point(x, alpha).unwrap();
                    let e = Complex64::from_polar(1.0, q.theta);
                    [e * q.u[0], e * q.u[1]]
                };
                let (phi, up, dn) = (spinor(a), spinor(a + h), spinor(a - h));
                let v = out.potential.values[j];
                let lhs_m = rep
                    .local_matrix(p.light_speed * p.hbar * phase.f_x[j], 0.0, &v)
                    .add(crate::spin::Hermitian2::new(p.hbar * phase.f_t.as_ref().unwrap()[j], 0.0, 0.0, 0.0));
                let lhs = lhs_m.apply(phi);
                for c in 0..2 {
                    let dt_phi = (up[c] - dn[c]) / (2.0 * h) * ad;
                    let rhs = Complex64::new(0.0, p.hbar) * dt_phi;
                    assert!((lhs[c] - rhs).norm() < 1e-8, "{rep:?} {j} {c}: {} vs {}", lhs[c], rhs);
                }
            }
        }
    }
}
