use super::PhaseField;
use crate::eigen::SchrodingerFamily;
use crate::error::{invalid, Result};
use crate::field::Gauge;
use crate::grid::GridSpec;
use crate::params::PhysicalParams;
use crate::protocol::DriveProtocol;

/// Schrödinger target `beta exp(i gamma)` and its time derivatives at one
/// instant.
#[derive(Debug, Clone, PartialEq)]
pub struct SchrodingerSnapshot {
    pub grid: GridSpec,
    pub t: f64,
    pub gauge: Gauge,
    pub beta: Vec<f64>,
    pub beta_t: Vec<f64>,
    pub gamma_x: Vec<f64>,
    pub gamma_t: Vec<f64>,
    /// Vector potential in the kinetic term of the snapshot's gauge.
    pub vector_potential: Vec<f64>,
}

impl SchrodingerSnapshot {
    pub fn from_family(
        family: &SchrodingerFamily,
        grid: &GridSpec,
        protocol: &DriveProtocol,
        t: f64,
    ) -> Result<Self> {
        let alpha = protocol.alpha(t);
        let alpha_dot = protocol.alpha_dot(t);
        let ph = family.phase();
        let xs = grid.points();
        Ok(Self {
            grid: *grid,
            t,
            gauge: family.gauge,
            beta: vec![1.0 / grid.length().sqrt(); grid.n_points],
            beta_t: vec![0.0; grid.n_points],
            gamma_x: xs.iter().map(|&x| ph.d_x(x, alpha)).collect(),
            gamma_t: xs.iter().map(|&x| ph.d_alpha(x) * alpha_dot).collect(),
            vector_potential: xs
                .iter()
                .map(|&x| family.gauge.vector_potential(family.kind, x, alpha))
                .collect(),
        })
    }
}

/// Auxiliary scalar potential for `exp(i f) beta exp(i gamma)`:
///
/// `V = -hbar f_t - hbar gamma_t - (hbar^2/m) f_x gamma_x - (hbar/m c) A f_x
///      - (hbar^2/2m) f_x^2`,
///
/// where `f` must solve the phase equation for the same amplitude.
pub fn schrodinger_ff_potential(
    snapshot: &SchrodingerSnapshot,
    phase: &PhaseField,
    params: &PhysicalParams,
) -> Result<Vec<f64>> {
    snapshot.grid.same_as(&phase.grid)?;
    if params.mass <= 0.0 {
        return Err(invalid("Schrödinger dynamics needs m > 0"));
    }
    let f_t = phase.f_t()?;
    let (h, m, c) = (params.hbar, params.mass, params.light_speed);
    Ok((0..snapshot.grid.n_points)
        .map(|j| {
            let fx = phase.f_x[j];
            -h * f_t[j] - h * snapshot.gamma_t[j]
                - h * h / m * fx * snapshot.gamma_x[j]
                - h / (m * c) * snapshot.vector_potential[j] * fx
                - h * h / (2.0 * m) * fx * fx
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::SpectralDerivative;
    use crate::fastforward::solve_phase_ode;
    use crate::field::FieldKind;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn closed_form_examples() {
        let p = PhysicalParams::default();
        let prot = DriveProtocol::sinusoidal(1.0).unwrap();
        let g = GridSpec::bounded(-4.0, 4.0, 16).unwrap();
        for (kind, expect) in [
            (FieldKind::Homogeneous, Box::new(|x: f64, ad: f64| -ad * x) as Box<dyn Fn(f64, f64) -> f64>),
            (FieldKind::Linear, Box::new(|x: f64, ad: f64| 0.5 * ad * x * x)),
        ] {
            let fam = SchrodingerFamily::new(kind, p).unwrap();
            for t in [0.0, 0.3, 0.5, 1.0] {
                let snap = SchrodingerSnapshot::from_family(&fam, &g, &prot, t).unwrap();
                let v = schrodinger_ff_potential(&snap, &PhaseField::zero(&g, t), &p).unwrap();
                for (j, vj) in v.iter().enumerate() {
                    assert!((vj - expect(g.x(j), prot.alpha_dot(t))).abs() < 1e-14);
                }
            }
        }
    }

    /// With `psi = exp(i f) Phi` and the local energy `E = H_0 Phi / Phi`,
    /// the construction is exact iff `i hbar d_t psi = (H_0 - E + V) psi`.
    /// This holds for any smooth target, eigenstate or not.
    #[test]
    fn general_phase_satisfies_transport_equation() {
        let p = PhysicalParams::new(1.3, 2.0, 0.8, 0.0).unwrap();
        let g = GridSpec::periodic(-8.0, 8.0, 256).unwrap();
        let w = 2.0 * PI / g.length();
        let (a_vec, kappa, v0) = (0.3, 3.0 * w, 0.4);
        let amplitude = |t: f64| -> (Vec<f64>, Vec<f64>) {
            let mut b = Vec::new();
            let mut bt = Vec::new();
            for x in g.points() {
                let ph = w * (x - v0 * t);
                let bb = (0.75 * ph.cos()).exp();
                b.push(bb);
                bt.push(bb * 0.75 * w * ph.sin() * v0);
            }
            (b, bt)
        };
        let psi_at = |t: f64| -> Vec<Complex64> {
            let (b, bt) = amplitude(t);
            let ph = solve_phase_ode(&b, &bt, None, &p, &g, t).unwrap();
            g.points()
                .iter()
                .enumerate()
                .map(|(j, x)| Complex64::from_polar(b[j], ph.f[j] + kappa * x))
                .collect()
        };
        let t = 0.2;
        let h = 1e-4;
        let (b, bt) = amplitude(t);
        let btt: Vec<f64> = {
            let (_, up) = amplitude(t + h);
            let (_, dn) = amplitude(t - h);
            up.iter().zip(&dn).map(|(a, c)| (a - c) / (2.0 * h)).collect()
        };
        let phase = solve_phase_ode(&b, &bt, Some(&btt), &p, &g, t).unwrap();
        let snap = SchrodingerSnapshot {
            grid: g,
            t,
            gauge: Gauge::Velocity,
            beta: b.clone(),
            beta_t: bt,
            gamma_x: vec![kappa; g.n_points],
            gamma_t: vec![0.0; g.n_points],
            vector_potential: vec![a_vec; g.n_points],
        };
        let v = schrodinger_ff_potential(&snap, &phase, &p).unwrap();

        let sd = SpectralDerivative::new(&g).unwrap();
        let kin = |f: &[Complex64]| -> Vec<Complex64> {
            let d = sd.derivative(f, 1);
            f.iter()
                .zip(&d)
                .map(|(a, da)| Complex64::new(0.0, -p.hbar) * da + a * (a_vec / p.light_speed))
                .collect()
        };
        let h0 = |f: &[Complex64]| -> Vec<Complex64> {
            kin(&kin(f)).into_iter().map(|z| z / (2.0 * p.mass)).collect()
        };
        let target: Vec<Complex64> = g
            .points()
            .iter()
            .zip(&b)
            .map(|(x, bb)| Complex64::from_polar(*bb, kappa * x))
            .collect();
        let local: Vec<Complex64> = h0(&target).iter().zip(&target).map(|(a, c)| a / c).collect();
        let psi = psi_at(t);
        let (up, dn) = (psi_at(t + h), psi_at(t - h));
        let hpsi = h0(&psi);
        let mut worst: f64 = 0.0;
        for j in 0..g.n_points {
            let lhs = Complex64::new(0.0, p.hbar) * (up[j] - dn[j]) / (2.0 * h);
            let rhs = hpsi[j] - local[j] * psi[j] + psi[j] * v[j];
            worst = worst.max((lhs - rhs).norm());
        }
        assert!(worst < 1e-7, "{worst}");
    }
}
