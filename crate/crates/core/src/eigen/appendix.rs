use super::{DiracEigenpair, EigenTags, ScalarPhase};
use crate::error::{invalid, Result};
use crate::field::{FieldKind, Gauge};
use crate::grid::GridSpec;
use crate::params::PhysicalParams;
use crate::spin::{Branch, Representation};

/// `phi_2 / phi_1 = c hbar kappa / (sqrt((c hbar kappa)^2 + (m c^2)^2) + m c^2)`
/// for the positive branch of the linear field in the kinetic-x
/// representation.
pub fn appendix_component_ratio(params: &PhysicalParams) -> f64 {
    let k = params.kinetic_energy_of_kappa();
    let m = params.rest_energy();
    k / ((k * k + m * m).sqrt() + m)
}

/// Lower component `(1 - r)/(1 + r)` obtained after rotating `(1, r)` to the
/// kinetic-z representation and rescaling the upper component to 1.
pub fn rotated_component_ratio(r: f64) -> f64 {
    (1.0 - r) / (1.0 + r)
}

/// Positive and negative eigenpairs of the linear field built component by
/// component: a common chirped phase, energies `+-sqrt((hbar kappa c)^2 +
/// (m c^2)^2)` and the second component fixed by the first row of the
/// eigenvalue equation. Kinetic-x representation, velocity gauge.
pub fn appendix_linear_eigensystem(
    params: PhysicalParams,
    alpha: f64,
    grid: &GridSpec,
) -> Result<(DiracEigenpair, DiracEigenpair)> {
    params.validate()?;
    let k = params.kinetic_energy_of_kappa();
    let m = params.rest_energy();
    let e = (k * k + m * m).sqrt();
    if e == 0.0 {
        return Err(invalid("massless linear field at kappa = 0 has no spectral gap"));
    }
    let kind = FieldKind::Linear;
    let ph = ScalarPhase::new(kind, Gauge::Velocity, params);
    let phase: Vec<f64> = grid.points().iter().map(|&x| ph.value(x, alpha)).collect();
    let build = |branch: Branch| -> Result<DiracEigenpair> {
        let energy = branch.sign() * e;
        // Use whichever row of the eigen equation is well conditioned.
        let (p1, p2) = if (energy + m).abs() >= (energy - m).abs() {
            (1.0, k / (energy + m))
        } else {
            (k / (energy - m), 1.0)
        };
        let n = (p1 * p1 + p2 * p2).sqrt();
        let lead = if p1.abs() > 1e-300 { p1 } else { p2 };
        let s = lead.signum() / n;
        let env = [vec![p1 * s; grid.n_points], vec![p2 * s; grid.n_points]];
        DiracEigenpair::assemble(
            grid,
            EigenTags {
                kind,
                params,
                alpha,
                representation: Representation::KineticX,
                gauge: Gauge::Velocity,
                branch,
            },
            energy,
            if m > 0.0 { k / m } else { f64::INFINITY * k.signum() },
            phase.clone(),
            env,
        )
    };
    Ok((build(Branch::Positive)?, build(Branch::Negative)?))
}
