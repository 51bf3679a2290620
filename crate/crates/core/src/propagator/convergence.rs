use rayon::prelude::*;
use serde::Serialize;

use super::{propagate, Backend, EvolutionSpec, WaveState};
use crate::error::{invalid, Result};
use crate::field::FieldKind;
use crate::propagator::Equation;

/// Errors of a `dt` scan and the fitted temporal order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub dts: Vec<f64>,
    pub errors: Vec<f64>,
    /// `errors[i] / errors[i + 1]`.
    pub ratios: Vec<f64>,
    /// Least-squares slope of `log error` against `log dt`; `None` when the
    /// errors do not decrease monotonically.
    pub order: Option<f64>,
    /// Backend used for the reference solution.
    pub reference: Backend,
    pub reference_dt: f64,
}

fn difference(a: &WaveState, b: &WaveState) -> Result<f64> {
    let dx = a.grid().dx();
    let sq = match (a, b) {
        (WaveState::Dirac(x), WaveState::Dirac(y)) => x
            .components
            .iter()
            .zip(&y.components)
            .flat_map(|(u, v)| u.iter().zip(v))
            .map(|(p, q)| (p - q).norm_sqr())
            .sum::<f64>(),
        (WaveState::Schrodinger(x), WaveState::Schrodinger(y)) => {
            x.values.iter().zip(&y.values).map(|(p, q)| (p - q).norm_sqr()).sum()
        }
        _ => return Err(invalid("states of different equations")),
    };
    Ok((sq * dx).sqrt())
}

/// Measures the temporal order of `spec.backend` over `dts`.
///
/// The reference is the mode integrator for homogeneous Dirac runs on
/// periodic grids and otherwise the same backend at a quarter of the
/// smallest step.
pub fn convergence_order(initial: &WaveState, spec: &EvolutionSpec, dts: &[f64]) -> Result<ConvergenceReport> {
    if dts.len() < 3 {
        return Err(invalid("need at least three step sizes"));
    }
    let q = dts[0] / dts[1];
    if !(q > 1.0) || dts.windows(2).any(|w| ((w[0] / w[1]) / q - 1.0).abs() > 1e-9) {
        return Err(invalid("step sizes must decrease in geometric progression"));
    }
    let dt_min = dts[dts.len() - 1];
    let use_oracle = spec.equation == Equation::Dirac
        && spec.kind == FieldKind::Homogeneous
        && initial.grid().is_periodic()
        && spec.backend != Backend::ModeOde;
    let (reference, reference_dt) = if use_oracle {
        (Backend::ModeOde, dt_min)
    } else {
        (spec.backend, dt_min / 4.0)
    };
    let mut ref_spec = spec.clone().with_dt(reference_dt);
    ref_spec.backend = reference;
    ref_spec.record_every = None;

    let mut jobs: Vec<EvolutionSpec> = dts
        .iter()
        .map(|&dt| {
            let mut s = spec.clone().with_dt(dt);
            s.record_every = None;
            s
        })
        .collect();
    jobs.push(ref_spec);
    let finals: Vec<WaveState> = jobs
        .par_iter()
        .map(|s| propagate(initial, s).map(|tr| tr.final_state().clone()))
        .collect::<Result<_>>()?;
    let (runs, reference_state) = finals.split_at(dts.len());
    let errors: Vec<f64> = runs
        .iter()
        .map(|s| difference(s, &reference_state[0]))
        .collect::<Result<_>>()?;
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    let monotone = ratios.iter().all(|&r| r > 1.0);
    let order = monotone.then(|| {
        let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
        let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
        let n = xs.len() as f64;
        let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        sxy / sxx
    });
    Ok(ConvergenceReport {
        dts: dts.to_vec(),
        errors,
        ratios,
        order,
        reference,
        reference_dt,
    })
}
