//! Fidelities, component-ratio profiles and pair production.

use num_complex::Complex64 as C64;

use crate::eigen::dirac_eigenspinor_closed_form;
use crate::error::{Error, Result};
use crate::field::{FieldKind, Gauge};
use crate::grid::{GridSpec, Window};
use crate::params::PhysicalParams;
use crate::propagator::WaveState;
use crate::spin::{Branch, Representation};
use crate::state::SpinorField;

/// Target amplitudes at or below this magnitude are not divided by.
pub const RATIO_GUARD: f64 = 1e-12;

fn inner(a: &WaveState, b: &WaveState, window: Option<&Window>) -> Result<C64> {
    match (a, b) {
        (WaveState::Dirac(x), WaveState::Dirac(y)) => match window {
            Some(w) => x.inner_window(y, w),
            None => x.inner(y),
        },
        (WaveState::Schrodinger(x), WaveState::Schrodinger(y)) => match window {
            Some(w) => x.inner_window(y, w),
            None => x.inner(y),
        },
        _ => Err(Error::InvalidArgument("states of different equations".into())),
    }
}

fn norm_sqr_window(a: &WaveState, w: &Window) -> f64 {
    match a {
        WaveState::Dirac(s) => s.norm_sqr_window(w),
        WaveState::Schrodinger(s) => s.norm_sqr_window(w),
    }
}

/// `|<target, state>|^2` over the whole grid.
pub fn fidelity(state: &WaveState, target: &WaveState) -> Result<f64> {
    Ok(inner(target, state, None)?.norm_sqr())
}

/// Overlap restricted to a window, normalized by the window norms of both
/// states.
pub fn fidelity_window(state: &WaveState, target: &WaveState, window: &Window) -> Result<f64> {
    let ov = inner(target, state, Some(window))?;
    let d = norm_sqr_window(target, window) * norm_sqr_window(state, window);
    if d == 0.0 {
        return Err(Error::InvalidArgument("window holds no weight".into()));
    }
    Ok(ov.norm_sqr() / d)
}

/// Pointwise ratios `psi_i / phi_i` and their spread over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioProfile {
    pub x: Vec<f64>,
    /// One vector per component; `NaN` where the target is below the guard.
    pub ratios: Vec<Vec<C64>>,
    /// `sqrt(mean |r - mean r|^2) / |mean r|` over the window, per component.
    pub flatness: Vec<f64>,
    pub window: Window,
}

fn comps(s: &WaveState) -> Vec<&[C64]> {
    match s {
        WaveState::Dirac(d) => d.components.iter().map(|c| c.as_slice()).collect(),
        WaveState::Schrodinger(w) => vec![w.values.as_slice()],
    }
}

fn check_compatible(state: &WaveState, target: &WaveState) -> Result<()> {
    state.grid().same_as(target.grid())?;
    if state.gauge() != target.gauge() {
        return Err(Error::GaugeMismatch {
            expected: target.gauge(),
            found: state.gauge(),
        });
    }
    match (state, target) {
        (WaveState::Dirac(a), WaveState::Dirac(b)) if a.representation != b.representation => {
            Err(Error::RepresentationMismatch {
                expected: b.representation,
                found: a.representation,
            })
        }
        (WaveState::Dirac(_), WaveState::Dirac(_)) | (WaveState::Schrodinger(_), WaveState::Schrodinger(_)) => Ok(()),
        _ => Err(Error::InvalidArgument("states of different equations".into())),
    }
}

pub fn ratio_profile(state: &WaveState, target: &WaveState, window: &Window) -> Result<RatioProfile> {
    check_compatible(state, target)?;
    let grid = *state.grid();
    let inside = window.indices(&grid);
    if inside.is_empty() {
        return Err(Error::InvalidArgument("window contains no grid points".into()));
    }
    let nan = C64::new(f64::NAN, f64::NAN);
    let mut ratios = Vec::new();
    let mut flatness = Vec::new();
    for (psi, phi) in comps(state).into_iter().zip(comps(target)) {
        let r: Vec<C64> = psi
            .iter()
            .zip(phi)
            .map(|(a, b)| if b.norm() > RATIO_GUARD { a / b } else { nan })
            .collect();
        for &j in &inside {
            if !(phi[j].norm() > RATIO_GUARD) {
                return Err(Error::AmplitudeGuard { x: grid.x(j) });
            }
        }
        flatness.push(spread(inside.iter().map(|&j| r[j])));
        ratios.push(r);
    }
    Ok(RatioProfile {
        x: grid.points(),
        ratios,
        flatness,
        window: *window,
    })
}

/// Relative standard deviation of complex samples.
pub fn spread(values: impl Iterator<Item = C64> + Clone) -> f64 {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<C64>() / n;
    let var = values.map(|v| (v - mean).norm_sqr()).sum::<f64>() / n;
    var.sqrt() / mean.norm()
}

/// Eigenspinor of the homogeneous or linear field in a chosen gauge and
/// representation.
pub fn target_spinor(
    kind: FieldKind,
    params: &PhysicalParams,
    alpha: f64,
    grid: &GridSpec,
    branch: Branch,
    gauge: Gauge,
    representation: Representation,
) -> Result<SpinorField> {
    Ok(dirac_eigenspinor_closed_form(kind, *params, alpha, grid, branch)?
        .to_gauge(gauge)?
        .spinor
        .to_representation(representation))
}

/// Negative-branch population `|<Phi_-(alpha), psi>|^2` of mode `kappa`
/// (taken from `params`).
pub fn pair_production(state: &SpinorField, kind: FieldKind, params: &PhysicalParams, alpha: f64) -> Result<f64> {
    if kind != FieldKind::Homogeneous {
        return Err(Error::Unsupported(
            "pair production is mode resolved only for the homogeneous field".into(),
        ));
    }
    let neg = target_spinor(
        kind,
        params,
        alpha,
        &state.grid,
        Branch::Negative,
        state.gauge,
        state.representation,
    )?;
    Ok(neg.inner(state)?.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn grid() -> GridSpec {
        GridSpec::periodic(-16.0 * PI, 16.0 * PI, 64).unwrap()
    }

    fn phi(branch: Branch) -> SpinorField {
        target_spinor(
            FieldKind::Homogeneous,
            &PhysicalParams::default(),
            1.3,
            &grid(),
            branch,
            Gauge::Velocity,
            Representation::KineticZ,
        )
        .unwrap()
    }

    #[test]
    fn examples() {
        let p = PhysicalParams::default();
        let (pos, neg) = (phi(Branch::Positive), phi(Branch::Negative));
        let (wp, wn): (WaveState, WaveState) = (pos.clone().into(), neg.clone().into());
        assert!((fidelity(&wp, &wp).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&wn, &wp).unwrap() < 1e-24);
        assert!(pair_production(&pos, FieldKind::Homogeneous, &p, 1.3).unwrap() < 1e-24);
        assert!((pair_production(&neg, FieldKind::Homogeneous, &p, 1.3).unwrap() - 1.0).abs() < 1e-12);
        assert!(matches!(
            pair_production(&pos, FieldKind::Linear, &p, 1.3),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn global_phase_gives_flat_ratios() {
        let pos = phi(Branch::Positive);
        let mut s = pos.clone();
        s.scale(C64::from_polar(1.0, 0.7));
        let prof = ratio_profile(&s.into(), &pos.clone().into(), &Window::whole(&pos.grid)).unwrap();
        for f in &prof.flatness {
            assert!(*f <= 1e-12);
        }
        assert!((prof.ratios[1][5] - C64::from_polar(1.0, 0.7)).norm() < 1e-12);
    }

    #[test]
    fn guard_is_enforced_inside_the_window() {
        let pos = phi(Branch::Positive);
        let mut t = pos.clone();
        t.components[0][10] = C64::new(0.0, 0.0);
        let r = ratio_profile(&pos.into(), &t.into(), &Window::whole(&grid()));
        assert!(matches!(r, Err(Error::AmplitudeGuard { .. })));
    }

    proptest! {
        #[test]
        fn fidelity_and_pair_production_complete(a in -3.0f64..3.0, b in -3.0f64..3.0, ph in 0.0f64..6.3) {
            let p = PhysicalParams::default();
            let (pos, neg) = (phi(Branch::Positive), phi(Branch::Negative));
            let mut s = pos.clone();
            let norm = (a * a + b * b).sqrt().max(1e-3);
            for c in 0..2 {
                for j in 0..s.len() {
                    s.components[c][j] = (pos.components[c][j] * a
                        + neg.components[c][j] * C64::from_polar(b, ph)) / norm;
                }
            }
            prop_assume!(a * a + b * b > 1e-6);
            let ws: WaveState = s.clone().into();
            let f = fidelity(&ws, &pos.clone().into()).unwrap();
            let pm = pair_production(&s, FieldKind::Homogeneous, &p, 1.3).unwrap();
            prop_assert!((f + pm - 1.0).abs() < 1e-10);

            // Invariant under a global phase and under rotating both states.
            let mut g = s.clone();
            g.scale(C64::from_polar(1.0, ph));
            let w = Window::central(&pos.grid, 0.5);
            let r1 = ratio_profile(&ws, &pos.clone().into(), &w).unwrap();
            let r2 = ratio_profile(&g.into(), &pos.clone().into(), &w).unwrap();
            for (x, y) in r1.flatness.iter().zip(&r2.flatness) {
                prop_assert!((x - y).abs() <= 1e-9 * x.abs() + 1e-14);
            }
            let fx = fidelity(
                &s.to_representation(Representation::KineticX).into(),
                &pos.to_representation(Representation::KineticX).into(),
            ).unwrap();
            prop_assert!((fx - f).abs() < 1e-12);
        }
    }
}
