use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use super::*;
use crate::eigen::{dirac_eigenspinor_closed_form, ClosedFormFamily, DiracFamily, SchrodingerFamily};
use crate::fastforward::DiracControl;
use crate::spin::Branch;

/// Unperturbed negative-branch population at `tau` for the standard
/// sinusoidal protocol, `m = c = hbar = 1`, `kappa = 0`.
const FROZEN_PAIR_BASELINE: f64 = 0.01413323518315706;

fn fig1_params() -> PhysicalParams {
    PhysicalParams::default()
}

fn mode_vector(branch: Branch, alpha: f64) -> [C64; 2] {
    let fam = ClosedFormFamily::new(FieldKind::Homogeneous, fig1_params(), branch).unwrap();
    let u = fam.point(0.0, alpha).unwrap().u;
    [C64::new(u[0], 0.0), C64::new(u[1], 0.0)]
}

fn overlap(a: [C64; 2], b: [C64; 2]) -> C64 {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

fn velocity_eigenstate(kind: FieldKind, grid: &GridSpec, alpha: f64, branch: Branch) -> SpinorField {
    dirac_eigenspinor_closed_form(kind, fig1_params(), alpha, grid, branch)
        .unwrap()
        .to_gauge(Gauge::Velocity)
        .unwrap()
        .spinor
}

#[test]
fn oracle_reproduces_frozen_pair_baseline() {
    let prot = DriveProtocol::sinusoidal(1.0).unwrap();
    let p = fig1_params();
    let a0 = mode_vector(Branch::Positive, prot.alpha(0.0));
    let fin = mode_ode_oracle(&p, &prot, 0.0, Representation::KineticZ, None, a0).unwrap();
    let p_minus = overlap(mode_vector(Branch::Negative, prot.alpha(1.0)), fin).norm_sqr();
    assert!((p_minus - FROZEN_PAIR_BASELINE).abs() < 1e-10, "{p_minus:.17}");

    let ctl = DiracControl::closed_form(FieldKind::Homogeneous, p, prot.clone(), Representation::KineticZ);
    let fin = mode_ode_oracle(&p, &prot, 0.0, Representation::KineticZ, Some(Arc::new(ctl)), a0).unwrap();
    let p_minus = overlap(mode_vector(Branch::Negative, prot.alpha(1.0)), fin).norm_sqr();
    assert!(p_minus <= 1e-10, "{p_minus:e}");
}

#[test]
fn oracle_without_driving_rotates_phase() {
    let p = fig1_params();
    let prot = DriveProtocol::from_fns(1.0, |_| 1.5, |_| 0.0).unwrap();
    let a0 = mode_vector(Branch::Positive, 1.5);
    let fin = mode_ode_oracle(&p, &prot, 0.0, Representation::KineticZ, None, a0).unwrap();
    let e = (1.0f64 + 1.5 * 1.5).sqrt();
    let expect = C64::from_polar(1.0, -e);
    for c in 0..2 {
        assert!((fin[c] - a0[c] * expect).norm() < 1e-10);
    }
}

#[test]
fn stationary_states_only_acquire_phase() {
    let p = fig1_params();
    let alpha = 1.5;
    let prot = DriveProtocol::from_fns(1.0, move |_| alpha, |_| 0.0).unwrap();
    let grid = GridSpec::periodic(-16.0 * PI, 16.0 * PI, 64).unwrap();
    let kind = FieldKind::Homogeneous;
    for backend in [Backend::SpectralSplitStep, Backend::ModeOde] {
        let pair = dirac_eigenspinor_closed_form(kind, p, alpha, &grid, Branch::Positive)
            .unwrap()
            .to_gauge(Gauge::Velocity)
            .unwrap();
        let spec = EvolutionSpec::new(Equation::Dirac, kind, p, prot.clone(), backend, 1.0 / 256.0);
        let tr = propagate(&pair.spinor.clone().into(), &spec).unwrap();
        let fin = tr.final_state().as_dirac().unwrap();
        let ov = pair.spinor.inner(fin).unwrap();
        let expect = C64::from_polar(1.0, -pair.energy);
        assert!((ov - expect).norm() < 1e-8, "{backend:?}: {ov} vs {expect}");
        assert!(tr.max_norm_drift() < 1e-10);
    }
}

#[test]
fn spectral_matches_oracle_per_component() {
    let p = fig1_params();
    let prot = DriveProtocol::sinusoidal(1.0).unwrap();
    let grid = GridSpec::periodic(-16.0 * PI, 16.0 * PI, 64).unwrap();
    let init = velocity_eigenstate(FieldKind::Homogeneous, &grid, 1.0, Branch::Positive);
    for aux in [None, Some(())] {
        let mut spec = EvolutionSpec::new(
            Equation::Dirac,
            FieldKind::Homogeneous,
            p,
            prot.clone(),
            Backend::SpectralSplitStep,
            1.0 / 4096.0,
        );
        let control: Option<Arc<dyn DiracAuxiliary>> = aux.map(|_| {
            Arc::new(DiracControl::closed_form(
                FieldKind::Homogeneous,
                p,
                prot.clone(),
                Representation::KineticZ,
            )) as Arc<dyn DiracAuxiliary>
        });
        if let Some(c) = &control {
            spec = spec.with_auxiliary(Auxiliary::Dirac(c.clone()));
        }
        let tr = propagate(&init.clone().into(), &spec).unwrap();
        let fin = tr.final_state().as_dirac().unwrap();
        let a0 = [init.components[0][0], init.components[1][0]];
        let want = mode_ode_oracle(&p, &prot, 0.0, Representation::KineticZ, control, a0).unwrap();
        for j in [0, 17, 40] {
            for c in 0..2 {
                assert!((fin.components[c][j] - want[c]).norm() < 1e-6 * want[c].norm().max(1e-3));
            }
        }
        assert!(tr.max_norm_drift() < 1e-12);
    }
}

#[test]
fn representations_are_unitarily_equivalent() {
    let p = PhysicalParams::new(1.0, 1.0, 1.0, 0.0).unwrap();
    let prot = DriveProtocol::sinusoidal(1.0).unwrap();
    let grid = GridSpec::bounded(-6.0, 6.0, 256).unwrap();
    let init = velocity_eigenstate(FieldKind::Linear, &grid, 1.0, Branch::Positive);
    let ctl_z = DiracControl::closed_form(FieldKind::Linear, p, prot.clone(), Representation::KineticZ);
    let spec = EvolutionSpec::new(Equation::Dirac, FieldKind::Linear, p, prot.clone(), Backend::CrankNicolson, 1.0 / 128.0)
        .with_auxiliary(Auxiliary::Dirac(Arc::new(ctl_z)));
    let z = propagate(&init.clone().into(), &spec).unwrap();
    let spec_x = spec.clone().with_representation(Representation::KineticX);
    let x = propagate(&init.to_representation(Representation::KineticX).into(), &spec_x).unwrap();
    let back = x.final_state().as_dirac().unwrap().to_representation(Representation::KineticZ);
    let zf = z.final_state().as_dirac().unwrap();
    for c in 0..2 {
        for j in 0..grid.n_points {
            assert!((back.components[c][j] - zf.components[c][j]).norm() < 1e-8);
        }
    }
}

#[test]
fn schrodinger_backends_keep_plane_waves() {
    let p = fig1_params();
    let prot = DriveProtocol::sinusoidal(1.0).unwrap();
    let grid = GridSpec::periodic(-16.0 * PI, 16.0 * PI, 64).unwrap();
    let fam = SchrodingerFamily::new(FieldKind::Homogeneous, p).unwrap().in_gauge(Gauge::Velocity);
    let init = fam.eigenpair(&grid, 1.0).unwrap().state;
    let spec = EvolutionSpec::new(
        Equation::Schrodinger,
        FieldKind::Homogeneous,
        p,
        prot.clone(),
        Backend::SpectralSplitStep,
        1.0 / 64.0,
    );
    let tr = propagate(&init.clone().into(), &spec).unwrap();
    let fin = tr.final_state().as_schrodinger().unwrap();
    // Momentum is conserved: the state stays the same plane wave.
    assert!((init.inner(fin).unwrap().norm() - 1.0).abs() < 1e-12);
}

#[test]
fn crank_nicolson_rejects_unresolved_states() {
    let p = fig1_params();
    let prot = DriveProtocol::sinusoidal(1.0).unwrap();
    let grid = GridSpec::bounded(-8.0, 8.0, 64).unwrap();
    let mut v: Vec<C64> = (0..64).map(|j| C64::new(if j % 2 == 0 { 1.0 } else { -1.0 }, 0.0)).collect();
    v[0] = C64::new(0.0, 0.0);
    let mut s = crate::state::ScalarWavefunction::new(grid, Gauge::Velocity, v).unwrap();
    s.normalize().unwrap();
    let spec = EvolutionSpec::new(
        Equation::Schrodinger,
        FieldKind::Linear,
        p,
        prot,
        Backend::CrankNicolson,
        1.0 / 16.0,
    );
    assert!(matches!(propagate(&s.into(), &spec), Err(Error::Unresolved { .. })));
}

#[test]
fn step_count_suggests_valid_dt() {
    assert_eq!(step_count(1.0, 0.25).unwrap(), 4);
    let e = step_count(1.0, 0.3).unwrap_err().to_string();
    assert!(e.contains("0.333"), "{e}");
}

#[test]
fn spectral_order_is_two() {
    let p = fig1_params();
    let prot = DriveProtocol::sinusoidal(1.0).unwrap();
    let grid = GridSpec::periodic(-16.0 * PI, 16.0 * PI, 32).unwrap();
    let init = velocity_eigenstate(FieldKind::Homogeneous, &grid, 1.0, Branch::Positive);
    let spec = EvolutionSpec::new(
        Equation::Dirac,
        FieldKind::Homogeneous,
        p,
        prot,
        Backend::SpectralSplitStep,
        0.1,
    );
    let r = convergence_order(&init.into(), &spec, &[1.0 / 16.0, 1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0]).unwrap();
    let order = r.order.unwrap();
    assert!((order - 2.0).abs() < 0.2, "{r:?}");
}

#[test]
fn crank_nicolson_order_is_two() {
    let p = fig1_params();
    let prot = DriveProtocol::sinusoidal(1.0).unwrap();
    let grid = GridSpec::bounded(-6.0, 6.0, 256).unwrap();
    let init = velocity_eigenstate(FieldKind::Linear, &grid, 1.0, Branch::Positive);
    let spec = EvolutionSpec::new(Equation::Dirac, FieldKind::Linear, p, prot, Backend::CrankNicolson, 0.1);
    let r = convergence_order(&init.into(), &spec, &[1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0]).unwrap();
    assert!((r.order.unwrap() - 2.0).abs() < 0.2, "{r:?}");
}
