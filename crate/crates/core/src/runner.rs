//! Batch runner: unperturbed and fast-forward evolutions, diagnostics and
//! output files.

use std::fs;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::config::{RunConfig, Synthesis, Thresholds};
use crate::diagnostics::{fidelity, fidelity_window, pair_production, ratio_profile, target_spinor, RatioProfile};
use crate::eigen::{ClosedFormFamily, DiracFamily, NumericFamily, SchrodingerFamily};
use crate::error::Error;
use crate::fastforward::{DiracControl, SchrodingerControl};
use crate::field::{FieldKind, Gauge};
use crate::grid::{GridSpec, Window};
use crate::potential::PotentialMatrix;
use crate::propagator::{
    convergence_order, propagate, Auxiliary, ConvergenceReport, Equation, EvolutionSpec, Trajectory, WaveState,
};
use crate::protocol::DriveProtocol;
use crate::spin::{Branch, Representation};

pub const SCHEMA_VERSION: u32 = 1;

/// Side of the `(x, t)` lattice on which potentials are written.
pub const LATTICE_SIZE: usize = 64;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Simulation(#[from] Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// One threshold comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: Option<f64>,
    pub threshold: f64,
    /// `">="` or `"<="`.
    pub comparison: &'static str,
    pub passed: bool,
}

impl Check {
    fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value: finite(value),
            threshold,
            comparison: ">=",
            passed: value >= threshold,
        }
    }

    fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value: finite(value),
            threshold,
            comparison: "<=",
            passed: value <= threshold,
        }
    }
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShortcutConditions {
    pub flat_start: bool,
    pub flat_end: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Results {
    pub alpha_initial: f64,
    pub alpha_final: f64,
    pub fidelity_ff: f64,
    pub fidelity_unperturbed: f64,
    /// Whether the fidelities are window-restricted.
    pub fidelity_windowed: bool,
    pub flatness_ff: Vec<Option<f64>>,
    pub flatness_unperturbed: Vec<Option<f64>>,
    pub pair_production_ff: Option<f64>,
    pub pair_production_unperturbed: Option<f64>,
    pub norm_drift_ff: f64,
    pub norm_drift_unperturbed: f64,
    pub max_boundary_potential: f64,
    pub shortcut_conditions: ShortcutConditions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub schema_version: u32,
    pub config: RunConfig,
    pub results: Results,
    pub checks: Vec<Check>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub schema_version: u32,
    pub unperturbed_seconds: f64,
    pub ff_seconds: f64,
    pub total_seconds: f64,
}

/// Sample of the relative potential (family representation) and the lab
/// control (run representation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialRow {
    pub t: f64,
    pub x: f64,
    pub relative: PotentialMatrix,
    pub control: PotentialMatrix,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub summary: Summary,
    pub timing: Timing,
    pub unperturbed: RatioProfile,
    pub ff: RatioProfile,
    pub potentials: Vec<PotentialRow>,
}

enum Control {
    Dirac(DiracControl),
    Scalar(SchrodingerControl),
}

impl Control {
    fn auxiliary(&self) -> Auxiliary {
        match self {
            Control::Dirac(c) => Auxiliary::Dirac(Arc::new(c.clone())),
            Control::Scalar(c) => Auxiliary::Scalar(Arc::new(c.clone())),
        }
    }

    fn rows(&self, grid: &GridSpec, times: &[f64]) -> Result<Vec<PotentialRow>, Error> {
        match self {
            Control::Dirac(c) => Ok(c
                .lattice(grid, times)?
                .into_iter()
                .map(|r| PotentialRow {
                    t: r.t,
                    x: r.x,
                    relative: r.relative,
                    control: r.control,
                })
                .collect()),
            Control::Scalar(c) => {
                let mut rows = Vec::new();
                for &t in times {
                    let rel = c.relative(grid, t)?;
                    let ctl = c.control(grid, t)?;
                    for j in 0..grid.n_points {
                        let scalar = |v: f64| PotentialMatrix::new(v, 0.0, 0.0, 0.0);
                        rows.push(PotentialRow {
                            t,
                            x: grid.x(j),
                            relative: scalar(rel[j]),
                            control: scalar(ctl[j]),
                        });
                    }
                }
                Ok(rows)
            }
        }
    }
}

fn dirac_family(cfg: &RunConfig) -> Result<Arc<dyn DiracFamily>, Error> {
    Ok(if cfg.params.mass > 0.0 {
        Arc::new(ClosedFormFamily::new(cfg.kind, cfg.params, Branch::Positive)?)
    } else {
        Arc::new(NumericFamily::new(
            cfg.kind,
            cfg.params,
            Branch::Positive,
            Representation::KineticZ,
        )?)
    })
}

fn build_control(cfg: &RunConfig, protocol: &DriveProtocol) -> Result<Control, Error> {
    Ok(match cfg.equation {
        Equation::Dirac => Control::Dirac(match cfg.synthesis {
            Synthesis::General => DiracControl::from_family(dirac_family(cfg)?, protocol.clone(), cfg.representation),
            Synthesis::ClosedForm => {
                DiracControl::closed_form(cfg.kind, cfg.params, protocol.clone(), cfg.representation)
            }
        }),
        Equation::Schrodinger => Control::Scalar(SchrodingerControl::new(
            SchrodingerFamily::new(cfg.kind, cfg.params)?,
            protocol.clone(),
        )),
    })
}

/// Eigenstate of the lab Hamiltonian in the velocity gauge.
pub fn target_state(cfg: &RunConfig, alpha: f64) -> Result<WaveState, Error> {
    Ok(match cfg.equation {
        Equation::Dirac => target_spinor(
            cfg.kind,
            &cfg.params,
            alpha,
            &cfg.grid,
            Branch::Positive,
            Gauge::Velocity,
            cfg.representation,
        )?
        .into(),
        Equation::Schrodinger => SchrodingerFamily::new(cfg.kind, cfg.params)?
            .in_gauge(Gauge::Velocity)
            .eigenpair(&cfg.grid, alpha)?
            .state
            .into(),
    })
}

fn spec_for(cfg: &RunConfig, protocol: &DriveProtocol) -> EvolutionSpec {
    EvolutionSpec::new(cfg.equation, cfg.kind, cfg.params, protocol.clone(), cfg.backend, cfg.dt)
        .with_representation(cfg.representation)
        .with_fd_order(cfg.fd_order)
}

fn lattice_grid(grid: &GridSpec) -> Result<GridSpec, Error> {
    if grid.is_periodic() {
        GridSpec::periodic(grid.x_min, grid.x_max, LATTICE_SIZE)
    } else {
        GridSpec::bounded(grid.x_min, grid.x_max, LATTICE_SIZE)
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64())
}

fn is_whole(window: &Window, grid: &GridSpec) -> bool {
    window.indices(grid).len() == grid.n_points
}

/// Runs both evolutions and evaluates every threshold.
pub fn run(cfg: &RunConfig) -> Result<RunReport, RunError> {
    let start = Instant::now();
    let protocol = cfg.drive()?;
    let tau = protocol.duration();
    let (alpha0, alpha1) = (protocol.alpha(0.0), protocol.alpha(tau));
    let initial = target_state(cfg, alpha0)?;
    let target = target_state(cfg, alpha1)?;
    let control = build_control(cfg, &protocol)?;

    let plain = spec_for(cfg, &protocol);
    let ff = plain.clone().with_auxiliary(control.auxiliary());
    let ((unpert, t_unpert), (fast, t_ff)) = rayon::join(
        || timed(|| propagate(&initial, &plain)),
        || timed(|| propagate(&initial, &ff)),
    );
    let (unpert, fast): (Trajectory, Trajectory) = (unpert?, fast?);

    let windowed = !is_whole(&cfg.window, &cfg.grid);
    let fid = |s: &WaveState| {
        if windowed {
            fidelity_window(s, &target, &cfg.window)
        } else {
            fidelity(s, &target)
        }
    };
    let fidelity_ff = fid(fast.final_state())?;
    let fidelity_unperturbed = fid(unpert.final_state())?;
    let prof_ff = ratio_profile(fast.final_state(), &target, &cfg.window)?;
    let prof_un = ratio_profile(unpert.final_state(), &target, &cfg.window)?;

    let pairs = |tr: &Trajectory| -> Result<Option<f64>, Error> {
        match (cfg.kind, tr.final_state()) {
            (FieldKind::Homogeneous, WaveState::Dirac(s)) => {
                Ok(Some(pair_production(s, cfg.kind, &cfg.params, alpha1)?))
            }
            _ => Ok(None),
        }
    };
    let (pair_ff, pair_un) = (pairs(&fast)?, pairs(&unpert)?);

    let times: Vec<f64> = (0..LATTICE_SIZE)
        .map(|i| tau * i as f64 / (LATTICE_SIZE - 1) as f64)
        .collect();
    let potentials = control.rows(&lattice_grid(&cfg.grid)?, &times)?;
    let max_boundary = boundary_potential(&control, &cfg.grid, tau)?;

    let results = Results {
        alpha_initial: alpha0,
        alpha_final: alpha1,
        fidelity_ff,
        fidelity_unperturbed,
        fidelity_windowed: windowed,
        flatness_ff: prof_ff.flatness.iter().copied().map(finite).collect(),
        flatness_unperturbed: prof_un.flatness.iter().copied().map(finite).collect(),
        pair_production_ff: pair_ff,
        pair_production_unperturbed: pair_un,
        norm_drift_ff: fast.max_norm_drift(),
        norm_drift_unperturbed: unpert.max_norm_drift(),
        max_boundary_potential: max_boundary,
        shortcut_conditions: ShortcutConditions {
            flat_start: protocol.flat_start,
            flat_end: protocol.flat_end,
        },
    };
    let checks = evaluate(&results, &prof_ff, &prof_un, &cfg.thresholds);
    let passed = checks.iter().all(|c| c.passed);
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        results,
        checks,
        passed,
    };
    Ok(RunReport {
        summary,
        timing: Timing {
            schema_version: SCHEMA_VERSION,
            unperturbed_seconds: t_unpert,
            ff_seconds: t_ff,
            total_seconds: start.elapsed().as_secs_f64(),
        },
        unperturbed: prof_un,
        ff: prof_ff,
        potentials,
    })
}

/// Largest component of the relative potential and the control at `t = 0`
/// and `t = tau`, over the run grid.
fn boundary_potential(control: &Control, grid: &GridSpec, tau: f64) -> Result<f64, Error> {
    let rows = control.rows(grid, &[0.0, tau])?;
    Ok(rows
        .iter()
        .map(|r| r.relative.max_abs().max(r.control.max_abs()))
        .fold(0.0, f64::max))
}

fn evaluate(r: &Results, ff: &RatioProfile, un: &RatioProfile, th: &Thresholds) -> Vec<Check> {
    let mut checks = vec![
        Check::at_least("fidelity_ff", r.fidelity_ff, th.fidelity),
        Check::at_most("norm_drift_ff", r.norm_drift_ff, th.norm_drift),
        Check::at_most("norm_drift_unperturbed", r.norm_drift_unperturbed, th.norm_drift),
        Check::at_most("max_boundary_potential", r.max_boundary_potential, th.boundary),
    ];
    for (i, (f, u)) in ff.flatness.iter().zip(&un.flatness).enumerate() {
        checks.push(Check::at_most(&format!("flatness_ff_{}", i + 1), *f, th.flatness));
        checks.push(Check::at_least(
            &format!("flatness_contrast_{}", i + 1),
            u / f,
            th.contrast,
        ));
    }
    if let (Some(pf), Some(pu)) = (r.pair_production_ff, r.pair_production_unperturbed) {
        checks.push(Check::at_most("pair_production_ff", pf, th.pair_ff));
        checks.push(Check::at_least("pair_production_unperturbed", pu, th.pair_unperturbed));
    }
    let sc = &r.shortcut_conditions;
    checks.push(Check {
        name: "shortcut_conditions".into(),
        value: Some(if sc.flat_start && sc.flat_end { 1.0 } else { 0.0 }),
        threshold: 1.0,
        comparison: ">=",
        passed: sc.flat_start && sc.flat_end,
    });
    checks
}

pub const RATIO_COLUMNS: [&str; 9] = [
    "x",
    "re_unperturbed_1",
    "im_unperturbed_1",
    "re_unperturbed_2",
    "im_unperturbed_2",
    "re_ff_1",
    "im_ff_1",
    "re_ff_2",
    "im_ff_2",
];

pub const POTENTIAL_COLUMNS: [&str; 10] = [
    "t",
    "x",
    "v_t",
    "v_e",
    "v_p",
    "v_s",
    "control_v_t",
    "control_v_e",
    "control_v_p",
    "control_v_s",
];

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn ratio_at(p: &RatioProfile, c: usize, j: usize) -> C64 {
    p.ratios
        .get(c)
        .map(|r| r[j])
        .unwrap_or(C64::new(f64::NAN, f64::NAN))
}

/// Writes `ratios.csv`, `potentials.csv`, `summary.json` and `timing.json`.
pub fn write_outputs(report: &RunReport, dir: &Path) -> Result<(), RunError> {
    fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("ratios.csv"))?;
    w.write_record(RATIO_COLUMNS)?;
    for (j, x) in report.ff.x.iter().enumerate() {
        let mut rec = vec![num(*x)];
        for p in [&report.unperturbed, &report.ff] {
            for c in 0..2 {
                let r = ratio_at(p, c, j);
                rec.push(num(r.re));
                rec.push(num(r.im));
            }
        }
        w.write_record(&rec)?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("potentials.csv"))?;
    w.write_record(POTENTIAL_COLUMNS)?;
    for r in &report.potentials {
        let mut rec = vec![num(r.t), num(r.x)];
        for m in [r.relative, r.control] {
            rec.extend([m.v_t, m.v_e, m.v_p, m.v_s].map(num));
        }
        w.write_record(&rec)?;
    }
    w.flush()?;

    fs::write(
        dir.join("summary.json"),
        serde_json::to_string_pretty(&report.summary)? + "\n",
    )?;
    fs::write(
        dir.join("timing.json"),
        serde_json::to_string_pretty(&report.timing)? + "\n",
    )?;
    Ok(())
}

/// Temporal convergence of the fast-forward run over
/// `dt * 2^k, k = levels - 1, .., 0`.
pub fn convergence(cfg: &RunConfig, levels: usize) -> Result<ConvergenceReport, RunError> {
    let protocol = cfg.drive()?;
    let initial = target_state(cfg, protocol.alpha(0.0))?;
    let control = build_control(cfg, &protocol)?;
    let spec = spec_for(cfg, &protocol).with_auxiliary(control.auxiliary());
    let dts: Vec<f64> = (0..levels.max(3))
        .rev()
        .map(|k| cfg.dt * (1u64 << k) as f64)
        .collect();
    Ok(convergence_order(&initial, &spec, &dts)?)
}
