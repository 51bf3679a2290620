//! Run configuration: TOML parsing, presets and aggregated validation.

use std::f64::consts::PI;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::field::FieldKind;
use crate::grid::{Boundary, GridSpec, Window};
use crate::params::PhysicalParams;
use crate::propagator::{step_count, Backend, Equation};
use crate::protocol::DriveProtocol;
use crate::spin::Representation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    Fig1,
    Fig2,
    Custom,
}

impl std::str::FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fig1" => Ok(Preset::Fig1),
            "fig2" => Ok(Preset::Fig2),
            "custom" => Ok(Preset::Custom),
            _ => Err(format!("unknown preset {s:?} (expected fig1, fig2 or custom)")),
        }
    }
}

/// Where the fast-forward potential comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Synthesis {
    /// General solver applied to the closed-form eigenstate family.
    #[default]
    General,
    /// Printed closed-form potentials.
    ClosedForm,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProtocolConfig {
    Sinusoidal {
        #[serde(default = "one")]
        tau: f64,
    },
    LinearRamp {
        tau: f64,
        from: f64,
        to: f64,
    },
    Table {
        times: Vec<f64>,
        alpha: Vec<f64>,
        #[serde(default)]
        alpha_dot: Option<Vec<f64>>,
    },
}

fn one() -> f64 {
    1.0
}

impl ProtocolConfig {
    pub fn build(&self) -> Result<DriveProtocol> {
        match self {
            ProtocolConfig::Sinusoidal { tau } => DriveProtocol::sinusoidal(*tau),
            ProtocolConfig::LinearRamp { tau, from, to } => DriveProtocol::linear_ramp(*tau, *from, *to),
            ProtocolConfig::Table { times, alpha, alpha_dot } => {
                DriveProtocol::table(times.clone(), alpha.clone(), alpha_dot.clone())
            }
        }
    }
}

/// Pass/fail limits checked by the runner.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Thresholds {
    pub fidelity: f64,
    pub flatness: f64,
    /// Required ratio of unperturbed to fast-forward flatness.
    pub contrast: f64,
    pub pair_ff: f64,
    pub pair_unperturbed: f64,
    pub norm_drift: f64,
    /// Largest synthesized potential allowed at `t = 0` and `t = tau`.
    pub boundary: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Self {
            fidelity: 0.999,
            flatness: 1e-3,
            contrast: 10.0,
            pair_ff: 1e-6,
            pair_unperturbed: 1e-4,
            norm_drift: 1e-8,
            boundary: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    x_min: Option<f64>,
    x_max: Option<f64>,
    n_points: Option<usize>,
    boundary: Option<Boundary>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    mass: Option<f64>,
    light_speed: Option<f64>,
    hbar: Option<f64>,
    kappa: Option<f64>,
}

/// Configuration file as written by the user. Every field is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    preset: Option<Preset>,
    equation: Option<Equation>,
    kind: Option<FieldKind>,
    representation: Option<Representation>,
    backend: Option<Backend>,
    dt: Option<f64>,
    fd_order: Option<usize>,
    output_dir: Option<PathBuf>,
    synthesis: Option<Synthesis>,
    params: Option<RawParams>,
    grid: Option<RawGrid>,
    window: Option<Window>,
    protocol: Option<ProtocolConfig>,
    thresholds: Option<Thresholds>,
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub preset: Option<Preset>,
    pub backend: Option<Backend>,
    pub dt: Option<f64>,
    pub grid_n: Option<usize>,
    pub output_dir: Option<PathBuf>,
}

/// Fully validated run configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub preset: Preset,
    pub equation: Equation,
    pub kind: FieldKind,
    pub representation: Representation,
    pub params: PhysicalParams,
    pub grid: GridSpec,
    pub window: Window,
    pub protocol: ProtocolConfig,
    pub backend: Backend,
    pub dt: f64,
    pub steps: usize,
    pub fd_order: usize,
    pub output_dir: PathBuf,
    pub synthesis: Synthesis,
    pub thresholds: Thresholds,
}

impl RunConfig {
    pub fn drive(&self) -> Result<DriveProtocol> {
        self.protocol.build()
    }
}

/// One validation failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfigIssue {
    pub field: String,
    pub message: String,
}

/// All validation failures of a configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, thiserror::Error)]
pub struct ConfigError {
    pub issues: Vec<ConfigIssue>,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} configuration error(s)", self.issues.len())?;
        for i in &self.issues {
            write!(f, "\n  {}: {}", i.field, i.message)?;
        }
        Ok(())
    }
}

struct Issues(Vec<ConfigIssue>);

impl Issues {
    fn push(&mut self, field: &str, message: impl Into<String>) {
        self.0.push(ConfigIssue {
            field: field.into(),
            message: message.into(),
        });
    }
}

/// Defaults a preset fixes or suggests.
struct PresetDefaults {
    kind: FieldKind,
    grid: GridSpec,
    window: Option<Window>,
    backend: Backend,
}

fn preset_defaults(p: Preset) -> Option<PresetDefaults> {
    match p {
        Preset::Fig1 => Some(PresetDefaults {
            kind: FieldKind::Homogeneous,
            grid: GridSpec {
                x_min: -16.0 * PI,
                x_max: 16.0 * PI,
                n_points: 1024,
                boundary: Boundary::Periodic,
            },
            window: None,
            backend: Backend::SpectralSplitStep,
        }),
        Preset::Fig2 => Some(PresetDefaults {
            kind: FieldKind::Linear,
            grid: GridSpec {
                x_min: -8.0,
                x_max: 8.0,
                n_points: 1024,
                boundary: Boundary::Bounded,
            },
            window: Some(Window { lo: -4.0, hi: 4.0 }),
            backend: Backend::CrankNicolson,
        }),
        Preset::Custom => None,
    }
}

/// Steps per unit `tau` used when no `dt` is given.
pub const DEFAULT_STEPS: usize = 4096;

/// Parses and validates TOML text.
pub fn validate_config(text: &str) -> std::result::Result<RunConfig, ConfigError> {
    validate_with(text, &Overrides::default())
}

pub fn validate_with(text: &str, overrides: &Overrides) -> std::result::Result<RunConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError {
        issues: vec![ConfigIssue {
            field: "<toml>".into(),
            message: e.to_string().trim().to_string(),
        }],
    })?;
    resolve(raw, overrides)
}

pub fn resolve(raw: RawConfig, ov: &Overrides) -> std::result::Result<RunConfig, ConfigError> {
    let mut issues = Issues(Vec::new());
    let preset = ov.preset.or(raw.preset).unwrap_or(Preset::Custom);
    let defaults = preset_defaults(preset);

    // Presets fix the physical parameters and the field kind.
    let raw_params = raw.params.clone().unwrap_or_default();
    let params = if let Some(d) = &defaults {
        let fixed = PhysicalParams::default();
        for (name, given, want) in [
            ("params.mass", raw_params.mass, fixed.mass),
            ("params.light_speed", raw_params.light_speed, fixed.light_speed),
            ("params.hbar", raw_params.hbar, fixed.hbar),
            ("params.kappa", raw_params.kappa, fixed.kappa),
        ] {
            if given.is_some_and(|g| g != want) {
                issues.push(name, format!("fixed to {want} by the preset"));
            }
        }
        if raw.kind.is_some_and(|k| k != d.kind) {
            issues.push("kind", format!("fixed to {:?} by the preset", d.kind));
        }
        if raw.equation.is_some_and(|e| e != Equation::Dirac) {
            issues.push("equation", "presets run the Dirac equation");
        }
        fixed
    } else {
        let d = PhysicalParams::default();
        PhysicalParams {
            mass: raw_params.mass.unwrap_or(d.mass),
            light_speed: raw_params.light_speed.unwrap_or(d.light_speed),
            hbar: raw_params.hbar.unwrap_or(d.hbar),
            kappa: raw_params.kappa.unwrap_or(d.kappa),
        }
    };
    if let Err(e) = params.validate() {
        issues.push("params", e.to_string());
    }

    let kind = match (&defaults, raw.kind) {
        (Some(d), _) => d.kind,
        (None, Some(k)) => k,
        (None, None) => {
            issues.push("kind", "required for custom runs");
            FieldKind::Homogeneous
        }
    };
    let equation = raw.equation.unwrap_or(Equation::Dirac);
    if equation == Equation::Schrodinger && params.mass <= 0.0 {
        issues.push("params.mass", "Schrödinger runs need m > 0");
    }

    let rg = raw.grid.clone().unwrap_or_default();
    let base = defaults.as_ref().map(|d| d.grid);
    let grid = match (rg.x_min.or(base.map(|g| g.x_min)), rg.x_max.or(base.map(|g| g.x_max))) {
        (Some(lo), Some(hi)) => Some(GridSpec {
            x_min: lo,
            x_max: hi,
            n_points: ov.grid_n.or(rg.n_points).or(base.map(|g| g.n_points)).unwrap_or(1024),
            boundary: rg.boundary.or(base.map(|g| g.boundary)).unwrap_or(Boundary::Periodic),
        }),
        _ => {
            issues.push("grid", "x_min and x_max are required for custom runs");
            None
        }
    };
    if let Some(g) = &grid {
        if let Err(e) = g.validate() {
            issues.push("grid", e.to_string());
        } else if let Err(e) = g.check_lattice_wavenumber(params.kappa) {
            issues.push("params.kappa", e.to_string());
        }
    }

    let backend = ov
        .backend
        .or(raw.backend)
        .or(defaults.as_ref().map(|d| d.backend))
        .unwrap_or(match grid.map(|g| g.boundary) {
            Some(Boundary::Bounded) => Backend::CrankNicolson,
            _ => Backend::SpectralSplitStep,
        });
    if let Some(g) = &grid {
        match backend {
            Backend::SpectralSplitStep => {
                if !g.is_periodic() {
                    issues.push("backend", "the spectral backend needs a periodic grid");
                } else if !g.n_points.is_power_of_two() {
                    issues.push(
                        "grid.n_points",
                        format!(
                            "{} is not a power of two; nearest is {}",
                            g.n_points,
                            nearest_power_of_two(g.n_points)
                        ),
                    );
                }
                if equation == Equation::Schrodinger && kind == FieldKind::Linear {
                    issues.push("backend", "spectral Schrödinger runs support only the homogeneous field");
                }
            }
            Backend::CrankNicolson => {
                if g.is_periodic() {
                    issues.push("backend", "the Crank-Nicolson backend needs a bounded grid");
                }
            }
            Backend::ModeOde => {
                if kind != FieldKind::Homogeneous || equation != Equation::Dirac || !g.is_periodic() {
                    issues.push(
                        "backend",
                        "the mode integrator needs a homogeneous Dirac run on a periodic grid",
                    );
                }
            }
        }
    }
    let fd_order = raw.fd_order.unwrap_or(6);
    if ![2, 4, 6].contains(&fd_order) {
        issues.push("fd_order", format!("{fd_order} not in {{2, 4, 6}}"));
    }

    let protocol = raw.protocol.clone().unwrap_or(ProtocolConfig::Sinusoidal { tau: 1.0 });
    let tau = match protocol.build() {
        Ok(p) => Some(p.duration()),
        Err(e) => {
            issues.push("protocol", e.to_string());
            None
        }
    };
    let dt = ov.dt.or(raw.dt);
    let (dt, steps) = match (tau, dt) {
        (Some(tau), Some(dt)) => match step_count(tau, dt) {
            Ok(n) => (dt, n),
            Err(e) => {
                issues.push("dt", e.to_string());
                (dt, 0)
            }
        },
        (Some(tau), None) => (tau / DEFAULT_STEPS as f64, DEFAULT_STEPS),
        (None, dt) => (dt.unwrap_or(f64::NAN), 0),
    };

    let window = match (raw.window, defaults.as_ref().and_then(|d| d.window), grid) {
        (Some(w), _, _) | (None, Some(w), _) => w,
        (None, None, Some(g)) if g.is_periodic() => Window::whole(&g),
        (None, None, Some(g)) => Window::central(&g, 0.5),
        (None, None, None) => Window { lo: 0.0, hi: 0.0 },
    };
    if let Some(g) = &grid {
        if !(window.lo < window.hi) || window.indices(g).is_empty() {
            issues.push("window", format!("[{}, {}] holds no grid points", window.lo, window.hi));
        }
    }

    let thresholds = raw.thresholds.unwrap_or_default();
    if !issues.0.is_empty() {
        return Err(ConfigError { issues: issues.0 });
    }
    Ok(RunConfig {
        preset,
        equation,
        kind,
        representation: raw.representation.unwrap_or(Representation::KineticZ),
        params,
        grid: grid.expect("checked above"),
        window,
        protocol,
        backend,
        dt,
        steps,
        fd_order,
        output_dir: ov
            .output_dir
            .clone()
            .or(raw.output_dir)
            .unwrap_or_else(|| PathBuf::from("out")),
        synthesis: raw.synthesis.unwrap_or_default(),
        thresholds,
    })
}

fn nearest_power_of_two(n: usize) -> usize {
    let up = n.next_power_of_two();
    let down = up / 2;
    if down > 0 && n - down < up - n {
        down
    } else {
        up
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_preset_has_documented_defaults() {
        let c = validate_config("preset = \"fig1\"").unwrap();
        assert_eq!(c.kind, FieldKind::Homogeneous);
        assert_eq!(c.grid.n_points, 1024);
        assert!((c.grid.length() - 32.0 * PI).abs() < 1e-12);
        assert_eq!(c.backend, Backend::SpectralSplitStep);
        assert_eq!(c.steps, 4096);
        assert_eq!(c.dt, 1.0 / 4096.0);
        assert_eq!(c.window, Window::whole(&c.grid));

        let c = validate_config("preset = \"fig2\"").unwrap();
        assert_eq!(c.kind, FieldKind::Linear);
        assert_eq!(c.backend, Backend::CrankNicolson);
        assert_eq!(c.window, Window { lo: -4.0, hi: 4.0 });
    }

    #[test]
    fn off_lattice_kappa_names_nearest_value() {
        let text = "kind = \"homogeneous\"\n[grid]\nx_min = -3.141592653589793\nx_max = 3.141592653589793\nn_points = 64\n[params]\nkappa = 1.3\n";
        let e = validate_config(text).unwrap_err();
        assert_eq!(e.issues.len(), 1);
        assert_eq!(e.issues[0].field, "params.kappa");
        assert!(e.issues[0].message.contains("nearest lattice value is 1"), "{e}");
    }

    #[test]
    fn bad_dt_suggests_correction() {
        let e = validate_config("preset = \"fig1\"\ndt = 0.3").unwrap_err();
        assert_eq!(e.issues[0].field, "dt");
        assert!(e.issues[0].message.contains("0.333"));
    }

    #[test]
    fn errors_are_aggregated() {
        let text = "preset = \"fig1\"\nkind = \"linear\"\nbackend = \"cn\"\ndt = 0.3\nfd_order = 5\n[params]\nmass = 2.0\n";
        let e = validate_config(text).unwrap_err();
        let fields: Vec<&str> = e.issues.iter().map(|i| i.field.as_str()).collect();
        for f in ["params.mass", "kind", "backend", "fd_order", "dt"] {
            assert!(fields.contains(&f), "{fields:?}");
        }
    }

    #[test]
    fn protocol_override_is_allowed() {
        let text = "preset = \"fig1\"\n[protocol]\ntype = \"linear_ramp\"\ntau = 1.0\nfrom = 1.0\nto = 2.0\n";
        let c = validate_config(text).unwrap();
        let p = c.drive().unwrap();
        assert!(!p.flat_end);
    }

    #[test]
    fn overrides_apply() {
        let ov = Overrides {
            preset: Some(Preset::Fig1),
            grid_n: Some(256),
            dt: Some(1.0 / 512.0),
            ..Default::default()
        };
        let c = validate_with("", &ov).unwrap();
        assert_eq!((c.grid.n_points, c.steps), (256, 512));
        let ov = Overrides {
            preset: Some(Preset::Fig1),
            grid_n: Some(1000),
            ..Default::default()
        };
        let e = validate_with("", &ov).unwrap_err();
        assert!(e.issues[0].message.contains("nearest is 1024"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(validate_config("presett = \"fig1\"").is_err());
    }
}
