use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use ffdirac::config::{validate_with, ConfigError, Overrides, Preset, RunConfig};
use ffdirac::propagator::Backend;
use ffdirac::runner::{self, RunError};

/// Fast-forward driving of Dirac and Schrödinger wave packets.
#[derive(Parser)]
#[command(name = "ffdirac", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the unperturbed and fast-forward evolutions and write outputs.
    Run(Common),
    /// Check a configuration and print the resolved form.
    Validate(Common),
    /// Measure the temporal convergence order of the fast-forward run.
    Convergence {
        #[command(flatten)]
        common: Common,
        /// Number of step sizes, halving from `dt * 2^(levels-1)` down to `dt`.
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BackendArg {
    Spectral,
    Cn,
}

#[derive(Args)]
struct Common {
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(Preset))]
    preset: Option<Preset>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    backend: Option<BackendArg>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    grid_n: Option<usize>,
}

const EXIT_FAILED_CHECKS: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_RUNTIME: u8 = 3;

fn fail(kind: &str, message: String, issues: serde_json::Value) -> ExitCode {
    let record = json!({ "error": { "kind": kind, "message": message, "issues": issues } });
    eprintln!("{record}");
    ExitCode::from(if kind == "config" { EXIT_CONFIG } else { EXIT_RUNTIME })
}

fn config_failure(e: ConfigError) -> ExitCode {
    let issues = serde_json::to_value(&e.issues).unwrap_or_default();
    fail("config", e.to_string(), issues)
}

fn run_failure(e: RunError) -> ExitCode {
    let kind = match e {
        RunError::Simulation(_) => "simulation",
        _ => "io",
    };
    fail(kind, e.to_string(), json!([]))
}

fn load(c: &Common) -> Result<RunConfig, ExitCode> {
    let text = match &c.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| fail("io", format!("cannot read {}: {e}", path.display()), json!([])))?,
        None => String::new(),
    };
    let overrides = Overrides {
        preset: c.preset,
        backend: c.backend.map(|b| match b {
            BackendArg::Spectral => Backend::SpectralSplitStep,
            BackendArg::Cn => Backend::CrankNicolson,
        }),
        dt: c.dt,
        grid_n: c.grid_n,
        output_dir: c.out.clone(),
    };
    validate_with(&text, &overrides).map_err(config_failure)
}

fn configure_threads() -> Result<(), ExitCode> {
    let Ok(v) = std::env::var("RUNNER_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| fail("config", format!("RUNNER_THREADS must be a positive integer, got {v:?}"), json!([])))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| fail("runtime", e.to_string(), json!([])))
}

fn execute(cli: Cli) -> Result<ExitCode, ExitCode> {
    configure_threads()?;
    match cli.command {
        Command::Validate(c) => {
            let cfg = load(&c)?;
            println!("{}", serde_json::to_string_pretty(&cfg).expect("config serializes"));
            Ok(ExitCode::SUCCESS)
        }
        Command::Run(c) => {
            let cfg = load(&c)?;
            let report = runner::run(&cfg).map_err(run_failure)?;
            runner::write_outputs(&report, &cfg.output_dir).map_err(run_failure)?;
            for check in &report.summary.checks {
                let value = check.value.map_or("n/a".to_string(), |v| format!("{v:.3e}"));
                let tag = if check.passed { "pass" } else { "FAIL" };
                println!("{tag} {} = {value} ({} {:e})", check.name, check.comparison, check.threshold);
            }
            println!("outputs written to {}", cfg.output_dir.display());
            Ok(if report.summary.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAILED_CHECKS)
            })
        }
        Command::Convergence { common, levels } => {
            let cfg = load(&common)?;
            let report = runner::convergence(&cfg, levels).map_err(run_failure)?;
            std::fs::create_dir_all(&cfg.output_dir)
                .and_then(|_| {
                    std::fs::write(
                        cfg.output_dir.join("convergence.json"),
                        serde_json::to_string_pretty(&report).expect("report serializes") + "\n",
                    )
                })
                .map_err(|e| run_failure(e.into()))?;
            match report.order {
                Some(o) => println!("observed order {o:.3}"),
                None => println!("errors are not monotone; no order reported"),
            }
            let ok = report.order.is_some_and(|o| (o - 2.0).abs() <= 0.2);
            Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAILED_CHECKS) })
        }
    }
}

fn main() -> ExitCode {
    execute(Cli::parse()).unwrap_or_else(|code| code)
}
