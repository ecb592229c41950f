//! Argument parsing and command dispatch. [`run`] returns the process
//! output instead of printing it, so tests can drive the CLI in-process.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::cases::run_paper_cases;
use crate::checks::{run_checks, TolerancePolicy};
use crate::config::Scenario;
use crate::report::Report;
use crate::sweep::{sweep_rows, to_csv};

/// Fallback directory for relative config paths that do not exist under the
/// working directory.
pub const CONFIG_DIR_ENV: &str = "ONTIC_CONFIG_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "ontic",
    version,
    about = "Epistemic-state scenarios for qubits: case reproduction, config checks, entropy sweeps"
)]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Seed for sampled contexts; overrides the config's `seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Tolerance for checks that do not set their own.
    #[arg(long, global = true, value_parser = positive_float)]
    pub tol: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Reproduce cases A–D and the overlap demonstrations against golden values.
    PaperCases,
    /// Run every check in a scenario config.
    Verify { config: PathBuf },
    /// Tabulate entropy and eigen-axis drift along the mixture of two preparations (always CSV).
    Sweep {
        prep1: String,
        prep2: String,
        #[arg(long, default_value_t = 101)]
        steps: usize,
        /// Output file; `-` or absent writes to stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scenario whose preparations and seed are used.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Sampled contexts per row for the minimum context entropy.
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

fn positive_float(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got `{s}`")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Self {
            exit_code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn usage(message: String) -> Self {
        Self {
            exit_code: EXIT_USAGE,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

fn render(report: &Report, format: Format) -> Outcome {
    let stdout = match format {
        Format::Table => report.to_table(),
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    Outcome {
        exit_code: if report.all_passed() {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        },
        stdout,
        stderr: String::new(),
    }
}

pub fn resolve_config_path(path: &Path, config_dir: Option<&Path>) -> PathBuf {
    match config_dir {
        Some(dir) if path.is_relative() && !path.exists() => dir.join(path),
        _ => path.to_path_buf(),
    }
}

fn load(path: &Path, config_dir: Option<&Path>) -> Result<Scenario, String> {
    let resolved = resolve_config_path(path, config_dir);
    Scenario::load(&resolved).map_err(|e| format!("config `{}`: {e}", resolved.display()))
}

pub fn execute(cli: Cli, config_dir: Option<&Path>) -> Outcome {
    match cli.command {
        Command::PaperCases => render(&run_paper_cases(cli.seed.unwrap_or(0)), cli.format),
        Command::Verify { config } => {
            let mut scenario = match load(&config, config_dir) {
                Ok(s) => s,
                Err(e) => return Outcome::usage(e),
            };
            if let Some(seed) = cli.seed {
                scenario.seed = seed;
            }
            let policy = TolerancePolicy {
                cli: cli.tol,
                scenario: scenario.tolerances,
            };
            let records = run_checks(&scenario, &policy);
            render(&Report::new("verify", scenario.seed, records), cli.format)
        }
        Command::Sweep {
            prep1,
            prep2,
            steps,
            out,
            config,
            samples,
        } => {
            let mut scenario = match config {
                Some(path) => match load(&path, config_dir) {
                    Ok(s) => s,
                    Err(e) => return Outcome::usage(e),
                },
                None => Scenario::builtin(),
            };
            if let Some(seed) = cli.seed {
                scenario.seed = seed;
            }
            if samples == 0 {
                return Outcome::usage("--samples must be at least 1".into());
            }
            let (r1, r2) = match (
                scenario.preparation(&prep1, "prep1"),
                scenario.preparation(&prep2, "prep2"),
            ) {
                (Ok(a), Ok(b)) => (a.density.clone(), b.density.clone()),
                (Err(e), _) | (_, Err(e)) => return Outcome::usage(e.to_string()),
            };
            let rows = match sweep_rows(&r1, &r2, steps, scenario.seed, samples) {
                Ok(rows) => rows,
                Err(e) => return Outcome::usage(e),
            };
            let text = to_csv(&rows);
            match out {
                Some(path) if path.as_os_str() != "-" => match std::fs::write(&path, text) {
                    Ok(()) => Outcome {
                        exit_code: EXIT_OK,
                        stdout: String::new(),
                        stderr: format!("wrote {} rows to {}\n", rows.len(), path.display()),
                    },
                    Err(e) => Outcome::usage(format!("cannot write `{}`: {e}", path.display())),
                },
                _ => Outcome::ok(text),
            }
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, config_dir: Option<&Path>) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli, config_dir),
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            if code == 0 {
                Outcome::ok(text)
            } else {
                Outcome {
                    exit_code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            }
        }
    }
}
