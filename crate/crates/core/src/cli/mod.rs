//! The `relaq` command-line front end.
//!
//! Each subcommand reads a JSON scenario file, validates it, runs it and
//! prints one deterministic report line. Exit codes: 0 success, 1 I/O
//! failure, 2 schema violation (arguments, fields, shapes, scenario rules),
//! 3 numeric contract failure (unitarity, normalization, positivity and
//! errors raised inside the library).

pub mod scenario;
pub mod validate;

use crate::error::Error;
use crate::io::to_report_json;
use crate::policy::{NumericPolicy, POLICY_ENV};
use clap::{Args, Parser, Subcommand, ValueEnum};
use scenario::{execute, Report, ScenarioFile, ScenarioKind, Units};
use serde::Serialize;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use validate::{validate_value, Category, Diagnostic};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "relaq", version, about = "Relational quantum measurement scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a measurement scenario (product or entangled initial state).
    Measure(RunArgs),
    /// Run an EPR sequence experiment or an observer script.
    Epr(RunArgs),
    /// Verify a channel given by Kraus operators or a unitary and environment state.
    Channel(RunArgs),
    /// Report entropies and mutual information of a composite state.
    Report(RunArgs),
    /// Check a scenario file and list every violation.
    Validate {
        /// Scenario file to check.
        path: PathBuf,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Seed overriding any seed in the scenario.
    #[arg(long)]
    seed: Option<u64>,
    /// Output format; csv is available for EPR sequence experiments only.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Entropy units.
    #[arg(long, value_enum, default_value_t = Units::Nats)]
    units: Units,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Serialize)]
struct ValidationOutput<'a> {
    valid: bool,
    diagnostics: &'a [Diagnostic],
}

/// A failure carrying its exit code and the message for stderr.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Shape { .. } | Error::Scenario(_) | Error::Size { .. } => EXIT_INVALID,
            _ => EXIT_NUMERIC,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn load_policy() -> Result<NumericPolicy, Failure> {
    NumericPolicy::from_env().map_err(|e| Failure::invalid(format!("{POLICY_ENV}: {e}")))
}

fn read_json(path: &Path) -> Result<serde_json::Value, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| Failure::invalid(format!("{}: invalid JSON: {e}", path.display())))
}

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), Failure> {
    let line = to_report_json(value).map_err(|e| Failure {
        code: EXIT_NUMERIC,
        message: format!("serialization: {e}"),
    })?;
    writeln!(out, "{line}").map_err(|e| Failure {
        code: EXIT_IO,
        message: format!("stdout: {e}"),
    })
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, Failure> {
    let (expected, args) = match command {
        Command::Validate { path } => {
            let policy = load_policy()?;
            let value = read_json(&path)?;
            let diagnostics = validate_value(&value, &policy);
            emit(
                out,
                &ValidationOutput {
                    valid: diagnostics.is_empty(),
                    diagnostics: &diagnostics,
                },
            )?;
            return Ok(if diagnostics.is_empty() { EXIT_OK } else { EXIT_INVALID });
        }
        Command::Measure(a) => (ScenarioKind::Measure, a),
        Command::Epr(a) => (ScenarioKind::Epr, a),
        Command::Channel(a) => (ScenarioKind::Channel, a),
        Command::Report(a) => (ScenarioKind::EntropyReport, a),
    };
    let policy = load_policy()?;
    let value = read_json(&args.scenario)?;
    let diagnostics = validate_value(&value, &policy);
    // schema problems are reported ahead of numeric ones
    let worst = diagnostics
        .iter()
        .find(|d| d.category == Category::Schema)
        .or_else(|| diagnostics.first());
    if let Some(d) = worst {
        let code = match d.category {
            Category::Schema => EXIT_INVALID,
            Category::Contract => EXIT_NUMERIC,
        };
        return Err(Failure {
            code,
            message: d.to_string(),
        });
    }
    let file: ScenarioFile = serde_json::from_value(value).map_err(|e| Failure::invalid(format!("scenario: {e}")))?;
    if file.kind != expected {
        return Err(Failure::invalid(format!(
            "kind: scenario is \"{}\" but the subcommand expects \"{}\"",
            file.kind.name(),
            expected.name()
        )));
    }
    let report = execute(&file, args.seed, args.units, &policy)?;
    match (args.format, &report) {
        (Format::Csv, Report::Sequence(seq)) => {
            let text = seq.to_csv()?;
            out.write_all(text.as_bytes()).map_err(|e| Failure {
                code: EXIT_IO,
                message: format!("stdout: {e}"),
            })?;
        }
        (Format::Csv, _) => {
            return Err(Failure::invalid("format: csv output is only available for EPR sequence experiments"));
        }
        (Format::Json, Report::Measure(r)) => emit(out, r)?,
        (Format::Json, Report::Sequence(r)) => emit(out, r)?,
        (Format::Json, Report::Script(r)) => emit(out, r)?,
        (Format::Json, Report::Channel(r)) => emit(out, r)?,
        (Format::Json, Report::Entropy(r)) => emit(out, r)?,
    }
    Ok(EXIT_OK)
}
