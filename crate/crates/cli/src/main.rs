mod commands;
mod format;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use geneuler::{Error, Tolerances};
use serde::de::DeserializeOwned;
use serde::Serialize;

use commands::Trajectory;

/// Minimum-length generalized Euler angle factorizations and bang-bang
/// control synthesis. Reads one JSON document, writes one result.
#[derive(Debug, Parser)]
#[command(name = "geneuler", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Read the request from this file instead of standard input.
    #[arg(long, global = true)]
    input: Option<PathBuf>,

    /// Base tolerance; every internal tolerance scales with it.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reduce a generator pair to canonical form: {z1, z2}.
    Canonicalize,
    /// Ladder sequences for a canonical pair: {rho}.
    Sequence,
    /// Minimum factor count: {target, rho} or {target, z1, z2}.
    MinCount,
    /// Minimum-length factorization: {target, rho} or {target, z1, z2}.
    Factor,
    /// Sign-exact SU(2) factorization: {target, z1, z2}.
    LiftSu2,
    /// Bang-bang schedule: {system, target, group?}.
    Synthesize,
    /// Exact propagation of a schedule: {system, schedule, x0, samples_per_segment}.
    Simulate {
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
    /// South Pole path under a factorization or a schedule.
    SpherePath {
        #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
        format: OutputFormat,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug)]
pub enum CliError {
    Malformed(String),
    Core(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        Self::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Malformed(_) | Self::Core(Error::InvalidInput(_)) => 2,
            Self::Core(Error::DependentGenerators | Error::NotControllableWithTwoLevels) => 3,
            Self::Core(Error::InternalSolverFailure(_)) => 4,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            Self::Malformed(_) => "MalformedInput",
            Self::Core(Error::InvalidInput(_)) => "InvalidInput",
            Self::Core(Error::DependentGenerators) => "DependentGenerators",
            Self::Core(Error::NotControllableWithTwoLevels) => "NotControllableWithTwoLevels",
            Self::Core(Error::InternalSolverFailure(_)) => "InternalSolverFailure",
        }
    }

    fn message(&self) -> String {
        match self {
            Self::Malformed(m) => m.clone(),
            Self::Core(e) => e.to_string(),
        }
    }
}

#[derive(Serialize)]
struct Diagnostic {
    error: &'static str,
    message: String,
    exit_code: u8,
}

fn read_input(path: Option<&PathBuf>) -> Result<String, CliError> {
    match path {
        Some(p) => {
            fs::read_to_string(p).map_err(|e| CliError::Malformed(format!("{}: {e}", p.display())))
        }
        None => {
            let mut s = String::new();
            io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| CliError::Malformed(e.to_string()))?;
            Ok(s)
        }
    }
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Malformed(e.to_string()))
}

fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut s = format::to_json(value).map_err(|e| CliError::Malformed(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn render_trajectory(t: &Trajectory, fmt: OutputFormat) -> Result<String, CliError> {
    match fmt {
        OutputFormat::Json => json(t),
        OutputFormat::Csv => {
            let mut out = String::from("t,x,y,z\n");
            for row in &t.trajectory {
                let cells: Vec<_> = row.iter().map(|v| format::format_f64(*v)).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
            Ok(out)
        }
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    if !(cli.tol.is_finite() && cli.tol > 0.0) {
        return Err(CliError::Malformed(
            "--tol must be positive and finite".into(),
        ));
    }
    let tol = Tolerances::scaled(cli.tol / Tolerances::default().snap);
    let text = read_input(cli.input.as_ref())?;
    match &cli.command {
        Command::Canonicalize => json(&commands::canonicalize_cmd(parse(&text)?, &tol)?),
        Command::Sequence => json(&commands::sequence_cmd(parse(&text)?)?),
        Command::MinCount => json(&commands::min_count_cmd(parse(&text)?, &tol)?),
        Command::Factor => json(&commands::factor_cmd(parse(&text)?, &tol)?),
        Command::LiftSu2 => json(&commands::lift_su2_cmd(parse(&text)?, &tol)?),
        Command::Synthesize => json(&commands::synthesize_cmd(parse(&text)?, &tol)?),
        Command::Simulate { format } => {
            render_trajectory(&commands::simulate_cmd(parse(&text)?, &tol)?, *format)
        }
        Command::SpherePath { format } => {
            render_trajectory(&commands::sphere_path_cmd(parse(&text)?, &tol)?, *format)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            if stdout
                .write_all(out.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = e.exit_code();
            let diag = Diagnostic {
                error: e.kind(),
                message: e.message(),
                exit_code: code,
            };
            let line = format::to_json(&diag)
                .unwrap_or_else(|_| format!("{{\"error\":\"{}\"}}", e.kind()));
            eprintln!("{line}");
            ExitCode::from(code)
        }
    }
}
