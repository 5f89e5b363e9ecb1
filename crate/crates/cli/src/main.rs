//! `gnes`: solve Fourier modes of (Delta - lambda) f = kappa zeta zeta E_a E_b,
//! compare against the embedded tables, evaluate divisor sums, form
//! combinations and verify saved solutions.

mod commands;
mod json;
mod tex;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Exit codes. Part of the public interface.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    NotHalfInteger = 3,
    LambdaNotTriangular = 4,
    NoSolutionInWindow = 5,
    Obstructed = 6,
    /// A table mismatch or a failed numeric verification.
    Failed = 7,
    NoFixture = 8,
    Usage = 64,
    DataErr = 65,
    Internal = 70,
}

/// An error reported on stderr with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    pub fn new(exit: Exit, message: impl Into<String>) -> CliError {
        CliError { exit, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> CliError {
        CliError::new(Exit::Usage, message)
    }

    pub fn data(message: impl Into<String>) -> CliError {
        CliError::new(Exit::DataErr, message)
    }

    pub fn internal(message: impl std::fmt::Display) -> CliError {
        CliError::new(Exit::Internal, message.to_string())
    }
}

/// A document for stdout and the exit code that goes with it.
pub struct Output {
    pub text: String,
    pub exit: Exit,
}

#[derive(Parser, Debug)]
#[command(name = "gnes", version, about = "Exact Fourier-mode solutions of (Delta - lambda) f = kappa zeta zeta E_a E_b")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Solve one mode (n1, n2), or every mode n1 + n2 = n up to a cutoff.
    Solve(SolveArgs),
    /// Compare solver output with the embedded printed tables.
    Table(TableArgs),
    /// Two-sided sum of sigma_a(n) sigma_b(n) n^-s over n != 0.
    Sums(SumsArgs),
    /// Weighted combination of mode solutions.
    Combine(CombineArgs),
    /// Numeric residuals of a saved `solve` document.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Latex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum RouteArg {
    Graded,
    Ratpi,
}

/// Options shared by every command that runs the solver.
#[derive(Args, Debug, Clone)]
pub struct SolverFlags {
    /// Constant on the right-hand side: paper-c (-c), curly-e (-4) or unit (+1).
    #[arg(long, default_value = "paper-c")]
    pub normalization: String,
    /// Start degree windows as JSON, e.g. '{"K0K0":{"m":-3,"M":1}}'.
    #[arg(long)]
    pub window: Option<String>,
    /// Maximum number of window widenings.
    #[arg(long)]
    pub cap: Option<u32>,
    /// Elimination route.
    #[arg(long, value_enum, default_value = "graded")]
    pub route: RouteArg,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub alpha: String,
    #[arg(long)]
    pub beta: String,
    /// Eigenvalue; a rational such as 30 or 21/2.
    #[arg(long, conflicts_with = "r", required_unless_present = "r", allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// Sets lambda = r(r+1).
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long, allow_hyphen_values = true, requires = "n2", conflicts_with_all = ["n", "cutoff"])]
    pub n1: Option<i64>,
    #[arg(long, allow_hyphen_values = true, requires = "n1")]
    pub n2: Option<i64>,
    /// Mode sum n1 + n2 = n, solved for |n1| <= cutoff.
    #[arg(long, allow_hyphen_values = true, requires = "cutoff")]
    pub n: Option<i64>,
    #[arg(long, requires = "n")]
    pub cutoff: Option<u32>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    /// Fixture family id, e.g. three_halves_30.
    #[arg(long, conflicts_with_all = ["alpha", "beta", "lambda"])]
    pub family: Option<String>,
    #[arg(long, requires_all = ["beta", "lambda"])]
    pub alpha: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<i64>,
    /// Mode "n1,n2"; repeatable. Defaults to the test modes of every table.
    #[arg(long = "mode", allow_hyphen_values = true)]
    pub modes: Vec<String>,
    /// List the embedded families and exit.
    #[arg(long)]
    pub list: bool,
    #[command(flatten)]
    pub solver: SolverFlags,
}

#[derive(Args, Debug)]
pub struct SumsArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub a: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub b: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub s: i64,
    /// Weight each term by log n.
    #[arg(long)]
    pub log: bool,
    /// Also report the floating-point partial sum up to this n.
    #[arg(long)]
    pub partial: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    #[value(name = "T-2")]
    TMinus2,
}

#[derive(Args, Debug)]
pub struct CombineArgs {
    #[arg(long, value_enum)]
    pub preset: Preset,
    #[arg(long, allow_hyphen_values = true)]
    pub n1: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub n2: i64,
    /// Points for the numeric spot check.
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
    pub y: Vec<f64>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// A `solve` JSON document; "-" reads stdin.
    #[arg(long)]
    pub input: String,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1,2")]
    pub y: Vec<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { Exit::Usage } else { Exit::Ok };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => commands::solve(a),
        Command::Table(a) => commands::table(a),
        Command::Sums(a) => commands::sums(a),
        Command::Combine(a) => commands::combine(a),
        Command::Verify(a) => commands::verify(a),
    };
    match result {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.exit as u8)
        }
        Err(e) => {
            eprintln!("gnes: {}", e.message);
            ExitCode::from(e.exit as u8)
        }
    }
}
