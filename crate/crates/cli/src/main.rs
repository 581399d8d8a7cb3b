use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Geodesics and geodesic-orbit / weak-symmetry checks for homogeneous
/// spray manifolds described by a JSON config.
#[derive(Debug, Parser)]
#[command(name = "spraylab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check algebra, representation and decomposition residuals.
    Validate(RunArgs),
    /// Sampled geodesic-orbit check with least-squares witnesses.
    CheckGo(RunArgs),
    /// Sampled weak-symmetry check (algebraic condition and evenness).
    CheckWs(RunArgs),
    /// Tangency of the integral curve of -eta to the isotropy orbits.
    VerifyThm3(RunArgs),
    /// Integrate the geodesic with initial vector y0.
    Geodesic(RunArgs),
    /// Compare the integrated geodesic with the closed-form homogeneous
    /// geodesic and, when configured, with the chart spray.
    Compare(RunArgs),
    /// List built-in examples or dump one as a config.
    Examples {
        /// Print the config of this example.
        #[arg(long, value_name = "NAME")]
        dump: Option<String>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct RunArgs {
    /// Config file. A missing path whose file stem names a built-in example
    /// loads that example.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Initial vector in m-coordinates, e.g. `1,0`.
    #[arg(long, value_name = "LIST", allow_hyphen_values = true)]
    y0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t0: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    t1: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long, env = "SPRAYLAB_SEED")]
    seed: Option<u64>,
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

/// Why a command did not succeed; each maps to an exit code.
#[derive(Debug)]
pub enum Failure {
    /// A check ran and did not pass (exit 1).
    Check,
    /// Bad flags or config (exit 2).
    Invalid(String),
    /// Blow-up, domain exit or other numerical breakdown (exit 3).
    Numerical(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check => 1,
            Failure::Invalid(_) => 2,
            Failure::Numerical(_) => 3,
        }
    }
}

/// Command output plus whether the command's check passed.
pub struct Outcome {
    pub text: String,
    pub pass: bool,
}

fn write_output(out: Option<&Path>, text: &str) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (outcome, out) = match cli.command {
        Command::Examples { dump, out } => (commands::examples(dump.as_deref())?, out),
        Command::Validate(a) => (commands::validate(&a)?, a.out.clone()),
        Command::CheckGo(a) => (commands::check_go(&a)?, a.out.clone()),
        Command::CheckWs(a) => (commands::check_ws(&a)?, a.out.clone()),
        Command::VerifyThm3(a) => (commands::verify_thm3(&a)?, a.out.clone()),
        Command::Geodesic(a) => (commands::geodesic(&a)?, a.out.clone()),
        Command::Compare(a) => (commands::compare(&a)?, a.out.clone()),
    };
    write_output(out.as_deref(), &outcome.text).map_err(|e| Failure::Invalid(format!("cannot write output: {e}")))?;
    if outcome.pass {
        Ok(())
    } else {
        Err(Failure::Check)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Invalid(m) => eprintln!("error: {m}"),
                Failure::Numerical(m) => eprintln!("numerical failure: {m}"),
                Failure::Check => {}
            }
            ExitCode::from(f.code())
        }
    }
}
