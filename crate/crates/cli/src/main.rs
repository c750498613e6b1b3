use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ucfem_cli::{dispatch, parse_with_overrides, CliError, Command};

/// Stabilized finite elements for unique continuation of harmonic functions.
#[derive(Parser)]
#[command(name = "ucfem", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    /// Flat `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one key, e.g. `--set geometry.r1=0.3` (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Directory for CSV, JSON and mesh files.
    #[arg(long, global = true, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Print the optimal Hölder exponent (and the combined one if rates are set).
    Alpha,
    /// Three-ball ratio table over monomial index and test exponent.
    ThreeBall,
    /// Write the disk mesh at `level`.
    Mesh,
    /// Solve the Poisson baseline with f = 4 at `level`.
    Poisson,
    /// One unique-continuation solve at `level`.
    Uc,
    /// Convergence study over `levels`.
    Converge,
    /// Perturbation-sensitivity study.
    Perturb,
    /// Stagnation study with the max(h, h_min) Tikhonov scale.
    Stagnate,
    /// Run the built-in invariant checks.
    Selftest,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Alpha => Command::Alpha,
            Cmd::ThreeBall => Command::ThreeBall,
            Cmd::Mesh => Command::Mesh,
            Cmd::Poisson => Command::Poisson,
            Cmd::Uc => Command::Uc,
            Cmd::Converge => Command::Converge,
            Cmd::Perturb => Command::Perturb,
            Cmd::Stagnate => Command::Stagnate,
            Cmd::Selftest => Command::Selftest,
        }
    }
}

fn run(cli: &Cli) -> Result<String, CliError> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|source| CliError::Invalid { key: "--config".into(), msg: format!("{}: {source}", path.display()) })?,
        None => String::new(),
    };
    let config = parse_with_overrides(&text, &cli.overrides)?;
    dispatch(cli.command.into(), &config, &cli.out_dir)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.line());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
