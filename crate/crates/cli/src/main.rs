mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::exit;

/// Variational imaginary-time solver for Hermitian generalized eigenvalue problems.
///
/// Exit codes: 0 success, 2 configuration or input error, 3 numerical failure,
/// 4 convergence failure.
#[derive(Debug, Parser)]
#[command(name = "gevp", version)]
struct Cli {
    /// Seed for shot sampling and for random starting angles.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Estimate circuit quantities from this many shots (0 = exact statevector).
    #[arg(long, global = true)]
    shots: Option<u64>,
    /// Directory for CSV, JSON and report artifacts [default: gevp-out].
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the imaginary-time evolution level by level and compare with the exact spectrum.
    Solve {
        #[command(flatten)]
        source: Source,
        /// Run only the first K levels.
        #[arg(long, value_name = "K")]
        levels: Option<usize>,
        /// Treat a level that reaches tau_max without converging as a failure (exit 4).
        #[arg(long)]
        require_convergence: bool,
    },
    /// Solve the pencil exactly and write its eigenpairs.
    Oracle {
        #[command(flatten)]
        source: Source,
    },
    /// Sweep the STO exponent ratio and fit the polarizability at each point.
    Hydrogen(HydrogenArgs),
    /// Print the Pauli decomposition of a Hermitian matrix.
    Decompose {
        /// Text file with one matrix row per line; entries like `0.5`, `1-2i`.
        matrix: PathBuf,
        /// Drop terms whose |coefficient| is at most this.
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in recipe: example1, example2, example3 or hydrogen.
    #[arg(long)]
    preset: Option<String>,
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverKind {
    Oracle,
    Evolver,
}

#[derive(Debug, Args)]
struct HydrogenArgs {
    #[arg(long, value_enum, default_value_t = SolverKind::Oracle)]
    solver: SolverKind,
    /// Comma-separated exponent ratios [default: 0.5,0.6,...,1.2].
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    grid: Option<Vec<f64>>,
    /// The two orbital scales used in the fit.
    #[arg(long, value_delimiter = ',', num_args = 1, allow_negative_numbers = true, default_value = "-1,-2")]
    alphas: Vec<f64>,
    #[arg(long, default_value_t = 0.01)]
    field: f64,
    #[arg(long, default_value_t = 1.0)]
    z: f64,
    #[arg(long, default_value_t = 2)]
    n_max: u32,
    /// Ansatz layers for the evolver.
    #[arg(long, default_value_t = 1)]
    layers: usize,
    #[arg(long, default_value_t = 0.05)]
    d_tau: f64,
    #[arg(long, default_value_t = 60.0)]
    tau_max: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve {
            source,
            levels,
            require_convergence,
        } => commands::solve(&cli, source, *levels, *require_convergence),
        Command::Oracle { source } => commands::oracle(&cli, source),
        Command::Hydrogen(args) => commands::hydrogen(&cli, args),
        Command::Decompose { matrix, tol } => commands::decompose(&cli, matrix, *tol),
    };
    match result {
        Ok(()) => ExitCode::from(exit::OK),
        Err(e) => {
            eprintln!("gevp: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
