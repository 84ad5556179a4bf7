//! `seqgen` command-line tool.
//!
//! Every subcommand writes its artifacts into the output directory
//! (`--out`, else `$SEQGEN_OUT_DIR`, else the working directory), writes
//! `<command>.report.json` there and prints the same report on stdout.
//! Diagnostics go to stderr.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical or compile failure.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Default tolerance for truncation, isometry checks and bond ranks.
pub const DEFAULT_TOL: f64 = 1e-12;

/// Default seed for the ChaCha8 generator used by `random`.
pub const DEFAULT_SEED: u64 = 0;

pub const OUT_DIR_ENV: &str = "SEQGEN_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "seqgen", version, about = "Compile, generate and check sequentially generated MPS")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Numerical tolerance.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,

    /// Seed for random ensembles.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Table format; only `sweep` writes tables.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Include wall-clock timings in the report.
    #[arg(long, global = true)]
    pub timings: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compile a state file into a generation plan.
    Compile {
        state: PathBuf,
    },
    /// Emit a recipe target state and, where one exists, its plan.
    Recipe {
        /// w, ghz, cluster, atomic-w, atomic-ghz or atomic-cluster.
        name: String,
        #[arg(short, long)]
        n: usize,
        /// Polar angle, repeated once per parameter (radians).
        #[arg(long = "theta", allow_negative_numbers = true)]
        thetas: Vec<f64>,
        /// Azimuthal angle, repeated once per parameter (radians).
        #[arg(long = "phi", allow_negative_numbers = true)]
        phis: Vec<f64>,
        /// JSON file `{"thetas": [...], "phis": [...]}` instead of flags.
        #[arg(long, conflicts_with_all = ["thetas", "phis"])]
        params: Option<PathBuf>,
    },
    /// Run a plan and compare its output with a state.
    Verify {
        plan: PathBuf,
        state: PathBuf,
    },
    /// Gate error of the selective pulse over a parameter grid.
    Sweep {
        /// JSON grid `{"delta_over_g", "omega_over_g", "n_max", "levels"}`;
        /// replaces the flags below.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long = "delta", value_delimiter = ',', allow_negative_numbers = true, default_values_t = [50.0, 100.0, 200.0, 400.0])]
        deltas: Vec<f64>,
        #[arg(long = "omega", value_delimiter = ',', allow_negative_numbers = true, default_values_t = [1.0])]
        omegas: Vec<f64>,
        #[arg(long = "n-max", value_delimiter = ',', default_values_t = [4])]
        n_max: Vec<usize>,
        /// FULL or ADIABATIC.
        #[arg(long = "level", value_delimiter = ',', default_values = ["FULL"])]
        levels: Vec<String>,
    },
    /// Sample a random MPS, contract it and write the state.
    Random {
        #[arg(short, long)]
        n: usize,
        /// Maximum bond dimension.
        #[arg(long, default_value_t = 2)]
        bond: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("seqgen: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
