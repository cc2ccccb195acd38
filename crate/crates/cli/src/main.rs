use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use netcoh::optimizer::{DEFAULT_FEASIBILITY_TOLERANCE, DEFAULT_SEED};
use netcoh_cli::{emit, run, Command, RunConfig, DEFAULT_RESTARTS, RESTARTS_ENV};

/// Ring-network single-particle coherence simulator.
#[derive(Parser, Debug)]
#[command(name = "netcoh", version)]
struct Cli {
    /// Seed for every randomized search.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Optimizer restarts.
    #[arg(long, global = true, env = RESTARTS_ENV, default_value_t = DEFAULT_RESTARTS)]
    restarts: usize,
    /// Write the result here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand, Debug)]
enum Sub {
    /// Simulate the quantum ring and print the post-selected distribution.
    Quantum {
        #[arg(long)]
        parties: usize,
    },
    /// Evaluate a classical two-branch model from a parameter file.
    Classical {
        #[arg(long)]
        params: PathBuf,
    },
    /// Evaluate C_n and the parity predicate on a distribution file ("-" for stdin).
    Witness {
        #[arg(long)]
        dist: PathBuf,
    },
    /// Numerically maximize C_n over classical models.
    Bound {
        #[arg(long)]
        parties: usize,
    },
    /// Try to decompose a distribution as a classical model.
    Feasibility {
        #[arg(long)]
        dist: PathBuf,
        #[arg(long, default_value_t = DEFAULT_FEASIBILITY_TOLERANCE)]
        tolerance: f64,
    },
    /// Vertex membership and non-convexity report.
    Geometry {
        #[arg(long)]
        parties: usize,
    },
    /// Exhaustive proof that no classical support pattern yields the parity predicate.
    Prove {
        #[arg(long)]
        parties: usize,
    },
    /// CSV comparison of quantum and classical C_n for n = 2..=max.
    Sweep {
        #[arg(long)]
        max_parties: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match cli.command {
        Sub::Quantum { parties } => Command::Quantum { parties },
        Sub::Classical { params } => Command::Classical { params },
        Sub::Witness { dist } => Command::Witness { dist },
        Sub::Bound { parties } => Command::Bound { parties },
        Sub::Feasibility { dist, tolerance } => Command::Feasibility { dist, tolerance },
        Sub::Geometry { parties } => Command::Geometry { parties },
        Sub::Prove { parties } => Command::Prove { parties },
        Sub::Sweep { max_parties } => Command::Sweep { max_parties },
    };
    let config = RunConfig { command, seed: cli.seed, restarts: cli.restarts };
    match run(&config).and_then(|text| emit(&text, cli.output.as_deref())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("netcoh: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
