//! Command-line driver for the branching-process density pipeline.
//!
//! Every compute subcommand reads one JSON config and writes one CSV with a
//! `# key=value` metadata block. Exit codes: 0 success, 1 numerical failure,
//! 2 configuration error.

use clap::{Args, Parser, Subcommand};
use gwre_cli::{compare, config, run, CliError};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "gwre",
    version,
    about = "Left-tail density of the martingale limit of branching processes in random environments"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct RunArgs {
    /// JSON run configuration
    #[arg(long)]
    config: PathBuf,
    /// Output CSV path
    #[arg(long)]
    output: PathBuf,
    /// Worker threads for the compute modules (default: hardware
    /// parallelism; overrides the config "threads" key)
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct CompareArgs {
    /// First curve CSV
    a: PathBuf,
    /// Second curve CSV
    b: PathBuf,
    /// Output CSV path
    #[arg(long)]
    output: PathBuf,
    /// Align mismatched grids by linear interpolation onto the coarser one
    #[arg(long)]
    interpolate: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Rare-event ratio table phi_nj
    Phi(RunArgs),
    /// Pseudo-inverse coefficients b_j
    B(RunArgs),
    /// Power-law amplitudes A_jM and their x-exponents
    Amplitudes(RunArgs),
    /// Closed-form series approximation of the density
    Density(RunArgs),
    /// Brute-force composition + Fourier-inversion reference density
    Reference(RunArgs),
    /// Monte Carlo martingale-limit histogram
    Simulate(RunArgs),
    /// Pointwise comparison of two curve CSVs
    Compare(CompareArgs),
}

type Runner = fn(&config::RunConfig, &std::path::Path) -> Result<(), CliError>;

fn dispatch(cli: Cli) -> Result<(), CliError> {
    let (args, runner): (&RunArgs, Runner) = match &cli.cmd {
        Cmd::Compare(c) => {
            return compare::run_compare(&c.a, &c.b, &c.output, c.interpolate);
        }
        Cmd::Phi(a) => (a, run::run_phi),
        Cmd::B(a) => (a, run::run_b),
        Cmd::Amplitudes(a) => (a, run::run_amplitudes),
        Cmd::Density(a) => (a, run::run_density),
        Cmd::Reference(a) => (a, run::run_reference),
        Cmd::Simulate(a) => (a, run::run_simulate),
    };
    let cfg = config::parse_config(&args.config)?;
    if let Some(n) = args.threads.or(cfg.raw.threads) {
        // compute modules parallelize internally; honor the cap globally
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok();
    }
    runner(&cfg, &args.output)?;
    eprintln!("wrote {}", args.output.display());
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let code = match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
