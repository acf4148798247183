use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use lfi_kit::harness::{self, RunConfig};

/// Likelihood-free inference experiments: classifier discrepancy sweeps,
/// rejection ABC, and GP-surrogate acquisition runs.
#[derive(Parser)]
#[command(name = "lfi-kit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// TOML run configuration; omit for built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Root seed; all streams derive from it. Mandatory so every run is
    /// replayable.
    #[arg(long)]
    seed: u64,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Discriminability vs θ at large n, with the Bayes-accuracy oracle.
    Curve(RunArgs),
    /// Distribution of the stochastic discrepancy Δθ at small n.
    Dist(RunArgs),
    /// Rejection ABC with the classifier discrepancy.
    Abc(RunArgs),
    /// GP-surrogate acquisition loop plus approximate posterior.
    Bolfi(RunArgs),
}

type CommandFn = fn(&RunConfig, u64, &std::path::Path) -> lfi_kit::Result<Vec<PathBuf>>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (args, run): (&RunArgs, CommandFn) = match &cli.command {
        Command::Curve(a) => (a, harness::cmd_curve),
        Command::Dist(a) => (a, harness::cmd_dist),
        Command::Abc(a) => (a, harness::cmd_abc),
        Command::Bolfi(a) => (a, harness::cmd_bolfi),
    };

    let config = match RunConfig::load(args.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };

    match run(&config, args.seed, &args.out) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(harness::exit_code(&e) as u8)
        }
    }
}
