use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod chainfile;
mod commands;

/// Darboux transformations of the one-dimensional Dirac equation.
#[derive(Parser, Debug)]
#[command(name = "darboux", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List catalog examples, seed potentials and figures.
    List,
    /// One transformation step; writes x,p,q as CSV.
    Transform(TransformArgs),
    /// Chain of steps via block determinants.
    Chain(ChainArgs),
    /// Run verification suites and print report lines.
    Verify(VerifyArgs),
    /// Emit the data behind a figure.
    Figure(FigureArgs),
    /// Schrödinger reduction of an example; writes the partner pairs.
    Reduce(ReduceArgs),
}

#[derive(Args, Debug)]
struct Output {
    /// Sampling grid `start:stop:step`; defaults to the potential's interval.
    #[arg(long, allow_hyphen_values = true)]
    grid: Option<String>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TransformArgs {
    /// Seed `name:key=value,...`, e.g. `free_mass:m=1`.
    #[arg(long, conflicts_with = "example")]
    seed: Option<String>,
    /// Catalog example whose first step is used.
    #[arg(long)]
    example: Option<String>,
    /// Eigenvalue of the second transformation spinor (free and hat seeds).
    #[arg(long, alias = "lambda", allow_hyphen_values = true)]
    eps: Option<f64>,
    /// Level index for oscillator seeds.
    #[arg(long)]
    n: Option<u32>,
    /// Also write the images of the example's test spinors to this file.
    #[arg(long)]
    solutions: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
pub struct ChainArgs {
    /// Chain specification file (`step i: seed=..., lambda=..., mu=...`).
    #[arg(long)]
    spec: PathBuf,
    /// Compare against step-by-step composition and report the difference.
    #[arg(long)]
    cross_check: bool,
    /// Evaluate even where the block Wronskian vanishes on the grid.
    #[arg(long)]
    allow_singular: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, conflicts_with = "example", required_unless_present = "example")]
    all: bool,
    #[arg(long)]
    example: Option<String>,
    /// Override the closed-form tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FigureArgs {
    #[arg(long)]
    n: u32,
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReduceArgs {
    #[arg(long)]
    example: String,
    #[command(flatten)]
    output: Output,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::List => commands::list(),
        Command::Transform(a) => commands::transform(a),
        Command::Chain(a) => commands::chain(a),
        Command::Verify(a) => commands::verify(a),
        Command::Figure(a) => commands::figure(a),
        Command::Reduce(a) => commands::reduce(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("darboux: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
