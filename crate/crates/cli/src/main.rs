//! `elastica2d` command-line tool.

mod commands;
mod config;
mod error;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Ctx;
use error::CliError;

#[derive(Parser)]
#[command(
    name = "elastica2d",
    version,
    about = "Exact and discrete planar elastic maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a map from holomorphic data, sample it and draw the deformed grid.
    Weierstrass(Common),
    /// Minimize the discrete energy on a mesh with pins or a free boundary.
    Solve(Common),
    /// Solve the wound annulus and strip families and check their traction.
    Annulus(Common),
    /// Write a disk, rectangle or annulus mesh.
    Meshgen(Common),
    /// Run the identity checks for every section in the config.
    Verify(Common),
}

#[derive(Args)]
struct Common {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Override every `lambda` in the config.
    #[arg(long)]
    lambda: Option<f64>,
    /// Uniform 4-split refinements applied to the mesh.
    #[arg(long, default_value_t = 0)]
    refine: usize,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
}

type Handler = fn(&Ctx) -> Result<(), CliError>;

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, cmd): (&Common, Handler) = match &cli.command {
        Command::Weierstrass(c) => (c, commands::weierstrass::run),
        Command::Solve(c) => (c, commands::solve::run),
        Command::Annulus(c) => (c, commands::annulus::run),
        Command::Meshgen(c) => (c, commands::meshgen::run),
        Command::Verify(c) => (c, commands::verify::run),
    };
    let cfg = config::load(&common.config)?;
    let ctx = Ctx::new(
        cfg,
        common.out.clone(),
        common.lambda,
        common.refine,
        common.seed,
    );
    cmd(&ctx)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
