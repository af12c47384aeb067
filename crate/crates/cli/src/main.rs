//! `casimir`: batch front end.
//!
//! ```text
//! casimir lifshitz --config run.json --out results/
//! ```
//!
//! Exit codes: 0 success, 1 output could not be written, 2 config error,
//! 3 numerical or conditioning failure.

// `!(x > 0.0)` is used on purpose so NaN fails validation
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

mod config;
mod error;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Command, RunConfig};
use error::CliError;

#[derive(Parser, Debug)]
#[command(name = "casimir", version, about = "Casimir free energies and forces from a JSON run config")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Two half-spaces: F/A and pressure.
    Lifshitz(Common),
    /// Boundary-element free energy of meshed bodies.
    BemEnergy(Common),
    /// Two-body scattering formula with T-matrices from the meshes.
    SphereSphere(Common),
    /// T-matrix of the first body at one wavenumber.
    Tmatrix(Common),
    /// Force vector on one body from the trace formula.
    Force(Common),
}

#[derive(Args, Debug)]
struct Common {
    /// JSON run config.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Worker threads; 0 picks the number of cores.
    #[arg(long, value_name = "N", env = "CASIMIR_THREADS", default_value_t = 0)]
    threads: usize,
    /// Reserved; nothing here is random.
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,
}

impl Cmd {
    fn split(self) -> (Command, Common) {
        match self {
            Cmd::Lifshitz(c) => (Command::Lifshitz, c),
            Cmd::BemEnergy(c) => (Command::BemEnergy, c),
            Cmd::SphereSphere(c) => (Command::SphereSphere, c),
            Cmd::Tmatrix(c) => (Command::Tmatrix, c),
            Cmd::Force(c) => (Command::Force, c),
        }
    }
}

fn execute(command: Command, args: &Common) -> Result<usize, CliError> {
    let cfg = RunConfig::from_file(&args.config, Some(command))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads)
        .build_global()
        .map_err(|e| CliError::Output(format!("thread pool: {e}")))?;
    let records = run::run(&cfg)?;
    output::write_all(&args.out, &cfg, &records)?;
    Ok(records.len())
}

fn main() -> ExitCode {
    let (command, args) = Cli::parse().command.split();
    match execute(command, &args) {
        Ok(n) => {
            eprintln!("wrote {n} record(s) to {}", args.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
