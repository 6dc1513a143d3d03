//! `alphaflow`: run simulations, convergence sweeps and the identity battery.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 hypothesis
//! failure, 4 numeric abort, 5 assertion failure, 1 anything else.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use alphaflow::experiments::SweepKind;

#[derive(Parser, Debug)]
#[command(
    name = "alphaflow",
    version,
    about = "2D periodic Navier-Stokes and alpha-model solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads; 0 uses every available core.
    #[arg(long, default_value_t = 0)]
    pub parallel: usize,
    /// Override the configuration seed.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Integrate one configuration; writes a trajectory CSV and a bound report.
    Run {
        #[command(flatten)]
        common: Common,
    },
    /// Convergence sweep; writes a CSV, a JSON summary and optionally an SVG plot.
    Sweep {
        #[arg(value_enum)]
        kind: KindArg,
        #[command(flatten)]
        common: Common,
        /// Also write a log-log plot.
        #[arg(long)]
        svg: bool,
    },
    /// Exact identities and empirical inequality constants.
    Identities {
        #[command(flatten)]
        common: Common,
        /// Evaluate products without padding (negative control).
        #[arg(long, hide = true)]
        aliased: bool,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum KindArg {
    Alpha,
    Galerkin,
    Combined,
}

impl From<KindArg> for SweepKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Alpha => SweepKind::Alpha,
            KindArg::Galerkin => SweepKind::Galerkin,
            KindArg::Combined => SweepKind::Combined,
        }
    }
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
        Command::Run { common } => commands::run(&common),
        Command::Sweep { kind, common, svg } => commands::sweep(&common, kind.into(), svg),
        Command::Identities { common, aliased } => commands::identities(&common, aliased),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("alphaflow: {f}");
            ExitCode::from(f.code())
        }
    }
}
