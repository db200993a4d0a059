//! `spectra1d`: symmetry-resolved spectra of few particles in
//! one-dimensional traps with contact interactions.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spectra1d::weak_coupling::Statistics;

use config::Format;

#[derive(Parser)]
#[command(name = "spectra1d", version, about = "Symmetry-resolved spectra of trapped particles with contact interactions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Single-particle energies and orbitals.
    OneBody(OneBodyArgs),
    /// Contact-interaction matrix elements.
    Tensor(TensorArgs),
    /// Degenerate non-interacting levels.
    Levels(LevelsArgs),
    /// First-order splitting at weak coupling.
    WeakPt(WeakPtArgs),
    /// Infinite-coupling levels and their degeneracies.
    Unitary(UnitaryArgs),
    /// First-order splitting near infinite coupling.
    NearPt(NearPtArgs),
    /// Exact diagonalization by symmetry sector.
    Xdiag(XdiagArgs),
    /// Runs the acceptance checks.
    Verify(VerifyArgs),
}

#[derive(Args, Clone, Default)]
pub struct CommonArgs {
    /// JSON run configuration; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads (capped by SPECTRA1D_THREADS).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Args, Clone, Default)]
pub struct TrapArgs {
    /// harmonic, well or quartic.
    #[arg(long)]
    pub trap: Option<String>,
    /// Grid points for grid traps.
    #[arg(long)]
    pub grid_points: Option<usize>,
    /// Number of single-particle levels (sized automatically when omitted).
    #[arg(long)]
    pub levels: Option<usize>,
}

#[derive(Args, Clone, Default)]
pub struct ParticleArgs {
    /// Particle number.
    #[arg(long, short = 'n')]
    pub n: Option<usize>,
    /// Internal components per particle.
    #[arg(long, short = 'j', alias = "components")]
    pub j: Option<usize>,
    /// boson or fermion.
    #[arg(long)]
    pub statistics: Option<Statistics>,
}

#[derive(Args)]
pub struct OneBodyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub trap: TrapArgs,
    /// Include orbitals sampled at this many points.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Re-import an exported basis and check it.
    #[arg(long)]
    pub import: Option<PathBuf>,
}

#[derive(Args)]
pub struct TensorArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub trap: TrapArgs,
    /// Orbitals covered by the tensor.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Re-import an exported tensor and check it.
    #[arg(long)]
    pub import: Option<PathBuf>,
}

#[derive(Args)]
pub struct LevelsArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub trap: TrapArgs,
    #[command(flatten)]
    pub particles: ParticleArgs,
    /// Highest non-interacting energy.
    #[arg(long)]
    pub e_cut: Option<f64>,
}

#[derive(Args)]
pub struct WeakPtArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub trap: TrapArgs,
    #[command(flatten)]
    pub particles: ParticleArgs,
    #[arg(long)]
    pub e_cut: Option<f64>,
    /// Merge accidentally degenerate levels instead of skipping them.
    #[arg(long)]
    pub merge: bool,
}

#[derive(Args)]
pub struct UnitaryArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub trap: TrapArgs,
    #[command(flatten)]
    pub particles: ParticleArgs,
    #[arg(long)]
    pub e_cut: Option<f64>,
}

#[derive(Args)]
pub struct NearPtArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub trap: TrapArgs,
    #[command(flatten)]
    pub particles: ParticleArgs,
    /// Tunnelling amplitudes, all N-1 or the independent half in a
    /// symmetric trap.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub t: Option<Vec<f64>>,
    /// Couplings for fitting the amplitude when none is given.
    #[arg(long, value_delimiter = ',')]
    pub g: Option<Vec<f64>>,
}

#[derive(Args)]
pub struct XdiagArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub trap: TrapArgs,
    #[command(flatten)]
    pub particles: ParticleArgs,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub g: Option<Vec<f64>>,
    /// Keep product states with total energy up to this value.
    #[arg(long, conflicts_with = "index_sum")]
    pub e_cut: Option<f64>,
    /// Keep product states whose orbital indices sum to at most this.
    #[arg(long)]
    pub index_sum: Option<usize>,
    /// Eigenvalues per sector.
    #[arg(long, short)]
    pub k: Option<usize>,
}

#[derive(Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// One pass at the base seed.
    #[arg(long)]
    pub quick: bool,
    /// Only these criteria.
    #[arg(long, value_delimiter = ',')]
    pub only: Option<Vec<usize>>,
}

#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Domain(spectra1d::Error),
    Io(String),
    /// Ran to completion but some check failed.
    Checks(usize),
}

impl From<spectra1d::Error> for Failure {
    fn from(e: spectra1d::Error) -> Failure {
        Failure::Domain(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: io: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Checks(n)) => {
            eprintln!("{n} check(s) failed");
            ExitCode::from(1)
        }
    }
}
