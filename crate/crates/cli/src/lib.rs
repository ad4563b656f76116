//! Command-line front end: reference tables, verification sweeps and pencil utilities.

pub mod commands;
pub mod error;
pub mod output;
pub mod schema;

use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::{CliError, Result};
use output::Format;

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Debug, Parser)]
#[command(
    name = "spectra-theta",
    version,
    about = "Matrix-cube relaxation constant, beta equipoints and dilation checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Debug, Clone, Args)]
pub struct Options {
    /// Largest dimension (or shape sum, or variable count) covered by the command.
    #[arg(long, global = true)]
    pub d_max: Option<u32>,
    /// Seed for every random stream; decimal or 0x-prefixed hex.
    #[arg(long, global = true, default_value = "0xC0FFEE", value_parser = parse_seed)]
    pub seed: u64,
    /// Monte-Carlo sample count, or random instances for sweeps that draw them.
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Spacing of real shape grids.
    #[arg(long, global = true)]
    pub grid_step: Option<f64>,
    /// Numerical tolerance for membership and residual checks.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Worker threads; output does not depend on it.
    #[arg(long, global = true, env = "SPECTRA_THETA_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// ϑ(d) with the odd-d bounds, d = 1..d-max (default 20).
    ThetaTable,
    /// Mean, median and the two upper bounds for the reference shapes.
    MedianTable,
    /// Equipoints e(s, d−s) for s = 1..d, d = d-max (default 10).
    EquipointTable,
    /// Run an invariant sweep; exits 2 on any violation.
    Verify {
        #[arg(value_enum)]
        which: Check,
    },
    /// Membership of a tuple (JSON) in the OH, spin or sampled min ball.
    Membership {
        input: PathBuf,
        #[arg(long, default_value = "spin")]
        ball: String,
        /// Random restarts for the min-ball search.
        #[arg(long, default_value_t = 32)]
        starts: usize,
    },
    /// Checks X/ϑ(ν) ∈ 𝒟_B for random contraction tuples X; exits 2 on any violation.
    CubeRelax {
        pencil: PathBuf,
        /// Size of the random contractions.
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Prints the pencil whose spectrahedron is the cube [−1, 1]^g.
    CubePencil {
        #[arg(long)]
        g: usize,
    },
    /// Pencil/tuple pair with λ_max approaching ϑ(dim); samples per cell from --samples.
    Witness {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 256)]
        cells: usize,
        #[arg(long)]
        pencil_out: Option<PathBuf>,
        #[arg(long)]
        tuple_out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Simmons,
    Monotone,
    Bounds,
    Oracle,
    Dilation,
}

fn parse_seed(s: &str) -> std::result::Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed {s:?}: {e}"))
}

pub enum Body {
    Table(output::Table),
    /// Already serialized, printed as is whatever the format.
    Raw(String),
}

/// Command output plus how many of its rows report a violated invariant.
pub struct Report {
    pub body: Body,
    pub violations: usize,
    pub what: &'static str,
}

pub fn run(cli: &Cli) -> Result<()> {
    if let Some(n) = cli.opts.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    let report = commands::dispatch(&cli.command, &cli.opts)?;
    let text = match &report.body {
        Body::Table(t) => t.render(cli.opts.format),
        Body::Raw(s) => s.clone(),
    };
    emit(&text, cli.opts.out.as_deref())?;
    if report.violations > 0 {
        return Err(CliError::Violations { what: report.what.to_owned(), count: report.violations });
    }
    Ok(())
}

pub(crate) fn emit(text: &str, path: Option<&std::path::Path>) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|source| CliError::Io { path: p.to_owned(), source }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(CliError::Stdout)
        }
    }
}
