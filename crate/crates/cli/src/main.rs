mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rydberg_core::{ModelSpec, ObservableSpec, Word};

pub const SUBCOMMANDS: [&str; 6] = ["coeffs", "simulate", "bounds", "verify", "ad", "matrix"];

#[derive(Parser, Debug)]
#[command(name = "rydberg", version, about = "Exact short-time dynamics of blockaded Rydberg lattices")]
pub struct Cli {
    /// `key = value` file supplying defaults for the subcommand's flags.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact Taylor coefficients of an observable.
    Coeffs(CoeffsArgs),
    /// Evolve the vacuum and tabulate an observable in time.
    Simulate(SimulateArgs),
    /// κ values, coefficient bounds, error envelopes and convergence ratios.
    Bounds(BoundsArgs),
    /// Run the self-verification suite; exit status 0 iff every check passes.
    Verify(VerifyArgs),
    /// Nested commutators ad_H^j of a word.
    Ad(AdArgs),
    /// Integer matrices on the blockade basis in coordinate format.
    Matrix(MatrixArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyArg {
    Ring,
    Line,
    Infinite,
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(long, value_enum, default_value = "infinite")]
    pub topology: TopologyArg,
    /// Number of sites (ring and line).
    #[arg(long = "L", short = 'L')]
    pub sites: Option<usize>,
    /// Blockade range λ_b.
    #[arg(long = "lambda", default_value_t = 1)]
    pub lambda_b: usize,
}

impl ModelArgs {
    pub fn model(&self) -> Result<ModelSpec> {
        let need = || -> Result<usize> {
            match self.sites {
                Some(l) => Ok(l),
                None => bail!("--L is required for a {:?} lattice", self.topology),
            }
        };
        Ok(match self.topology {
            TopologyArg::Ring => ModelSpec::ring(need()?, self.lambda_b)?,
            TopologyArg::Line => ModelSpec::line(need()?, self.lambda_b)?,
            TopologyArg::Infinite => ModelSpec::infinite(self.lambda_b)?,
        })
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObservableKind {
    /// Rydberg density ⟨N⟩/L.
    Density,
    /// ⟨n_k⟩ at `--site`.
    Local,
    /// ⟨n_k n_(k+d)⟩.
    Correlation,
    /// ⟨n_k n_(k+d)⟩ / (⟨n_k⟩⟨n_(k+d)⟩); simulate only.
    G2,
    /// Any word given with `--word`.
    Word,
}

#[derive(Args, Debug, Clone)]
pub struct ObservableArgs {
    #[arg(long, value_enum, default_value = "density")]
    pub observable: ObservableKind,
    /// Pair distance for correlations and g2.
    #[arg(long)]
    pub d: Option<usize>,
    /// Site for local numbers and g2.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub site: i64,
    /// Word in `site:letter` form, e.g. `"1:m 2:r 3:m"`.
    #[arg(long)]
    pub word: Option<String>,
}

impl ObservableArgs {
    pub fn distance(&self) -> Result<usize> {
        match self.d {
            Some(d) => Ok(d),
            None => bail!("--d is required for {:?}", self.observable),
        }
    }

    /// The observable as a series target; `g2` has no series of its own.
    pub fn spec(&self) -> Result<ObservableSpec> {
        Ok(match self.observable {
            ObservableKind::Density => ObservableSpec::DensityPerSite,
            ObservableKind::Local => ObservableSpec::LocalNumber(self.site),
            ObservableKind::Correlation => ObservableSpec::Correlation(self.distance()?),
            ObservableKind::Word => match &self.word {
                Some(w) => ObservableSpec::GeneralWord(w.parse::<Word>()?),
                None => bail!("--word is required for --observable word"),
            },
            ObservableKind::G2 => bail!("g2 is a ratio of expectations; use `simulate`"),
        })
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug, Clone)]
pub struct OutputArgs {
    /// Write here instead of standard output.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceArg {
    Symbolic,
    Oracle,
    /// Both routes; the run fails unless they agree exactly.
    Both,
}

#[derive(Args, Debug)]
pub struct CoeffsArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub observable: ObservableArgs,
    /// Highest order; defaults to the ring universality threshold, or 5.
    #[arg(long)]
    pub jmax: Option<usize>,
    #[arg(long, value_enum, default_value = "symbolic")]
    pub source: SourceArg,
    /// Emit open-chain deficits q_j (probing L and L+3) instead of c_j.
    #[arg(long)]
    pub emit_q: bool,
    /// Add a rounded decimal column.
    #[arg(long)]
    pub decimal: bool,
    /// Term budget of the symbolic engine.
    #[arg(long, default_value_t = 20_000_000)]
    pub max_terms: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub observable: ObservableArgs,
    #[arg(long, default_value_t = 0.0)]
    pub t_start: f64,
    #[arg(long, default_value_t = 2.0)]
    pub t_stop: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Add the infinite-lattice series truncated at this order.
    #[arg(long)]
    pub overlay_order: Option<usize>,
    /// Also evolve a second lattice of this size.
    #[arg(long = "compare-L")]
    pub compare_sites: Option<usize>,
    /// Topology of the second lattice; defaults to the first one's.
    #[arg(long, value_enum)]
    pub compare_topology: Option<TopologyArg>,
    /// Threshold of the universal-window report.
    #[arg(long, default_value_t = 1e-3)]
    pub window_eps: f64,
    /// Mean and variance over `[stats-start, t-stop]`.
    #[arg(long)]
    pub stats_start: Option<f64>,
    /// Largest basis dimension accepted for eigendecomposition.
    #[arg(long, default_value_t = rydberg_core::dynamics::DIMENSION_BUDGET)]
    pub dimension_limit: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundsTable {
    /// τ, ln κ and ω for a = 1..=a-max.
    Kappa,
    /// ln b_j for j = 1..=jmax.
    Coefficients,
    /// E^(L)(t) on the time grid.
    Envelope,
    /// Envelope ratios against the closed-form ratio bounds.
    Ratio,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassArg {
    Density,
    Word,
    Correlation,
}

#[derive(Args, Debug)]
pub struct BoundsArgs {
    #[arg(long, value_enum)]
    pub table: BoundsTable,
    #[arg(long, value_enum, default_value = "density")]
    pub class: ClassArg,
    /// Word length ℓ for the word class and the convergence ratios.
    #[arg(long, default_value_t = 1)]
    pub ell: usize,
    /// Pair distance for the correlation class.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long = "lambda", default_value_t = 1)]
    pub lambda_b: usize,
    #[arg(long = "L", short = 'L')]
    pub sites: Option<usize>,
    #[arg(long, default_value_t = 100)]
    pub a_max: usize,
    #[arg(long, default_value_t = 20)]
    pub jmax: usize,
    #[arg(long, default_value_t = 0.0)]
    pub t_start: f64,
    #[arg(long, default_value_t = 2.0)]
    pub t_stop: f64,
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    #[arg(long = "L-min", default_value_t = 5)]
    pub sites_min: usize,
    #[arg(long = "L-max", default_value_t = 40)]
    pub sites_max: usize,
    /// Time at which ratios are evaluated.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Run only these checks (0 = letter table, 1..=8 acceptance criteria).
    #[arg(long)]
    pub criterion: Vec<u8>,
}

#[derive(Args, Debug)]
pub struct AdArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Starting word; defaults to `n` at `--site`.
    #[arg(long)]
    pub word: Option<String>,
    #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
    pub site: i64,
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Print every order from 0.
    #[arg(long)]
    pub all: bool,
    #[arg(long, default_value_t = 20_000_000)]
    pub max_terms: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Hamiltonian,
    Observable,
    Parity,
    Basis,
}

#[derive(Args, Debug)]
pub struct MatrixArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "hamiltonian")]
    pub what: MatrixKind,
    #[command(flatten)]
    pub observable: ObservableArgs,
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = match config::expand(std::env::args().collect(), &SUBCOMMANDS) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(2);
        }
    };
    let cli = Cli::parse_from(args);
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
