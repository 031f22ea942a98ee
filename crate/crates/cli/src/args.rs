use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use qstrata::hermitian::TAU_PSD;
use qstrata::strata::RANK_TOL;

#[derive(Debug, Parser)]
#[command(name = "qstrata", version, about = "Hermitian operator geometry, rank strata and concurrence bounds")]
pub struct Cli {
    /// Relative eigenvalue cutoff for ranks, signatures and Schmidt numbers.
    #[arg(long, global = true, default_value_t = RANK_TOL)]
    pub tol_rank: f64,
    /// Most negative eigenvalue accepted in a density matrix.
    #[arg(long, global = true, default_value_t = TAU_PSD)]
    pub tol_psd: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a hermitian or density file and report its spectrum data.
    Density {
        /// Matrix file, or `-` for stdin.
        file: String,
    },
    /// Chart coordinates of a fixed-rank Hermitian matrix.
    Chart {
        file: String,
        /// 1-based index set J, comma separated. Chosen automatically when omitted.
        #[arg(long = "J", visible_alias = "j", value_delimiter = ',')]
        j: Option<Vec<usize>>,
        /// Reconstruct from the coordinates and report the max-abs error.
        #[arg(long)]
        roundtrip: bool,
    },
    /// Schmidt decomposition of a bipartite vector.
    Schmidt {
        file: String,
        /// Factor dimensions n1,n2. Defaults to the file's `dims`.
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        /// Also emit the left and right Schmidt frames.
        #[arg(long)]
        frames: bool,
    },
    /// Pure-state concurrence, or lower/upper bounds for a density matrix.
    Concurrence(ConcurrenceArgs),
    /// Apply a Kraus map to a state.
    Kraus {
        kraus_file: String,
        state_file: String,
        /// Apply the trace-normalized map.
        #[arg(long)]
        normalize: bool,
        /// Also emit the Choi-canonical (orthogonal) Kraus list.
        #[arg(long)]
        canonical: bool,
        /// Write the image state as a matrix file.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Seeded random state or Kraus map, printed as a matrix file.
    Random {
        #[arg(long, value_enum)]
        kind: RandomKind,
        /// Factor dimensions; the total dimension is their product.
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        /// Rank of a density matrix. Defaults to full rank.
        #[arg(long)]
        rank: Option<usize>,
        /// Number of Kraus operators.
        #[arg(long, default_value_t = 2)]
        ops: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, clap::Args)]
pub struct ConcurrenceArgs {
    pub file: String,
    /// Factor dimensions. Defaults to the file's `dims`.
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    /// Sign pattern such as `--` or `+,-,-`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "mixture")]
    pub signs: Option<String>,
    /// JSON list of {"signs": ["+","-",...], "weight": w}.
    #[arg(long)]
    pub mixture: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Pure)]
    pub mode: Mode,
    /// Search over z for the lower bound.
    #[arg(long, value_enum, default_value_t = ZStrategy::Single)]
    pub z_strategy: ZStrategy,
    /// 1-based α of z = e_α for the single strategy.
    #[arg(long, default_value_t = 1)]
    pub alpha: usize,
    /// Search over decompositions for the upper bound.
    #[arg(long, value_enum, default_value_t = RoofSearch::Eigen)]
    pub roof_strategy: RoofSearch,
    /// Number of decomposition terms for the upper bound. Defaults to rank².
    #[arg(long)]
    pub max_terms: Option<usize>,
    /// Random starting points for the random and refine searches.
    #[arg(long, default_value_t = 32)]
    pub samples: usize,
    #[arg(long, default_value_t = 200)]
    pub iters: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Pure,
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ZStrategy {
    Single,
    Random,
    Refine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoofSearch {
    Eigen,
    Random,
    Refine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RandomKind {
    Pure,
    Density,
    Kraus,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Pure => "pure",
            Mode::Lower => "lower",
            Mode::Upper => "upper",
        }
    }
}

impl ZStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            ZStrategy::Single => "single",
            ZStrategy::Random => "random",
            ZStrategy::Refine => "refine",
        }
    }
}

impl RoofSearch {
    pub fn as_str(self) -> &'static str {
        match self {
            RoofSearch::Eigen => "eigen",
            RoofSearch::Random => "random",
            RoofSearch::Refine => "refine",
        }
    }
}
