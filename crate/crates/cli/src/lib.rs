//! The `r2d` command line: model files in, sorted-key JSON reports out.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub mod commands;
pub mod models;
pub mod report;

pub use commands::run_command;
pub use models::{load, LoadedModel, BUNDLED};
pub use report::ReportDocument;

#[derive(Debug, Parser)]
#[command(name = "r2d", version, about = "Finite-depth computations for two commuting shift maps")]
pub struct Cli {
    /// Model spec file, or the name of a bundled model.
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write the Bratteli diagram (DOT) here.
    #[arg(long, global = true)]
    pub diagram: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Parse and validate the model.
    Validate(DepthArg),
    /// List the admissible patterns (or arcs) of one shape.
    Patterns {
        #[arg(long)]
        shape: String,
    },
    /// Local injectivity of one shift on the cylinders fixed by a window.
    Localhomeo {
        #[arg(long)]
        dir: u8,
        /// Window cells `i,j`, separated by `;` or given repeatedly. Scanned when absent.
        #[arg(long, num_args = 1..)]
        window: Vec<String>,
        #[command(flatten)]
        depth: DepthArg,
    },
    /// Conditional expectation matrix and operator identities.
    Expectation(OperatorArgs),
    /// Transfer operator matrix and operator identities.
    Transfer(OperatorArgs),
    /// Parseval frame for one direction and its reconstruction check.
    Frame(OperatorArgs),
    /// Commuting expectations, the isomorphism E₁⊗E₂ ≅ E_(1,1) and the flip.
    ProdsysCheck(ResolutionArg),
    /// The relation Rₙ at a depth: classes and algebra description.
    Groupoid {
        #[arg(long, default_value = "1,1")]
        n: String,
        #[command(flatten)]
        depth: DepthArg,
    },
    /// Kernel convolution against block products and the Θ-rule.
    ConvolveCheck {
        #[arg(long, default_value = "1,0")]
        n: String,
        /// Circle models: direction of the Laurent kernels.
        #[arg(long, default_value_t = 1)]
        dir: u8,
        #[command(flatten)]
        res: ResolutionArg,
    },
    /// Bratteli diagram of an inclusion chain of AF cores.
    Bratteli(ChainArgs),
    /// Dimension group of the Bratteli diagram.
    K0(ChainArgs),
    /// Minimality and essential freeness evidence.
    Simplicity {
        #[arg(long, default_value_t = 2)]
        budget: usize,
    },
    /// Summary of every applicable computation at default parameters.
    Report {
        /// Include operator, frame, product-system, groupoid, convolution and compactness sections.
        #[arg(long)]
        all: bool,
    },
}

#[derive(Debug, Clone, Args)]
pub struct DepthArg {
    /// Depth `m,n`; defaults to 3,3.
    #[arg(long)]
    pub depth: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct ResolutionArg {
    /// Cylinder depth `m,n`; defaults to 3,3 for symbolic models.
    #[arg(long)]
    pub depth: Option<String>,
    /// Laurent span `|k| ≤ s` for circle models; defaults to 6.
    #[arg(long)]
    pub span: Option<i64>,
}

#[derive(Debug, Clone, Args)]
pub struct OperatorArgs {
    #[arg(long)]
    pub dir: u8,
    #[command(flatten)]
    pub res: ResolutionArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ChainMode {
    /// `kgraph` for rank-2 graph models, `matched` otherwise.
    Auto,
    /// Level t is the full matrix algebra on depth n(t).
    Matched,
    /// Every level on the depth of the last chain entry plus (1,1), one vertex per class.
    Common,
    /// Path-space construction straight from the rank-2 graph.
    Kgraph,
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    /// Chain entries `m,n`, separated by `;` or given repeatedly. Defaults to a diagonal chain.
    #[arg(long, num_args = 1..)]
    pub chain: Vec<String>,
    /// Length of the default diagonal chain (0,0), (1,1), ….
    #[arg(long, default_value_t = 4)]
    pub levels: usize,
    #[arg(long, value_enum, default_value_t = ChainMode::Auto)]
    pub mode: ChainMode,
}
