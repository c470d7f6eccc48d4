use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jacobi_core::Mode;

#[derive(Parser, Debug)]
#[command(name = "jacobi", version, about = "Exact computations with Jacobi diagrams on string links")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Kill isolated chords (fi) or keep them (framed).
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Fi)]
    pub mode: ModeArg,

    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,

    /// Result cache; disabled when neither this nor JACOBI_CACHE_DIR is set.
    #[arg(long, global = true, env = "JACOBI_CACHE_DIR")]
    pub cache_dir: Option<PathBuf>,

    /// Directory for witness files and partial manifests.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    /// Largest degree any command accepts.
    #[arg(long, global = true, default_value_t = 6, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_degree: u64,

    /// Largest strand count any command accepts.
    #[arg(long, global = true, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_strands: u64,

    /// Largest number of diagrams any single enumeration may produce.
    #[arg(long, global = true, default_value_t = 2_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub cap: u64,
}

impl RunConfig {
    pub fn mode(&self) -> Mode {
        match self.mode {
            ModeArg::Fi => Mode::FI,
            ModeArg::Framed => Mode::Framed,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    Fi,
    Framed,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Grade {
    #[arg(long, short = 'm')]
    pub strands: usize,
    #[arg(long, short = 'n')]
    pub degree: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
#[value(rename_all = "verbatim")]
pub enum SpaceArg {
    /// The chord algebra.
    #[value(name = "A", alias = "a")]
    A,
    /// The Lie algebra of trees.
    #[value(name = "L", alias = "l")]
    L,
    /// Size-k forests modulo their relations (needs --size).
    #[value(name = "F", alias = "f")]
    F,
    /// Primitive elements of the chord algebra.
    #[value(name = "P", alias = "p")]
    P,
    /// Span of forests with at most k trees inside the chord algebra (needs --size).
    #[value(name = "S", alias = "s")]
    S,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportWhat {
    /// Ambient basis and quotient representatives.
    Basis,
    /// A relation matrix (needs --kind).
    Relations,
    /// Lie bracket structure constants up to the degree.
    StructureConstants,
    /// Graph of labelled forests of a forest (needs --forest).
    Graph,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// List canonical diagrams.
    Enumerate {
        #[command(flatten)]
        grade: Grade,
        #[arg(long, conflicts_with_all = ["trees", "forests"])]
        chords: bool,
        #[arg(long, conflicts_with = "forests")]
        trees: bool,
        #[arg(long)]
        forests: bool,
        /// Keep only forests with exactly this many trees.
        #[arg(long)]
        size: Option<usize>,
    },
    /// Dimension of a space.
    Dim {
        #[arg(long, value_enum)]
        space: SpaceArg,
        #[command(flatten)]
        grade: Grade,
        #[arg(long)]
        size: Option<usize>,
    },
    /// Run verification suites up to the given degree.
    Verify {
        /// Check names, comma separated, or `all`.
        #[arg(long, value_delimiter = ',', required = true)]
        check: Vec<String>,
        #[command(flatten)]
        grade: Grade,
    },
    /// Bracket of two trees, or all structure constants when none are given.
    Bracket {
        #[command(flatten)]
        grade: Grade,
        x: Option<String>,
        y: Option<String>,
    },
    /// Write a basis, relation matrix, structure constants or forest graph.
    Export {
        #[arg(long, value_enum)]
        what: ExportWhat,
        #[command(flatten)]
        grade: Grade,
        #[arg(long, default_value_t = 1)]
        size: usize,
        /// Relation kind: 1T, AS, IHX, STU, 4T, STU2, SQUARE, HEX.
        #[arg(long)]
        kind: Option<String>,
        /// Space for `basis`.
        #[arg(long, value_enum, default_value_t = SpaceArg::A)]
        space: SpaceArg,
        /// Forest in text form for `graph`.
        #[arg(long)]
        forest: Option<String>,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Filtration table and every check for one configuration.
    Report {
        #[command(flatten)]
        grade: Grade,
    },
}
