use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use aidyn::bdm::{DEFAULT_BLOCK_1D, DEFAULT_BLOCK_2D, DEFAULT_CLASS_1D, DEFAULT_CLASS_2D};
use aidyn::ctm::DEFAULT_CUTOFF;

/// Algorithmic complexity of cellular automata: CTM tables, BDM scores and
/// perturbation experiments.
#[derive(Debug, Parser)]
#[command(name = "aidyn", version, arg_required_else_help = true)]
pub struct Cli {
    /// Worker threads (0 = all cores). Results do not depend on it.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Enumerate an (n,2) Turing machine class and write its CTM table.
    CtmBuild(CtmBuildArgs),
    /// Score a 0/1/2 digit file or plain PGM with BDM.
    Bdm(BdmArgs),
    /// Evolve an elementary cellular automaton and write the spacetime as PGM.
    Eca(EcaArgs),
    /// Single-cell perturbation sweep, or one flip traced over time.
    Perturb(PerturbArgs),
    /// Collide two elementary automata under sampled interaction rules.
    Collide(CollideArgs),
    /// Flip the central cell of evolved Game of Life grids.
    Gol(GolArgs),
}

#[derive(Debug, Args)]
pub struct TableArgs {
    /// CTM table file. Defaults to $AIDYN_TABLE_DIR/ctm-n<N>-k2.tsv, then to
    /// the bundled table.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// State count of the table to resolve when --table is absent.
    #[arg(long)]
    pub class: Option<u32>,
}

#[derive(Debug, Args)]
pub struct CtmBuildArgs {
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, default_value_t = DEFAULT_CUTOFF)]
    pub cutoff: u64,
    /// Output file. Defaults to ctm-n<N>-k<K>.tsv in the current directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Allow the full (4,2) enumeration.
    #[arg(long)]
    pub long_run: bool,
    /// Run a stratified sample of this many machines instead.
    #[arg(long)]
    pub sample: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub sample_seed: u64,
}

#[derive(Debug, Args)]
pub struct BdmArgs {
    /// Input array. One row per line of 0/1/2 digits (2 stands for -1), or P2 PGM.
    pub input: PathBuf,
    /// Block length (1D) or side (2D).
    #[arg(long)]
    pub block: Option<usize>,
    /// Score as a 2D array even if it has a single row, or as 1D if several.
    #[arg(long, value_enum, default_value_t = Dim::Auto)]
    pub dim: Dim,
    #[command(flatten)]
    pub table: TableArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dim {
    Auto,
    One,
    Two,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Init {
    /// A single 1 at the center.
    Single,
    /// Bernoulli cells drawn from --seed.
    Random,
}

#[derive(Debug, Args)]
pub struct EcaArgs {
    #[arg(long)]
    pub rule: u32,
    #[arg(long, default_value_t = 100)]
    pub width: usize,
    #[arg(long, default_value_t = 80)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = Init::Single)]
    pub init: Init,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    /// PGM output file (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    /// Comma-separated rules for the sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [1u32, 2, 22, 30, 54, 100])]
    pub rules: Vec<u32>,
    #[arg(long, default_value_t = 100)]
    pub width: usize,
    #[arg(long, default_value_t = 80)]
    pub steps: usize,
    #[arg(long, default_value_t = 50)]
    pub seeds: u64,
    #[arg(long, default_value_t = DEFAULT_BLOCK_1D)]
    pub block: usize,
    /// Trace one flip instead of sweeping: needs --rule, uses --seed and --flip.
    #[arg(long)]
    pub single: bool,
    #[arg(long, required_if_eq("single", "true"))]
    pub rule: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Flipped position (default: center).
    #[arg(long)]
    pub flip: Option<usize>,
    /// Trace stride in steps.
    #[arg(long, default_value_t = 10)]
    pub every: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[command(flatten)]
    pub table: TableArgs,
}

#[derive(Debug, Args)]
pub struct CollideArgs {
    #[arg(long, default_value_t = 30)]
    pub rule_a: u32,
    #[arg(long, default_value_t = 22)]
    pub rule_b: u32,
    #[arg(long, default_value_t = 40)]
    pub gap: usize,
    #[arg(long, default_value_t = 100)]
    pub steps: usize,
    /// Number of sampled interaction rules (seeds 0..N).
    #[arg(long, default_value_t = 100)]
    pub rules: u64,
    #[arg(long, default_value_t = DEFAULT_BLOCK_1D)]
    pub block: usize,
    /// Also write PGMs of the first N collision spacetimes.
    #[arg(long, default_value_t = 1)]
    pub dump: u64,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[command(flatten)]
    pub table: TableArgs,
}

#[derive(Debug, Args)]
pub struct GolArgs {
    #[arg(long, default_value_t = 64)]
    pub width: usize,
    #[arg(long, default_value_t = 64)]
    pub height: usize,
    #[arg(long, default_value_t = 0.5)]
    pub density: f64,
    #[arg(long, default_value_t = 1000)]
    pub pre_steps: usize,
    #[arg(long, default_value_t = 100)]
    pub post_steps: usize,
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    #[arg(long, default_value_t = DEFAULT_BLOCK_2D)]
    pub block: usize,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[command(flatten)]
    pub table: TableArgs,
}

impl TableArgs {
    pub fn class_or(&self, default: u32) -> u32 {
        self.class.unwrap_or(default)
    }

    pub fn class_1d(&self) -> u32 {
        self.class_or(DEFAULT_CLASS_1D)
    }

    pub fn class_2d(&self) -> u32 {
        self.class_or(DEFAULT_CLASS_2D)
    }
}
