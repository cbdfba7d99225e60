use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "qfa", version, about = "Quantum finite automata under strict cutpoints")]
pub struct Cli {
    /// Directory for reports and generated automata (created if missing).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Seed for every random choice; recorded in each report.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Tolerance override, e.g. `eq=1e-10` (keys: herm, psd, eq, rank).
    #[arg(long = "tol", global = true, value_name = "KEY=VAL")]
    pub tol: Vec<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a prepare-test witness automaton and verify that it shatters.
    Witness(WitnessArgs),
    /// Witness, linearization, stochasticization and end-to-end agreement.
    Pipeline(PipelineArgs),
    /// Spectral and rank analysis of a sign matrix.
    Analyze(AnalyzeArgs),
    /// Evaluate an automaton on words.
    Simulate(SimulateArgs),
    /// Turn a QCFA or MO-1QFA into an equivalent generalized automaton.
    Linearize(LinearizeArgs),
    /// Turn a generalized automaton with cutpoint λ into a PFA with cutpoint 1/2.
    Stochasticize(StochasticizeArgs),
    /// Build a sign matrix from an automaton or a named family.
    Signmatrix(SignmatrixArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WitnessKind {
    Qcfa,
    Moqfa,
}

#[derive(Debug, Args)]
pub struct WitnessParams {
    pub kind: WitnessKind,

    /// Classical states of the QCFA witness.
    #[arg(long, default_value_t = 2)]
    pub c: usize,

    /// Quantum dimension of the QCFA witness.
    #[arg(long, default_value_t = 2)]
    pub q: usize,

    /// Dimension of the MO-1QFA witness.
    #[arg(long, default_value_t = 2)]
    pub n: usize,

    /// Test vectors: `full` or `sample:N`.
    #[arg(long, default_value = "full")]
    pub eta: String,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[command(flatten)]
    pub params: WitnessParams,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub params: WitnessParams,

    /// Longest word checked over the sub-alphabet.
    #[arg(long, default_value_t = 4)]
    pub max_len: usize,

    /// Comma-separated sub-alphabet; defaults to the first prepare and the
    /// first test symbol.
    #[arg(long, value_delimiter = ',')]
    pub symbols: Vec<String>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Sign matrix JSON (`rows`, `cols`, `signs`).
    pub file: PathBuf,

    /// Real matrix to test as a realization (a realization report, a sign
    /// matrix, or a bare array of rows).
    #[arg(long)]
    pub realization: Option<PathBuf>,

    /// Require the spectral lower bound; fails on non-square input.
    #[arg(long)]
    pub forster: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Automaton JSON.
    pub file: PathBuf,

    /// Words to evaluate, symbols separated by spaces (`""` is the empty word).
    pub words: Vec<String>,

    /// Also evaluate every word up to this length.
    #[arg(long)]
    pub max_len: Option<usize>,

    #[arg(long, default_value = "1/2")]
    pub cutpoint: String,
}

#[derive(Debug, Args)]
pub struct LinearizeArgs {
    /// QCFA or MO-1QFA JSON.
    pub file: PathBuf,

    /// Equivalence is checked on every word up to this length.
    #[arg(long, default_value_t = 2)]
    pub max_len: usize,
}

#[derive(Debug, Args)]
pub struct StochasticizeArgs {
    /// GFA JSON.
    pub file: PathBuf,

    /// Cutpoint of the input automaton, decimal or `p/q`.
    #[arg(long)]
    pub cutpoint: String,

    /// Agreement is checked on every word up to this length.
    #[arg(long, default_value_t = 4)]
    pub max_len: usize,

    /// Convert and verify in exact rational arithmetic.
    #[arg(long)]
    pub exact: bool,
}

#[derive(Debug, Args)]
pub struct SignmatrixArgs {
    /// Automaton JSON providing the values.
    pub file: Option<PathBuf>,

    /// Prefix word (repeatable).
    #[arg(long = "prefix")]
    pub prefixes: Vec<String>,

    /// Suffix word (repeatable).
    #[arg(long = "suffix")]
    pub suffixes: Vec<String>,

    /// Use the witness grid: `p:` symbols as prefixes, `tau:` symbols as suffixes.
    #[arg(long)]
    pub grid: bool,

    /// All words up to this length as both prefixes and suffixes.
    #[arg(long)]
    pub words: Option<usize>,

    #[arg(long, default_value = "1/2")]
    pub cutpoint: String,

    /// Also write the low-rank realization (MO-1QFA and PFA inputs).
    #[arg(long)]
    pub realize: bool,

    /// Complete shattering matrix `C_d`.
    #[arg(long, conflicts_with_all = ["file", "hadamard", "random"])]
    pub shattering: Option<usize>,

    /// Sylvester-Hadamard matrix of order `L`.
    #[arg(long, conflicts_with_all = ["file", "random"])]
    pub hadamard: Option<usize>,

    /// Uniform random `L×L` sign matrix from the seed.
    #[arg(long, conflicts_with = "file")]
    pub random: Option<usize>,

    /// Also write the matrix as CSV.
    #[arg(long)]
    pub csv: bool,
}
