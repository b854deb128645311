use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "streamhp", version, about = "Streaming hypergraph partitioning")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Turn a Matrix Market file into a seeded vertex stream (column-net model)
    Convert(ConvertArgs),
    /// Write a synthetic sparse pattern as Matrix Market
    Generate(GenerateArgs),
    /// Partition a vertex stream
    Partition(PartitionArgs),
    /// Score a part vector against a stream or matrix
    Evaluate(EvaluateArgs),
    /// Run a manifest of partitioning jobs and emit CSV
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
pub struct ConvertArgs {
    pub matrix: PathBuf,
    #[arg(short, long)]
    pub out: PathBuf,
    /// Seed of the random vertex order
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(short, long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    pub vertices: usize,
    #[arg(long, default_value_t = 10_000)]
    pub nets: usize,
    #[arg(long, default_value_t = 10.0)]
    pub mean_degree: f64,
    #[arg(long, default_value_t = 64)]
    pub clusters: usize,
    #[arg(long, default_value_t = 0.8)]
    pub locality: f64,
    /// Tail exponent of the degree distribution (> 2)
    #[arg(long, default_value_t = 2.5)]
    pub exponent: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlgArg {
    Random,
    Minmax,
    MinmaxN2p,
    MinmaxL,
    MinmaxBf,
    MinmaxMh,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RefineArg {
    Off,
    Ref,
    RefRlx,
    RefRlxSv,
}

#[derive(Args, Debug)]
pub struct PartitionArgs {
    pub stream: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgArg::MinmaxN2p)]
    pub alg: AlgArg,
    #[arg(short = 'k', long)]
    pub parts: u32,
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
    /// Slots per net (minmax-l, default 5)
    #[arg(long)]
    pub ell: Option<usize>,
    /// Filter size in bits (minmax-bf, default 20000000)
    #[arg(long)]
    pub bf_bits: Option<u64>,
    /// Hash functions (minmax-bf, default 4)
    #[arg(long)]
    pub bf_hashes: Option<u32>,
    /// Hash functions (minmax-mh, default 4)
    #[arg(long)]
    pub mh_hashes: Option<usize>,
    #[arg(long, value_enum, default_value_t = RefineArg::Off)]
    pub refine: RefineArg,
    /// Sweeps per flush (default 4)
    #[arg(long)]
    pub passes: Option<u32>,
    /// Buffer size as a fraction of the stream's pins (default 0.15)
    #[arg(long, conflicts_with = "buffer_pins")]
    pub buffer_frac: Option<f64>,
    /// Buffer size in pins
    #[arg(long)]
    pub buffer_pins: Option<u64>,
    /// Largest buffered degree for ref-rlx-sv (default: running mean, rounded up)
    #[arg(long)]
    pub sv_threshold: Option<u32>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Record the exact cut at this many evenly spaced prefixes
    #[arg(long, default_value_t = 0)]
    pub checkpoints: usize,
    /// Audit balance per step and cross-check the reported numbers
    #[arg(long)]
    pub verify: bool,
    /// Part vector output, one part id per line in vertex order
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Stats JSON output (stdout if omitted)
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Flush trace output, JSON lines
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Stream file or Matrix Market file
    pub input: PathBuf,
    pub part_vector: PathBuf,
    #[arg(short = 'k', long)]
    pub parts: u32,
    /// Metrics JSON output (stdout if omitted)
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    pub manifest: PathBuf,
    /// CSV output (stdout if omitted)
    #[arg(short, long)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(short, long)]
    pub jobs: Option<usize>,
}
