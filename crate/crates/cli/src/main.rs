//! Pipeline driver: build coauthorship networks from publication corpora,
//! detect communities, score segregation, place communities in k-cores, and
//! compare categories with citation metrics and nonparametric tests. Each
//! subcommand persists CSV artifacts plus a manifest so any stage can be
//! rerun from files alone.

mod manifest;
mod stages;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "segnet",
    version,
    about = "Coauthorship segregation analysis pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
pub struct CorpusArgs {
    /// Line-delimited publication corpus (one JSON record per line).
    #[arg(long)]
    pub input: PathBuf,
    /// Discipline label to keep.
    #[arg(long, default_value = "CS")]
    pub field: String,
    /// Focal publication year.
    #[arg(long, default_value_t = 2011)]
    pub year: i32,
}

#[derive(Args, Clone)]
pub struct WeightingArgs {
    /// Link weighting scheme: binary, count, or strength.
    #[arg(long, default_value = "strength")]
    pub weighting: String,
    /// Strength divisor per paper: n-1 or n.
    #[arg(long, default_value = "n-1")]
    pub strength_divisor: String,
}

#[derive(Args, Clone)]
pub struct OutArgs {
    /// Output directory (created if absent).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args)]
pub struct GraphArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub weighting: WeightingArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args)]
pub struct DetectArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub weighting: WeightingArgs,
    /// Detection algorithm: labelprop, fastgreedy, or external.
    #[arg(long, default_value = "labelprop")]
    pub algo: String,
    /// Partition CSV to import when --algo external.
    #[arg(long)]
    pub partition_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Label-propagation sweep limit.
    #[arg(long, default_value_t = 100)]
    pub max_sweeps: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args)]
pub struct SsiArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub weighting: WeightingArgs,
    /// Partition CSV (node_id,community_id).
    #[arg(long, required = true)]
    pub partition_file: PathBuf,
    /// Index denominator norm: l1 or l2.
    #[arg(long, default_value = "l1")]
    pub ssi_norm: String,
    /// Category boundary width in standard deviations.
    #[arg(long, default_value_t = 1.0)]
    pub sigma_k: f64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args)]
pub struct CoresArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub weighting: WeightingArgs,
    #[arg(long, required = true)]
    pub partition_file: PathBuf,
    /// Segregation report CSV from the ssi stage.
    #[arg(long, required = true)]
    pub ssi_file: PathBuf,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args)]
pub struct CitationsArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub weighting: WeightingArgs,
    #[arg(long, required = true)]
    pub partition_file: PathBuf,
    #[arg(long, required = true)]
    pub ssi_file: PathBuf,
    /// Coreness CSV from the cores stage.
    #[arg(long, required = true)]
    pub cores_file: PathBuf,
    /// Last citing year included.
    #[arg(long, default_value_t = 2020)]
    pub window_end: i32,
    /// Counting unit: researcher (one event per citing paper) or paper.
    #[arg(long, default_value = "researcher")]
    pub citation_unit: String,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args)]
pub struct CompareArgs {
    /// Citation profiles CSV from the citations stage.
    #[arg(long, required = true)]
    pub profiles: PathBuf,
    /// Community metrics CSV from the cores stage.
    #[arg(long, required = true)]
    pub metrics: PathBuf,
    /// Optional size-bin lower edges (one integer per line).
    #[arg(long)]
    pub bins_file: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 10)]
    pub teams: usize,
    /// Team size range, inclusive, as lo:hi.
    #[arg(long, default_value = "4:8")]
    pub team_size: String,
    /// Papers per team range as lo:hi.
    #[arg(long, default_value = "4:10")]
    pub papers: String,
    /// Authors per paper range as lo:hi.
    #[arg(long, default_value = "2:4")]
    pub authors: String,
    /// Fraction of papers drawing authors from two teams.
    #[arg(long, default_value_t = 0.0)]
    pub mixing: f64,
    /// Mean citing papers per focal paper.
    #[arg(long, default_value_t = 1.0)]
    pub citation_rate: f64,
    /// Probability a citation comes from the cited team.
    #[arg(long, default_value_t = 0.5)]
    pub internal_bias: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "CS")]
    pub field: String,
    #[arg(long, default_value_t = 2011)]
    pub year: i32,
    #[arg(long, default_value_t = 2020)]
    pub window_end: i32,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Args)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub weighting: WeightingArgs,
    #[arg(long, default_value = "labelprop")]
    pub algo: String,
    #[arg(long)]
    pub partition_file: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub max_sweeps: usize,
    #[arg(long, default_value = "l1")]
    pub ssi_norm: String,
    #[arg(long, default_value_t = 1.0)]
    pub sigma_k: f64,
    #[arg(long, default_value_t = 2020)]
    pub window_end: i32,
    #[arg(long, default_value = "researcher")]
    pub citation_unit: String,
    #[arg(long)]
    pub bins_file: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a corpus and persist its field/year-filtered subsets.
    Ingest(IngestArgs),
    /// Build the coauthorship graph; export edges and the network summary.
    Graph(GraphArgs),
    /// Detect communities; export the partition and its quality.
    Detect(DetectArgs),
    /// Score per-community segregation and categorize.
    Ssi(SsiArgs),
    /// Community-level network, k-core placement, per-community metrics.
    Cores(CoresArgs),
    /// Per-researcher citation profiles, CDFs, and the productivity correlation.
    Citations(CitationsArgs),
    /// Category comparisons: tests per core and bucket, size-controlled
    /// z-scores, KDE grids.
    Compare(CompareArgs),
    /// Generate a synthetic corpus with planted teams and labeled citations.
    Synth(SynthArgs),
    /// Run every stage in order against one corpus.
    Pipeline(PipelineArgs),
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("SEGNET_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n >= 1 => {
                segnet_core::set_thread_cap(n);
            }
            _ => {
                eprintln!("segnet: ignoring invalid SEGNET_THREADS={threads}");
            }
        }
    }
    let cli = Cli::parse();
    let (stage, result) = match cli.command {
        Command::Ingest(args) => ("ingest", stages::ingest(&args)),
        Command::Graph(args) => ("graph", stages::graph(&args)),
        Command::Detect(args) => ("detect", stages::detect(&args)),
        Command::Ssi(args) => ("ssi", stages::ssi(&args)),
        Command::Cores(args) => ("cores", stages::cores(&args)),
        Command::Citations(args) => ("citations", stages::citations(&args)),
        Command::Compare(args) => ("compare", stages::compare(&args)),
        Command::Synth(args) => ("synth", stages::synth(&args)),
        Command::Pipeline(args) => ("pipeline", stages::pipeline(&args)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("segnet: stage {stage} failed: {e:#}");
            ExitCode::FAILURE
        }
    }
}
