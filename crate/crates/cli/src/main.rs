//! `protopredict` command-line front end.

mod commands;
mod error;

use std::io::IsTerminal;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "protopredict",
    version,
    about = "Predict prototype cost, performance and usability with LLM backends"
)]
pub struct Cli {
    /// Output format of the success stream.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Mock,
    Remote,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate an exported project-record corpus.
    Ingest(IngestArgs),
    /// Chunk and embed a corpus into a vector index file.
    Index(IndexArgs),
    /// Query a backend n times for one brief and aggregate the answers.
    Predict(PredictArgs),
    /// Run the benchmark over all groups and write tables and figure data.
    Bench(BenchArgs),
    /// Score recorded usability answers against ground-truth keywords.
    Usability(UsabilityArgs),
    /// Print a table, a figure data file or the summary of a benchmark report.
    Report(ReportArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Corpus file (protopredict/corpus-v1).
    #[arg(long)]
    pub corpus: PathBuf,
    /// Fail on the first invalid record instead of skipping it.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct IndexArgs {
    /// Corpus file (protopredict/corpus-v1).
    #[arg(long)]
    pub corpus: PathBuf,
    /// Index file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Embedding dimension.
    #[arg(long, default_value_t = protopredict::assets::DEFAULT_INDEX_DIM)]
    pub dim: usize,
    /// Embedding hash seed.
    #[arg(long, default_value_t = protopredict::assets::DEFAULT_INDEX_SEED)]
    pub seed: u64,
    /// Maximum whitespace tokens per chunk.
    #[arg(long, default_value_t = protopredict::retrieval::DEFAULT_MAX_UNITS)]
    pub max_units: usize,
    /// Tokens shared by neighbouring chunks.
    #[arg(long, default_value_t = protopredict::retrieval::DEFAULT_OVERLAP)]
    pub overlap: usize,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Design brief JSON, or a benchmark case JSON whose refined context is used.
    #[arg(long)]
    pub brief: PathBuf,
    /// cost, performance, usability or refine.
    #[arg(long)]
    pub task: protopredict::gateway::Task,
    /// Number of backend queries.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=1000))]
    pub n: u32,
    /// Evidence chunks retrieved per query.
    #[arg(long, default_value_t = protopredict::retrieval::DEFAULT_K, value_parser = positive)]
    pub k: usize,
    /// Completion backend.
    #[arg(long, value_enum, env = "PROTOPREDICT_BACKEND", hide_env_values = true, default_value_t = Backend::Mock)]
    pub backend: Backend,
    /// Mock profile JSON; the bundled demo profile when absent.
    #[arg(long, env = "PROTOPREDICT_PROFILE", hide_env_values = true)]
    pub profile: Option<PathBuf>,
    /// Run seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Expected unit of a performance prediction.
    #[arg(long)]
    pub unit: Option<String>,
    /// Query without retrieved evidence.
    #[arg(long)]
    pub no_retrieval: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Benchmark cases (protopredict/bench-v1); the bundled cases when absent.
    #[arg(long)]
    pub cases: Option<PathBuf>,
    /// Group sources file; the demo mocks and bundled synthetic human answers when absent.
    #[arg(long)]
    pub sources: Option<PathBuf>,
    /// Queries per case for live groups.
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u32).range(1..=1000))]
    pub n: u32,
    /// Run seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory; defaults to runs/<run_id> under PROTOPREDICT_DATA_DIR.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct UsabilityArgs {
    /// Prediction-record file holding usability answers.
    #[arg(long)]
    pub predictions: PathBuf,
    /// Benchmark cases with ground-truth keywords; the bundled cases when absent.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Word-vector file; the bundled vectors when absent.
    #[arg(long)]
    pub vectors: Option<PathBuf>,
    /// Lemma table; the bundled table when absent.
    #[arg(long)]
    pub lemmas: Option<PathBuf>,
    /// Stopword list; the bundled list when absent.
    #[arg(long)]
    pub stopwords: Option<PathBuf>,
    /// Directory for the scores, matches and histogram files.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Report JSON, or a bench output directory containing report.json.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Figure data to print.
    #[arg(long, conflicts_with = "table", value_parser = clap::builder::PossibleValuesParser::new(FIGURES))]
    pub figure: Option<String>,
    /// Table to print.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(["accuracy", "anova"]))]
    pub table: Option<String>,
}

const FIGURES: [&str; 6] = [
    "err_cost",
    "err_perf",
    "rmse_cost",
    "rmse_perf",
    "usability_hist",
    "summary_bars",
];

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Listen address.
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub addr: SocketAddr,
    /// Index file; the bundled sample-corpus index when absent.
    #[arg(long, env = "PROTOPREDICT_INDEX", hide_env_values = true)]
    pub index: Option<PathBuf>,
    /// Benchmark cases served by /v1/cases; the bundled cases when absent.
    #[arg(long)]
    pub cases: Option<PathBuf>,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

fn main() -> ExitCode {
    // Diagnostics stay off unless asked for so that stderr carries only the error line.
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_ansi(std::io::stderr().is_terminal())
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_env("PROTOPREDICT_LOG").unwrap_or_else(|_| "off".into()),
        )
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return report_error(CliError::Usage(e.render().to_string())),
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => report_error(e),
    }
}

fn report_error(e: CliError) -> ExitCode {
    eprintln!("{}", e.to_json_line());
    ExitCode::from(e.exit_code())
}
