//! `reflex` — log summarization benchmarking pipeline.
//!
//! Subcommands mirror the pipeline stages: `ingest` raw logs into grouped
//! interchange files, `summarize` groups with configured backends,
//! `evaluate` candidate/reference pairs with individual metrics, `bench`
//! whole dataset x backend matrices, and `report` records as tables.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or config error. All
//! diagnostics go to stderr; data goes to stdout or `--out`.

mod commands;
mod out;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "reflex", version, about = "Generate and evaluate log summaries")]
struct Cli {
    /// Suppress progress output on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse raw logs, filter noise, and chunk them into log groups.
    Ingest(IngestArgs),
    /// Generate summaries for every group with one or more backends.
    Summarize(SummarizeArgs),
    /// Score (candidate, reference) or (logs, candidate) pairs.
    #[command(subcommand)]
    Evaluate(EvaluateCommand),
    /// Run a full datasets x backends x metrics benchmark.
    Bench(BenchArgs),
    /// Render benchmark records as markdown, CSV, or JSON tables.
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Syslog,
    Json,
    Apache,
    Plain,
    Paired,
}

#[derive(Args)]
struct IngestArgs {
    /// Input log file.
    #[arg(long)]
    input: PathBuf,
    /// Input layout; `paired` expects blocks terminated by `Summary:` lines.
    #[arg(long, value_enum)]
    format: FormatArg,
    /// Lines per group for raw inputs.
    #[arg(long, default_value_t = reflex_core::ingest::DEFAULT_GROUP_SIZE)]
    group_size: usize,
    /// Output interchange file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Disable the stock noise filters (debug-and-below levels, heartbeats).
    #[arg(long)]
    no_default_filters: bool,
    /// Additional drop-pattern (regex over the message); repeatable.
    #[arg(long = "filter-pattern")]
    filter_patterns: Vec<String>,
    /// Drop lines at or below this level (e.g. DEBUG).
    #[arg(long = "filter-level")]
    filter_level: Option<String>,
    /// Dataset name; defaults to the input file stem.
    #[arg(long)]
    dataset: Option<String>,
}

#[derive(Args)]
struct SummarizeArgs {
    /// Interchange file produced by `reflex ingest`.
    #[arg(long)]
    dataset: PathBuf,
    /// Backend config file (TOML); repeatable.
    #[arg(long = "backend", required = true)]
    backends: Vec<PathBuf>,
    /// Output file for summary records; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Maximum in-flight backend requests.
    #[arg(long, default_value_t = 4)]
    concurrency: usize,
}

#[derive(Subcommand)]
enum EvaluateCommand {
    /// ROUGE-1/2/L over (candidate, reference) pairs.
    Rouge(EvaluateRougeArgs),
    /// Embedding-cosine or LLM-judge scoring.
    Reflex(EvaluateReflexArgs),
}

#[derive(Args)]
struct EvaluateRougeArgs {
    /// Line-delimited pair records: {"candidate": ..., "reference": ...}.
    #[arg(long)]
    pairs: PathBuf,
    /// Which score component to report.
    #[arg(long, default_value = "f1")]
    mode: String,
    /// Output file for per-pair records; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReflexModeArg {
    Embedding,
    Judge,
}

#[derive(Args)]
struct EvaluateReflexArgs {
    /// embedding (reference required) or judge (reference-free).
    #[arg(long, value_enum)]
    mode: ReflexModeArg,
    /// Pair records; judge mode reads log lines from the `messages` field.
    #[arg(long)]
    pairs: PathBuf,
    /// Embedding provider config (embedding mode).
    #[arg(long)]
    provider: Option<PathBuf>,
    /// Judge backend config (judge mode).
    #[arg(long)]
    judge_backend: Option<PathBuf>,
    /// Output file for per-pair records; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Run config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Validate the config and print the work plan without running anything.
    #[arg(long)]
    dry_run: bool,
}

#[derive(Args)]
struct ReportArgs {
    /// Records file produced by `reflex bench` or `reflex evaluate`.
    #[arg(long)]
    records: PathBuf,
    /// Output format.
    #[arg(long)]
    format: String,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Errors split by exit code.
pub enum CliError {
    /// Exit 2: bad flags, unreadable/invalid configs, incompatible requests.
    Usage(String),
    /// Exit 1: failures after validation (I/O, malformed data files).
    Runtime(String),
}

impl CliError {
    fn usage(message: impl Into<String>) -> CliError {
        CliError::Usage(message.into())
    }

    fn runtime(message: impl Into<String>) -> CliError {
        CliError::Runtime(message.into())
    }
}

fn main() {
    let cli = Cli::parse();
    let quiet = cli.quiet;
    let result = match cli.command {
        Command::Ingest(args) => commands::ingest::run(args, quiet),
        Command::Summarize(args) => commands::summarize::run(args, quiet),
        Command::Evaluate(EvaluateCommand::Rouge(args)) => commands::evaluate::run_rouge(args, quiet),
        Command::Evaluate(EvaluateCommand::Reflex(args)) => commands::evaluate::run_reflex(args, quiet),
        Command::Bench(args) => commands::bench::run(args, quiet),
        Command::Report(args) => commands::report::run(args, quiet),
    };
    match result {
        Ok(()) => {}
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            std::process::exit(2);
        }
        Err(CliError::Runtime(message)) => {
            eprintln!("error: {message}");
            std::process::exit(1);
        }
    }
}
