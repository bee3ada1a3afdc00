//! Command-line front end.

mod commands;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::certify::CertifyError;
use crate::kg::KgError;
use crate::model::ModelError;
use crate::sampling::{DistractorMode, SamplingError, SpecKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_MODEL: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

#[derive(Debug, Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: EXIT_USAGE, message: message.into() }
    }

    pub fn io(message: impl Into<String>) -> Self {
        Self { code: EXIT_IO, message: message.into() }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Self { code: EXIT_VALIDATION, message: message.into() }
    }
}

impl From<KgError> for CliError {
    fn from(e: KgError) -> Self {
        let code = match e {
            KgError::Io { .. } | KgError::Format { .. } => EXIT_IO,
            KgError::EmptyGraph | KgError::Invalid(_) => EXIT_VALIDATION,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<SamplingError> for CliError {
    fn from(e: SamplingError) -> Self {
        let code = match e {
            SamplingError::InvalidConfig(_) => EXIT_USAGE,
            _ => EXIT_VALIDATION,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        let code = match e {
            ModelError::InvalidConfig(_) => EXIT_USAGE,
            _ => EXIT_MODEL,
        };
        Self { code, message: e.to_string() }
    }
}

impl From<CertifyError> for CliError {
    fn from(e: CertifyError) -> Self {
        let code = match &e {
            CertifyError::Model { .. } => EXIT_MODEL,
            CertifyError::Io { .. } => EXIT_IO,
            CertifyError::Sampling(SamplingError::InvalidConfig(_)) => EXIT_USAGE,
            _ => EXIT_VALIDATION,
        };
        Self { code, message: e.to_string() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "kgcert", version, about = "Certify knowledge comprehension of a text model over a knowledge graph")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
#[allow(clippy::large_enum_variant)]
pub enum Command {
    /// Build a graph artifact from raw triple, alias and corpus files.
    Preprocess(PreprocessArgs),
    /// Sample pivot nodes from a graph.
    Pivots(PivotsArgs),
    /// Issue certificates for every pivot and kind.
    Certify(CertifyArgs),
    /// Summarize a directory of certificates.
    Report(ReportArgs),
    /// Check interval coverage against a mock model with known accuracy.
    ValidateMock(ValidateMockArgs),
    /// Write sampled prompts as JSON lines without querying a model.
    ExportPrompts(ExportArgs),
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    /// Directory holding triples.tsv, entity_aliases.tsv,
    /// relation_aliases.tsv and corpus.tsv.
    #[arg(long)]
    pub raw_dir: Option<PathBuf>,
    #[arg(long)]
    pub triples: Option<PathBuf>,
    #[arg(long)]
    pub entity_aliases: Option<PathBuf>,
    #[arg(long)]
    pub relation_aliases: Option<PathBuf>,
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Use the bundled toy dataset instead of files.
    #[arg(long, conflicts_with_all = ["raw_dir", "triples", "entity_aliases", "relation_aliases", "corpus"])]
    pub toy: bool,
    /// Fail on the first malformed line instead of skipping it.
    #[arg(long)]
    pub strict: bool,
    /// Comma-separated relation names to drop (case-insensitive).
    #[arg(long, value_delimiter = ',')]
    pub banned: Option<Vec<String>>,
    #[arg(long)]
    pub out: PathBuf,
    /// Also write the stats report here (it always goes to stdout).
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PivotsArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub count: usize,
    #[arg(long, default_value_t = 2000)]
    pub top_k: usize,
    #[arg(long, default_value_t = 2000)]
    pub min_subgraph_size: usize,
    #[arg(long, default_value_t = crate::sampling::DEFAULT_MAX_HOPS)]
    pub max_hops: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Spec knobs shared by several commands. Unset flags fall back to the
/// config file, then to built-in defaults.
#[derive(Debug, Args, Clone, Default)]
pub struct SpecArgs {
    #[arg(long)]
    pub n_samples: Option<usize>,
    #[arg(long)]
    pub confidence: Option<f64>,
    #[arg(long)]
    pub max_hops: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub few_shot: Option<usize>,
    #[arg(long)]
    pub distractor_mode: Option<DistractorMode>,
    #[arg(long)]
    pub min_options: Option<usize>,
    #[arg(long)]
    pub token_budget: Option<usize>,
    /// TOML file with spec defaults and an optional [endpoint] table.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct ModelArgs {
    /// `mock:<mode>` or `http`.
    #[arg(long, default_value = "mock:always-correct")]
    pub model: String,
    #[arg(long)]
    pub base_url: Option<String>,
    #[arg(long)]
    pub model_name: Option<String>,
    /// Environment variable holding the API key.
    #[arg(long)]
    pub api_key_env: Option<String>,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long)]
    pub max_tokens: Option<u32>,
    /// Request timeout in seconds.
    #[arg(long)]
    pub timeout: Option<f64>,
    #[arg(long)]
    pub max_retries: Option<u32>,
    /// Requests per second.
    #[arg(long)]
    pub rate_limit: Option<f64>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Pivot list file, one id per line.
    #[arg(long, required_unless_present = "pivot")]
    pub pivots: Option<PathBuf>,
    /// Pivot id; may be repeated.
    #[arg(long)]
    pub pivot: Vec<String>,
    /// Kinds to certify; defaults to all three.
    #[arg(long, value_delimiter = ',')]
    pub kind: Vec<SpecKind>,
    #[command(flatten)]
    pub spec: SpecArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Worker threads (0 = one per core; capped by the endpoint's in-flight limit).
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Timestamp to record; defaults to SOURCE_DATE_EPOCH, then the clock.
    #[arg(long)]
    pub created_at: Option<String>,
    /// Recompute certificates that already exist.
    #[arg(long)]
    pub force: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Directory of cert_*.json files.
    #[arg(long)]
    pub certs: PathBuf,
    /// Where to write summary.json and per_hop.json; defaults to --certs.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Confidence of the pooled per-hop intervals.
    #[arg(long, default_value_t = crate::sampling::DEFAULT_CONFIDENCE)]
    pub confidence: f64,
}

#[derive(Debug, Args)]
pub struct ValidateMockArgs {
    #[arg(long, default_value_t = 200)]
    pub runs: usize,
    /// True accuracy of the mock.
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = crate::sampling::DEFAULT_N_SAMPLES)]
    pub n_samples: usize,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Graph artifact; defaults to the bundled toy graph.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Defaults to the highest out-degree node.
    #[arg(long)]
    pub pivot: Option<String>,
    #[arg(long, default_value = "vanilla")]
    pub kind: SpecKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Write the coverage report as JSON here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub pivot: String,
    #[arg(long, default_value = "vanilla")]
    pub kind: SpecKind,
    #[command(flatten)]
    pub spec: SpecArgs,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` and runs the command. Help and version requests succeed.
pub fn run<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::usage(e.render().to_string())),
    };
    match cli.command {
        Command::Preprocess(a) => commands::preprocess(a),
        Command::Pivots(a) => commands::pivots(a),
        Command::Certify(a) => commands::certify_cmd(a),
        Command::Report(a) => commands::report(a),
        Command::ValidateMock(a) => commands::validate_mock(a),
        Command::ExportPrompts(a) => commands::export_prompts(a),
    }
}

/// Runs the CLI and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match run(args) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message.trim_end());
            e.code
        }
    }
}
