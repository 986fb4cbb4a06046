//! Command line: `extract`, `select`, `run` and `bench`.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use freshx_core::{ByMode, Dataset, PcaError, PcaPlacement, Registry, SelectionConfig};
use log::info;

use crate::config::{load_registry, ConfigError};
use crate::ingest::{self, CsvOptions, IngestError, LongSchema};
use crate::pipeline::{self, PipelineError};
use crate::synth::{self, SynthError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "freshx", version, about = "Time series feature extraction with hypothesis-test based selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extract the feature matrix of a dataset.
    Extract(ExtractArgs),
    /// Test every column of a feature matrix and keep the relevant ones.
    Select(SelectArgs),
    /// Extraction and selection in one go, optionally with PCA.
    Run(RunArgs),
    /// Time extraction and selection on synthetic data; prints CSV.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Long,
    Wide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ByModeArg {
    Global,
    PerFeature,
}

impl From<ByModeArg> for ByMode {
    fn from(m: ByModeArg) -> Self {
        match m {
            ByModeArg::Global => ByMode::Global,
            ByModeArg::PerFeature => ByMode::PerFeature,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PcaArg {
    None,
    Before,
    After,
}

impl From<PcaArg> for PcaPlacement {
    fn from(p: PcaArg) -> Self {
        match p {
            PcaArg::None => PcaPlacement::None,
            PcaArg::Before => PcaPlacement::Before,
            PcaArg::After => PcaPlacement::After,
        }
    }
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v <= 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside the valid range (0,1]"))
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(_) => Err(format!("`{s}` is not a positive integer")),
    }
}

fn delimiter(s: &str) -> Result<u8, String> {
    match s.as_bytes() {
        [b] if b.is_ascii() => Ok(*b),
        _ => Err("delimiter must be a single ASCII character".into()),
    }
}

#[derive(Debug, Args)]
pub struct JobsArgs {
    /// Worker threads.
    #[arg(long, env = "FRESHX_JOBS", default_value_t = 1, value_parser = positive)]
    pub jobs: usize,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Time series CSV.
    #[arg(long)]
    pub data: PathBuf,
    /// Static per-entity attributes: an id column, then one column each.
    #[arg(long)]
    pub meta: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Long)]
    pub format: Format,
    /// TOML registry config; defaults to the full catalog.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = ",", value_parser = delimiter)]
    pub delimiter: u8,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub jobs: JobsArgs,
    /// Feature matrix output.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SelectionArgs {
    #[arg(long = "fdr-level", default_value_t = 0.10, value_parser = unit_interval)]
    pub fdr_level: f64,
    #[arg(long = "by-mode", value_enum, default_value_t = ByModeArg::Global)]
    pub by_mode: ByModeArg,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    /// Feature matrix CSV as written by `extract`.
    #[arg(long)]
    pub features: PathBuf,
    /// `id,target` CSV.
    #[arg(long)]
    pub targets: PathBuf,
    #[command(flatten)]
    pub selection: SelectionArgs,
    #[command(flatten)]
    pub jobs: JobsArgs,
    #[arg(long, default_value = ",", value_parser = delimiter)]
    pub delimiter: u8,
    /// Relevant columns of the feature matrix.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-feature test results.
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub targets: PathBuf,
    #[arg(long, value_enum, default_value_t = PcaArg::None)]
    pub pca: PcaArg,
    /// Fraction of variance the retained components explain.
    #[arg(long, default_value_t = 0.95, value_parser = unit_interval)]
    pub variance: f64,
    #[command(flatten)]
    pub selection: SelectionArgs,
    #[command(flatten)]
    pub jobs: JobsArgs,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub report: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Entities.
    #[arg(long, default_value_t = 1000, value_parser = positive)]
    pub samples: usize,
    /// Series length.
    #[arg(long, default_value_t = 1000, value_parser = positive)]
    pub length: usize,
    #[arg(long, default_value_t = 2, value_parser = positive)]
    pub kinds: usize,
    #[command(flatten)]
    pub jobs: JobsArgs,
    #[arg(long, default_value_t = 1, value_parser = positive)]
    pub repeat: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error("cannot write to stdout: {0}")]
    Stdout(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Ingest(_) | CliError::Config(_) => EXIT_DATA,
            CliError::Synth(_) => EXIT_USAGE,
            CliError::Pipeline(e) => pipeline_exit_code(e),
            CliError::Stdout(_) => EXIT_INTERNAL,
        }
    }
}

fn pipeline_exit_code(e: &PipelineError) -> i32 {
    match e {
        PipelineError::Config(_) => EXIT_USAGE,
        PipelineError::TargetLength { .. } | PipelineError::Selection(_) | PipelineError::Model(_) => EXIT_DATA,
        PipelineError::Pca(PcaError::NoConvergence) | PipelineError::Pool(_) => EXIT_INTERNAL,
        PipelineError::Pca(_) => EXIT_DATA,
    }
}

fn load_dataset(args: &DataArgs) -> Result<Dataset, CliError> {
    let options = CsvOptions { delimiter: args.delimiter };
    let dataset = match args.format {
        Format::Long => ingest::read_long_format(&args.data, &LongSchema::default(), &options)?,
        Format::Wide => ingest::read_wide_format(&args.data, &options)?,
    };
    let dataset = match &args.meta {
        Some(path) => {
            let table = ingest::read_meta(path, &options)?;
            dataset.with_meta(&table).map_err(|source| IngestError::Model { path: path.clone(), source })?
        }
        None => dataset,
    };
    info!("{} entities, {} kinds", dataset.n_entities(), dataset.kinds().len());
    Ok(dataset)
}

fn load_config(path: Option<&Path>) -> Result<Registry, CliError> {
    Ok(match path {
        Some(p) => load_registry(p)?,
        None => freshx_core::registry(),
    })
}

fn cmd_extract(args: &ExtractArgs) -> Result<(), CliError> {
    let registry = load_config(args.data.config.as_deref())?;
    let dataset = load_dataset(&args.data)?;
    let matrix = pipeline::extract_all(&dataset, &registry, args.jobs.jobs)?;
    ingest::write_feature_matrix(&matrix, &args.out, &CsvOptions { delimiter: args.data.delimiter })?;
    Ok(())
}

fn cmd_select(args: &SelectArgs) -> Result<(), CliError> {
    let options = CsvOptions { delimiter: args.delimiter };
    let matrix = ingest::read_feature_matrix(&args.features, &options)?;
    let target = ingest::read_targets(&args.targets, matrix.entity_order(), &options)?;
    let config = SelectionConfig {
        q: args.selection.fdr_level,
        by_mode: args.selection.by_mode.into(),
        worker_count: args.jobs.jobs,
        ..SelectionConfig::default()
    };
    let output = pipeline::select(&matrix, &target, &config)?;
    ingest::write_feature_matrix(&output.matrix, &args.out, &options)?;
    ingest::write_relevance_table(&output.table, &args.report, &options)?;
    Ok(())
}

fn cmd_run(args: &RunArgs) -> Result<(), CliError> {
    let options = CsvOptions { delimiter: args.data.delimiter };
    let registry = load_config(args.data.config.as_deref())?;
    let dataset = load_dataset(&args.data)?;
    let target = ingest::read_targets(&args.targets, dataset.entity_order(), &options)?;
    let config = SelectionConfig {
        q: args.selection.fdr_level,
        pca_placement: args.pca.into(),
        pca_variance_fraction: args.variance,
        by_mode: args.selection.by_mode.into(),
        registry,
        worker_count: args.jobs.jobs,
    };
    let output = pipeline::run(&dataset, &target, &config)?;
    ingest::write_feature_matrix(&output.matrix, &args.out, &options)?;
    ingest::write_relevance_table(&output.table, &args.report, &options)?;
    Ok(())
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let parameter = format!("samples={};length={};kinds={};jobs={}", args.samples, args.length, args.kinds, args.jobs.jobs);
    let start = Instant::now();
    let (dataset, target) = synth::gen_classes(args.samples, args.length, args.kinds, 1.0, args.seed)?;
    let generate = start.elapsed().as_secs_f64();
    let registry = freshx_core::registry();
    let config = SelectionConfig { worker_count: args.jobs.jobs, ..SelectionConfig::default() };
    writeln!(out, "phase,parameter,wall_seconds").map_err(CliError::Stdout)?;
    writeln!(out, "generate,{parameter},{generate:.6}").map_err(CliError::Stdout)?;
    for _ in 0..args.repeat {
        let start = Instant::now();
        let matrix = pipeline::extract_all(&dataset, &registry, args.jobs.jobs)?;
        let extract = start.elapsed().as_secs_f64();
        let start = Instant::now();
        pipeline::select(&matrix, &target, &config)?;
        let select = start.elapsed().as_secs_f64();
        writeln!(out, "extract,{parameter},{extract:.6}").map_err(CliError::Stdout)?;
        writeln!(out, "select,{parameter},{select:.6}").map_err(CliError::Stdout)?;
    }
    Ok(())
}

/// Runs a parsed command, writing `bench` rows to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Extract(a) => cmd_extract(a),
        Command::Select(a) => cmd_select(a),
        Command::Run(a) => cmd_run(a),
        Command::Bench(a) => cmd_bench(a, out),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit code. Errors go to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match execute(&cli, &mut lock) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
