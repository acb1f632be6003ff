//! Batch front-end: each subcommand runs one stage from a TOML config and
//! writes CSV/JSON artifacts plus a hashed `manifest.json`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

pub mod config;
pub mod output;
pub mod stages;

pub use config::{load, RunConfig, Stage};
pub use output::{write_all, Artifact};
pub use stages::execute;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] hetq_core::Error),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Compute(_) | CliError::Io(_) => 2,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "hetq",
    version,
    about = "Robust control, decoupling and entanglement pipeline for spin ensembles"
)]
pub struct Cli {
    /// Seed for every random draw; overrides `run.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel stages.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Directory receiving the artifacts; overrides `run.output_dir`.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    /// `section.key=value`, applied on top of the config file. Repeatable.
    #[arg(long = "override", global = true, value_name = "SECTION.KEY=VALUE")]
    pub overrides: Vec<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct StageArgs {
    /// Config file; defaults are used for anything it leaves out.
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the stage named by `run.stage` in the config.
    Run { config: PathBuf },
    /// Common control-strain window of a random emitter ensemble.
    StrainWindow(StageArgs),
    /// Strain-driven Rabi oscillation and π-flip fidelity.
    Rabi(StageArgs),
    /// Composite π pulses and their infidelity maps.
    Composite(StageArgs),
    /// Robust π pulse optimized over an error grid.
    Grape(StageArgs),
    /// Filter functions of decoupling sequences.
    Filter(StageArgs),
    /// T2 and stretch exponent over an error grid.
    Coherence(StageArgs),
    /// Sample temperature traces under both drive schemes.
    Thermal(StageArgs),
    /// Link errors, link table and quantum volume for one sequence.
    Links(StageArgs),
    /// Drive waveform and coincidence schedule between two registers.
    Compile(StageArgs),
    /// Every stage end to end for both decoupling schemes.
    FullPipeline(StageArgs),
}

impl Command {
    fn resolve(&self) -> (Option<Stage>, Option<&Path>) {
        let (stage, args) = match self {
            Command::Run { config } => return (None, Some(config.as_path())),
            Command::StrainWindow(a) => (Stage::StrainWindow, a),
            Command::Rabi(a) => (Stage::Rabi, a),
            Command::Composite(a) => (Stage::Composite, a),
            Command::Grape(a) => (Stage::Grape, a),
            Command::Filter(a) => (Stage::Filter, a),
            Command::Coherence(a) => (Stage::Coherence, a),
            Command::Thermal(a) => (Stage::Thermal, a),
            Command::Links(a) => (Stage::Links, a),
            Command::Compile(a) => (Stage::Compile, a),
            Command::FullPipeline(a) => (Stage::FullPipeline, a),
        };
        (Some(stage), args.config.as_deref())
    }
}

/// Result of a successful invocation.
#[derive(Debug)]
pub struct Outcome {
    pub stage: Stage,
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let (stage, path) = cli.command.resolve();
    let cfg = load(path, &cli.overrides)?;
    let stage = stage
        .or(cfg.run.stage)
        .ok_or_else(|| CliError::Usage("config does not name a stage (set run.stage)".into()))?;
    let seed = cli.seed.unwrap_or(cfg.run.seed);
    let output_dir = cli
        .output_dir
        .clone()
        .or_else(|| cfg.run.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("hetq-out").join(stage.name()));

    let artifacts = match cli.jobs {
        Some(0) => return Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))?
            .install(|| execute(stage, &cfg, seed))?,
        None => execute(stage, &cfg, seed)?,
    };
    let files = write_all(&output_dir, stage.name(), seed, artifacts)?;
    Ok(Outcome {
        stage,
        output_dir,
        files,
    })
}

/// Parses `args` (including the program name), runs, and returns the exit
/// code: 0 success, 1 usage or config error, 2 computation failure.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(&cli) {
        Ok(out) => {
            println!(
                "{}: wrote {} files to {}",
                out.stage.name(),
                out.files.len(),
                out.output_dir.display()
            );
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
