//! `parcs` command line: validate descriptions, sample datasets, randomize
//! partial descriptions, generate missing-data and LiNGAM benchmarks.
//!
//! Exit status is 0 on success, 2 for user or description errors and 3 for
//! IO errors.

mod commands;
pub mod error;
mod files;
pub mod manifest;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{CliError, EXIT_USER};
use crate::manifest::{digests, normalize_argv, RunManifest, RunRecord};

pub use commands::lingam::LingamArgs;
pub use commands::missing::MissingArgs;
pub use commands::randomize::{RandomizeArgs, ReplayArgs};
pub use commands::sample::SampleArgs;
pub use commands::validate::ValidateArgs;

/// File name of the manifest written into output directories.
pub const MANIFEST_NAME: &str = "manifest.json";

/// Default number of iterations of `randomize` and `missing`.
pub const DEFAULT_ITERATIONS: u64 = 10;

#[derive(Debug, Parser)]
#[command(name = "parcs", version, about = "Partially randomized causal simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a graph description.
    Validate(ValidateArgs),
    /// Sample a fully specified graph to CSV.
    Sample(SampleArgs),
    /// Complete a partial description N times under a guideline.
    Randomize(RandomizeArgs),
    /// Rebuild one randomized graph from its trace.
    Replay(ReplayArgs),
    /// Generate masked datasets from m-graphs.
    Missing(MissingArgs),
    /// Generate LiNGAM benchmark datasets.
    Lingam(LingamArgs),
    /// Re-execute a recorded run and compare its outputs.
    Rerun(RerunArgs),
}

/// Flags shared by every subcommand except `rerun`.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Master seed.
    #[arg(long, env = "PARCS_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Write a run manifest (JSON) to this path.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RerunArgs {
    pub manifest: PathBuf,
    /// Skip the output comparison.
    #[arg(long)]
    pub no_check: bool,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Validate(_) => "validate",
            Command::Sample(_) => "sample",
            Command::Randomize(_) => "randomize",
            Command::Replay(_) => "replay",
            Command::Missing(_) => "missing",
            Command::Lingam(_) => "lingam",
            Command::Rerun(_) => "rerun",
        }
    }

    /// Where the manifest goes when `--manifest` is not given.
    fn default_manifest(&self) -> Option<PathBuf> {
        match self {
            Command::Randomize(a) => Some(a.out_dir.join(MANIFEST_NAME)),
            Command::Missing(a) => Some(a.out_dir.join(MANIFEST_NAME)),
            Command::Lingam(a) => Some(a.out_dir.join(MANIFEST_NAME)),
            _ => None,
        }
    }

    fn common(&self) -> Option<&Common> {
        match self {
            Command::Validate(a) => Some(&a.common),
            Command::Sample(a) => Some(&a.common),
            Command::Randomize(a) => Some(&a.common),
            Command::Replay(a) => Some(&a.common),
            Command::Missing(a) => Some(&a.common),
            Command::Lingam(a) => Some(&a.common),
            Command::Rerun(_) => None,
        }
    }
}

/// Parses `args` (program name first) and runs; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USER } else { 0 };
        }
    };
    let tail: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match execute(cli.command, &tail) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn execute(command: Command, argv: &[String]) -> Result<(), CliError> {
    let name = command.name();
    let common = command.common().cloned();
    let default_manifest = command.default_manifest();
    let record = match command {
        Command::Validate(a) => commands::validate::run(&a)?,
        Command::Sample(a) => commands::sample::run(&a)?,
        Command::Randomize(a) => commands::randomize::run(&a)?,
        Command::Replay(a) => commands::randomize::replay(&a)?,
        Command::Missing(a) => commands::missing::run(&a)?,
        Command::Lingam(a) => commands::lingam::run(&a)?,
        Command::Rerun(a) => return rerun(&a),
    };
    let Some(Common { seed, manifest }) = common else {
        return Ok(());
    };
    if let Some(path) = manifest.or(default_manifest) {
        let cwd = std::env::current_dir().map_err(|e| CliError::io(&PathBuf::from("."), e))?;
        let manifest = RunManifest {
            engine_version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: name.to_string(),
            argv: normalize_argv(argv, seed),
            cwd: cwd.display().to_string(),
            inputs: digests(&record.inputs)?,
            master_seed: seed,
            iterations: record.seeds.len() as u64,
            seeds: record.seeds,
            outputs: digests(&record.outputs)?,
        };
        manifest.save(&path)?;
    }
    Ok(())
}

fn rerun(args: &RerunArgs) -> Result<(), CliError> {
    let m = RunManifest::load(&args.manifest)?;
    if m.subcommand == "rerun" {
        return Err(CliError::user("a rerun cannot be rerun"));
    }
    std::env::set_current_dir(&m.cwd).map_err(|e| CliError::io(&PathBuf::from(&m.cwd), e))?;
    for input in &m.inputs {
        let now = files::sha256_file(&PathBuf::from(&input.path))?;
        if now != input.sha256 {
            return Err(CliError::user(format!("input {} changed since the recorded run", input.path)));
        }
    }
    let mut full = vec!["parcs".to_string()];
    full.extend(m.argv.iter().cloned());
    let cli = Cli::try_parse_from(&full).map_err(|e| CliError::user(format!("recorded arguments no longer parse: {e}")))?;
    execute(cli.command, &m.argv)?;
    if args.no_check {
        return Ok(());
    }
    let mut differing = Vec::new();
    for out in &m.outputs {
        if files::sha256_file(&PathBuf::from(&out.path))? != out.sha256 {
            differing.push(out.path.clone());
        }
    }
    if differing.is_empty() {
        println!("reproduced {} outputs byte for byte", m.outputs.len());
        Ok(())
    } else {
        Err(CliError::user(format!("outputs differ from the recorded run: {}", differing.join(", "))))
    }
}

/// Shared by commands that fan out over iterations.
pub(crate) fn record(inputs: Vec<PathBuf>, outputs: Vec<PathBuf>, seeds: Vec<u64>) -> RunRecord {
    RunRecord { inputs, outputs, seeds }
}
