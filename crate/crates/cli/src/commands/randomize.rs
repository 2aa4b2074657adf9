use std::path::{Path, PathBuf};

use clap::Args;
use parcs_core::guideline::{parse_guideline, Guideline};
use parcs_core::pdl::{parse_description, serialize_graph, PartialGraph};
use parcs_core::randomize::{randomize, replay as replay_trace, RandomizationTrace};
use parcs_core::seed::derive_seed;

use super::{fan_out, iteration_name};
use crate::error::CliError;
use crate::files::{create_dir, read_text, write_text};
use crate::manifest::RunRecord;
use crate::{record, Common, DEFAULT_ITERATIONS};

#[derive(Debug, Args)]
pub struct RandomizeArgs {
    /// Partial graph description.
    pub partial: PathBuf,
    /// Randomization guideline; built-in defaults when omitted.
    pub guideline: Option<PathBuf>,
    #[arg(short = 'N', long, default_value_t = DEFAULT_ITERATIONS)]
    pub iterations: u64,
    #[arg(short, long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct ReplayArgs {
    pub partial: PathBuf,
    pub trace: PathBuf,
    #[arg(short, long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

pub(crate) fn load_description(path: &Path) -> Result<PartialGraph, CliError> {
    parse_description(&read_text(path)?).map_err(|e| CliError::user(format!("{}:{e}", path.display())))
}

pub(crate) fn load_guideline(path: Option<&PathBuf>) -> Result<Guideline, CliError> {
    match path {
        Some(p) => parse_guideline(&read_text(p)?).map_err(|e| CliError::user(format!("{}:{e}", p.display()))),
        None => Ok(Guideline::default()),
    }
}

pub fn run(args: &RandomizeArgs) -> Result<RunRecord, CliError> {
    let pg = load_description(&args.partial)?;
    let guideline = load_guideline(args.guideline.as_ref())?;
    create_dir(&args.out_dir)?;
    let master = args.common.seed;
    let written = fan_out(args.iterations, |i| {
        let seed = derive_seed(master, i);
        let (graph, trace) = randomize(&pg, &guideline, seed).map_err(|e| CliError::user(e.to_string()))?;
        let gpath = args.out_dir.join(iteration_name("graph", i, "pdl"));
        let tpath = args.out_dir.join(iteration_name("trace", i, "json"));
        write_text(&gpath, &serialize_graph(&graph))?;
        write_text(&tpath, &(trace.to_json() + "\n"))?;
        Ok((seed, [gpath, tpath]))
    })?;
    let mut inputs = vec![args.partial.clone()];
    inputs.extend(args.guideline.iter().cloned());
    let seeds = written.iter().map(|(s, _)| *s).collect();
    let outputs = written.into_iter().flat_map(|(_, p)| p).collect();
    Ok(record(inputs, outputs, seeds))
}

pub fn replay(args: &ReplayArgs) -> Result<RunRecord, CliError> {
    let pg = load_description(&args.partial)?;
    let trace = RandomizationTrace::from_json(&read_text(&args.trace)?)
        .map_err(|e| CliError::user(format!("{}: {e}", args.trace.display())))?;
    let graph = replay_trace(&pg, &trace).map_err(|e| CliError::user(e.to_string()))?;
    write_text(&args.out, &serialize_graph(&graph))?;
    Ok(record(
        vec![args.partial.clone(), args.trace.clone()],
        vec![args.out.clone()],
        vec![trace.seed],
    ))
}
