use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use parcs_core::io::{write_mask, write_masked};
use parcs_core::missing::{apply_missingness, build_mgraph, sample_mgraph, MGraphConfig, Mechanism, Preset, ZSource};
use parcs_core::pdl::serialize_graph;
use parcs_core::seed::derive_seed;

use super::randomize::{load_description, load_guideline};
use super::{fan_out, iteration_name};
use crate::error::CliError;
use crate::files::{create_dir, read_csv, write_text, write_with};
use crate::manifest::RunRecord;
use crate::{record, Common, DEFAULT_ITERATIONS};

/// Rows drawn per dataset when no dataset is ingested.
pub const DEFAULT_ROWS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    Plain,
    Rtor,
    Nonlinear,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Preset {
        match p {
            PresetArg::Plain => Preset::Plain,
            PresetArg::Rtor => Preset::RToR,
            PresetArg::Nonlinear => Preset::Nonlinear,
        }
    }
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["data", "graph"]))]
pub struct MissingArgs {
    /// Dataset whose columns become the substantive variables.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Fully specified graph over the substantive variables.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// mcar, mnar, sc, nsc, mar(A,B) or mar+mcar(A,B).
    #[arg(short, long)]
    pub mechanism: String,
    /// Target missing ratio per indicator, in (0, 1).
    #[arg(short, long)]
    pub ratio: f64,
    /// Probability of each admissible `Z -> R` edge.
    #[arg(long)]
    pub sparsity: Option<f64>,
    /// Probability of each `R -> R` edge.
    #[arg(long, default_value_t = 0.0)]
    pub r_density: f64,
    #[arg(long, value_enum, default_value_t = PresetArg::Plain)]
    pub preset: PresetArg,
    #[arg(long)]
    pub guideline: Option<PathBuf>,
    #[arg(short = 'N', long, default_value_t = DEFAULT_ITERATIONS)]
    pub iterations: u64,
    /// Rows per dataset; with `--data`, resample the dataset to this size.
    #[arg(short, long)]
    pub n: Option<usize>,
    #[arg(short, long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

pub fn run(args: &MissingArgs) -> Result<RunRecord, CliError> {
    let mechanism: Mechanism = args
        .mechanism
        .parse()
        .map_err(CliError::User)?;
    if !(args.ratio > 0.0 && args.ratio < 1.0) {
        return Err(CliError::user(format!("--ratio must lie strictly between 0 and 1, got {}", args.ratio)));
    }
    let guideline = load_guideline(args.guideline.as_ref())?;
    let mut inputs: Vec<PathBuf> = args.guideline.iter().cloned().collect();

    let (z_graph, data) = match (&args.graph, &args.data) {
        (Some(p), _) => {
            inputs.push(p.clone());
            let pg = load_description(p)?;
            if !pg.is_fully_specified() {
                return Err(CliError::user(format!(
                    "{}: the substantive graph must be fully specified",
                    p.display()
                )));
            }
            let g = pg.to_graph().map_err(|e| CliError::user(format!("{}: {e}", p.display())))?;
            (Some(g), None)
        }
        (None, Some(p)) => {
            inputs.push(p.clone());
            (None, Some(read_csv(p)?))
        }
        (None, None) => unreachable!("clap requires a source"),
    };

    let mut cfg = MGraphConfig::new(mechanism.clone(), args.ratio);
    cfg.sparsity = args.sparsity;
    cfg.r_density = args.r_density;
    cfg.preset = args.preset.into();

    create_dir(&args.out_dir)?;
    let master = args.common.seed;
    let written = fan_out(args.iterations, |i| {
        let seed = derive_seed(master, i);
        let z = match (&z_graph, &data) {
            (Some(g), _) => ZSource::Graph(g),
            (None, Some(d)) => ZSource::Dataset(&d.names),
            (None, None) => unreachable!(),
        };
        let fail = |e: parcs_core::missing::MissingError| CliError::user(format!("iteration {i}: {e}"));
        let m = build_mgraph(&z, &cfg, &guideline, seed, data.as_ref()).map_err(fail)?;
        let sample_seed = derive_seed(seed, 1);
        let rows_data = match (&data, args.n) {
            (Some(d), Some(n)) => Some(d.resample(n, sample_seed)),
            (Some(d), None) => Some(d.clone()),
            (None, _) => None,
        };
        let n = args.n.unwrap_or(DEFAULT_ROWS);
        let (zt, rt) = sample_mgraph(&m, n, sample_seed, rows_data.as_ref()).map_err(fail)?;
        let masked = apply_missingness(&zt, &rt).map_err(fail)?;

        let data_path = args.out_dir.join(iteration_name("data", i, "csv"));
        let mask_path = args.out_dir.join(iteration_name("data", i, "mask.csv"));
        let meta_path = args.out_dir.join(iteration_name("data", i, "meta"));
        let graph_path = args.out_dir.join(iteration_name("mgraph", i, "pdl"));
        let trace_path = args.out_dir.join(iteration_name("trace", i, "json"));
        write_with(&data_path, |w| write_masked(w, &masked))?;
        write_with(&mask_path, |w| write_mask(w, &masked))?;

        let mut meta = String::new();
        let _ = writeln!(meta, "mechanism={mechanism}");
        let _ = writeln!(meta, "ratio={}", args.ratio);
        let _ = writeln!(meta, "seed={seed}");
        let _ = writeln!(meta, "rows={}", zt.n_rows());
        for (name, r) in masked.names.iter().zip(&masked.achieved_ratio) {
            let _ = writeln!(meta, "achieved_ratio.{name}={r}");
        }
        write_text(&meta_path, &meta)?;
        write_text(&graph_path, &serialize_graph(&m.graph))?;
        write_text(&trace_path, &(m.trace.to_json() + "\n"))?;
        Ok((seed, [data_path, mask_path, meta_path, graph_path, trace_path]))
    })?;
    let seeds = written.iter().map(|(s, _)| *s).collect();
    let outputs = written.into_iter().flat_map(|(_, p)| p).collect();
    Ok(record(inputs, outputs, seeds))
}
