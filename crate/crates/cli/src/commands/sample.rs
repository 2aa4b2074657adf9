use std::path::PathBuf;

use clap::Args;
use parcs_core::graph::{
    instantiate_with_data, intervene, sample, sample_with_data, sample_with_errors, sample_with_errors_and_data,
    Graph, Intervention, Table, DEFAULT_BURN_IN,
};
use parcs_core::pdl::parse_description;
use parcs_core::seed::calibration_seed;

use crate::error::CliError;
use crate::files::{read_csv, read_text, write_csv};
use crate::manifest::RunRecord;
use crate::{record, Common};

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Fully specified graph description.
    pub graph: PathBuf,
    /// Number of rows.
    #[arg(short, long, default_value_t = 1000)]
    pub n: usize,
    /// Output CSV.
    #[arg(short, long)]
    pub out: PathBuf,
    /// `do(NAME = VALUE)`; repeatable.
    #[arg(long = "intervene", value_name = "NAME=VALUE")]
    pub interventions: Vec<String>,
    /// Also write the uniform error matrix.
    #[arg(long)]
    pub errors_out: Option<PathBuf>,
    /// Reuse a stored error matrix instead of drawing errors.
    #[arg(long)]
    pub errors_in: Option<PathBuf>,
    /// Dataset backing the graph's `data` nodes.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Rows drawn to calibrate corrections.
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    pub burn_in: usize,
    #[command(flatten)]
    pub common: Common,
}

pub fn parse_intervention(spec: &str) -> Result<(String, f64), CliError> {
    let (name, value) = spec
        .split_once('=')
        .ok_or_else(|| CliError::user(format!("intervention `{spec}` is not NAME=VALUE")))?;
    let v: f64 = value
        .trim()
        .parse()
        .ok()
        .filter(|v: &f64| v.is_finite())
        .ok_or_else(|| CliError::user(format!("intervention `{spec}`: `{value}` is not a finite number")))?;
    Ok((name.trim().to_string(), v))
}

/// Columns of `t` rearranged to `names`.
pub fn reorder(t: &Table, names: &[String]) -> Table {
    let idx: Vec<usize> = names.iter().filter_map(|n| t.column_index(n)).collect();
    Table {
        names: idx.iter().map(|&i| t.names[i].clone()).collect(),
        rows: t.rows.iter().map(|r| idx.iter().map(|&i| r[i]).collect()).collect(),
    }
}

pub fn run(args: &SampleArgs) -> Result<RunRecord, CliError> {
    let seed = args.common.seed;
    let path = args.graph.display();
    let pg = parse_description(&read_text(&args.graph)?).map_err(|e| CliError::user(format!("{path}:{e}")))?;
    if !pg.is_fully_specified() {
        return Err(CliError::user(format!(
            "{path}: the description still has optional, random or `?` elements; complete it with `parcs randomize` first"
        )));
    }
    let graph = pg.to_graph().map_err(|e| CliError::user(format!("{path}: {e}")))?;
    let mut inputs = vec![args.graph.clone()];

    let data = match &args.data {
        Some(p) => {
            inputs.push(p.clone());
            Some(read_csv(p)?)
        }
        None => None,
    };
    let user = |e: parcs_core::graph::GraphError| CliError::user(e.to_string());
    let calibrated = instantiate_with_data(&graph, args.burn_in, calibration_seed(seed), data.as_ref()).map_err(user)?;

    let mut iv = Intervention::new();
    for spec in &args.interventions {
        let (name, value) = parse_intervention(spec)?;
        iv = iv.set_constant(name, value);
    }
    let target: Graph = if iv.actions.is_empty() {
        calibrated
    } else {
        intervene(&calibrated, &iv).map_err(user)?
    };

    let batch = match (&args.errors_in, &data) {
        (Some(p), d) => {
            inputs.push(p.clone());
            let errors = read_csv(p)?;
            match d {
                Some(d) => sample_with_errors_and_data(&target, &errors, d),
                None => sample_with_errors(&target, &errors),
            }
        }
        (None, Some(d)) => sample_with_data(&target, args.n, seed, d),
        (None, None) => sample(&target, args.n, seed),
    }
    .map_err(user)?;

    let names: Vec<String> = graph.nodes().iter().map(|n| n.name.clone()).collect();
    write_csv(&args.out, &reorder(&batch.data, &names))?;
    let mut outputs = vec![args.out.clone()];
    if let Some(p) = &args.errors_out {
        write_csv(p, &reorder(&batch.errors, &names))?;
        outputs.push(p.clone());
    }
    Ok(record(inputs, outputs, vec![seed]))
}
