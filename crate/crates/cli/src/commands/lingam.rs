use std::path::PathBuf;

use clap::{Args, ValueEnum};
use parcs_core::graph::{instantiate, sample, Table, DEFAULT_BURN_IN};
use parcs_core::guideline::IntervalUnion;
use parcs_core::lingam::{lingam_model, LingamConfig, Phi};
use parcs_core::seed::{calibration_seed, derive_seed};

use super::fan_out;
use super::sample::reorder;
use crate::error::CliError;
use crate::files::{create_dir, write_csv, write_text};
use crate::manifest::RunRecord;
use crate::{record, Common};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Switch {
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct LingamArgs {
    /// Number of variables.
    #[arg(short, long, default_value_t = 5)]
    pub p: usize,
    /// Union of intervals the edge weights are drawn from.
    #[arg(long, default_value = "[-2,-0.5] U [0.5,2]")]
    pub weight_range: String,
    /// Edge exponent: a positive number, or `random` for one draw per graph.
    #[arg(long, default_value = "1")]
    pub phi: String,
    #[arg(long, value_enum, default_value_t = Switch::Off)]
    pub edge_correction: Switch,
    #[arg(long, default_value_t = 500)]
    pub datasets: u64,
    #[arg(short, long, default_value_t = 1000)]
    pub n: usize,
    #[arg(short, long)]
    pub out_dir: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

fn parse_phi(text: &str) -> Result<Phi, CliError> {
    if text.eq_ignore_ascii_case("random") {
        return Ok(Phi::Random);
    }
    match text.parse::<f64>() {
        Ok(v) if v == 1.0 => Ok(Phi::Linear),
        Ok(v) if v > 0.0 && v.is_finite() => Ok(Phi::Fixed(v)),
        _ => Err(CliError::user(format!("--phi must be a positive number or `random`, got `{text}`"))),
    }
}

pub fn run(args: &LingamArgs) -> Result<RunRecord, CliError> {
    let weights: IntervalUnion = args
        .weight_range
        .parse()
        .map_err(|e| CliError::user(format!("--weight-range: {e}")))?;
    let mut cfg = LingamConfig::new(args.p, weights);
    cfg.phi = parse_phi(&args.phi)?;
    cfg.edge_correction = args.edge_correction == Switch::On;

    create_dir(&args.out_dir)?;
    let master = args.common.seed;
    let written = fan_out(args.datasets, |i| {
        let seed = derive_seed(master, i);
        let fail = |e: String| CliError::user(format!("dataset {i}: {e}"));
        let model = lingam_model(&cfg, seed).map_err(|e| fail(e.to_string()))?;
        let graph = instantiate(&model.graph, DEFAULT_BURN_IN, calibration_seed(seed)).map_err(|e| fail(e.to_string()))?;
        let batch = sample(&graph, args.n, derive_seed(seed, 1)).map_err(|e| fail(e.to_string()))?;

        let dir = args.out_dir.join(format!("dataset_{i:04}"));
        let data_path = dir.join("data.csv");
        let b_path = dir.join("B.csv");
        let order_path = dir.join("order.txt");
        write_csv(&data_path, &reorder(&batch.data, &model.names))?;
        let b = Table::new(model.names.clone(), model.b.clone()).map_err(|e| fail(e.to_string()))?;
        write_csv(&b_path, &b)?;
        let order: Vec<&str> = model.order.iter().map(|&k| model.names[k].as_str()).collect();
        write_text(&order_path, &(order.join(" ") + "\n"))?;
        Ok((seed, [data_path, b_path, order_path]))
    })?;
    let seeds = written.iter().map(|(s, _)| *s).collect();
    let outputs = written.into_iter().flat_map(|(_, p)| p).collect();
    Ok(record(Vec::new(), outputs, seeds))
}
