//! m-graphs: missingness indicators attached to a substantive graph.
//!
//! Every partially observed variable `Z` gets a Bernoulli indicator `R_Z`
//! (`1` = missing) whose probability is corrected into `(0, 1)` and calibrated
//! to the requested missingness ratio. Which `Z -> R` edges may exist is fixed
//! by the mechanism mask; which of those do exist is left to the randomizer.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{instantiate_with_data, sample_with_errors, sample_with_errors_and_data, Dataset, Graph, GraphError, Table};
use crate::guideline::{FunctionTemplate, Guideline, Terms};
use crate::edge::EdgeFunctionKind;
use crate::pdl::{
    CorrectionSpec, EdgeBody, EdgeEntry, EdgePresence, NodeBody, NodeEntry, NodeTemplate, ParamExpression,
    PartialGraph, Presence,
};
use crate::randomize::{randomize, RandomizationTrace, RandomizeError};
use crate::seed::{calibration_seed, node_errors};

/// Burn-in rows used to calibrate indicator probabilities.
pub const MGRAPH_BURN_IN: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MissingError {
    #[error("observed set must be a non-empty strict subset of the variables")]
    InvalidObservedSet,
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Randomize(#[from] RandomizeError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mechanism {
    Mcar,
    /// Variables in the set are fully observed and drive the others' missingness.
    Mar(Vec<String>),
    Mnar,
    SelfCensoring,
    NoSelfCensoring,
    /// MAR on the unobserved variables plus MCAR indicators on the observed set.
    MarMcar(Vec<String>),
}

impl Mechanism {
    pub fn tag(&self) -> &'static str {
        match self {
            Mechanism::Mcar => "mcar",
            Mechanism::Mar(_) => "mar",
            Mechanism::Mnar => "mnar",
            Mechanism::SelfCensoring => "sc",
            Mechanism::NoSelfCensoring => "nsc",
            Mechanism::MarMcar(_) => "mar+mcar",
        }
    }

    fn observed(&self) -> Option<&[String]> {
        match self {
            Mechanism::Mar(o) | Mechanism::MarMcar(o) => Some(o),
            _ => None,
        }
    }

    /// Variables that receive an indicator.
    pub fn indicator_targets(&self, z_names: &[String]) -> Result<Vec<String>, MissingError> {
        if let Some(obs) = self.observed() {
            check_observed(obs, z_names)?;
        }
        Ok(match self {
            Mechanism::Mar(obs) => z_names.iter().filter(|z| !obs.contains(z)).cloned().collect(),
            _ => z_names.to_vec(),
        })
    }
}

impl fmt::Display for Mechanism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.observed() {
            Some(obs) => write!(f, "{}({})", self.tag(), obs.join(",")),
            None => f.write_str(self.tag()),
        }
    }
}

impl FromStr for Mechanism {
    type Err = String;

    /// `mcar`, `mnar`, `sc`, `nsc`, `mar(A,B)`, `mar+mcar(A,B)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (tag, args) = match s.split_once('(') {
            Some((tag, rest)) => {
                let inner = rest.strip_suffix(')').ok_or_else(|| format!("missing `)` in `{s}`"))?;
                let names = inner.split(',').map(|n| n.trim().to_string()).filter(|n| !n.is_empty()).collect();
                (tag.trim(), Some(names))
            }
            None => (s, None),
        };
        match (tag, args) {
            ("mcar", None) => Ok(Mechanism::Mcar),
            ("mnar", None) => Ok(Mechanism::Mnar),
            ("sc", None) => Ok(Mechanism::SelfCensoring),
            ("nsc", None) => Ok(Mechanism::NoSelfCensoring),
            ("mar", Some(o)) => Ok(Mechanism::Mar(o)),
            ("mar+mcar", Some(o)) => Ok(Mechanism::MarMcar(o)),
            ("mar" | "mar+mcar", None) => Err(format!("`{tag}` needs an observed set, e.g. `{tag}(Z1)`")),
            _ => Err(format!("unknown mechanism `{s}`")),
        }
    }
}

fn check_observed(obs: &[String], z_names: &[String]) -> Result<(), MissingError> {
    if let Some(bad) = obs.iter().find(|o| !z_names.contains(o)) {
        return Err(MissingError::UnknownVariable(bad.clone()));
    }
    let distinct = z_names.iter().filter(|z| obs.contains(z)).count();
    if distinct == 0 || distinct == z_names.len() {
        return Err(MissingError::InvalidObservedSet);
    }
    Ok(())
}

/// `mask[j][i]` permits `z_names[j] -> R` of `r_targets[i]`.
pub fn mechanism_mask(
    mech: &Mechanism,
    z_names: &[String],
    r_targets: &[String],
) -> Result<Vec<Vec<bool>>, MissingError> {
    if let Some(bad) = r_targets.iter().find(|r| !z_names.contains(r)) {
        return Err(MissingError::UnknownVariable(bad.clone()));
    }
    if let Some(obs) = mech.observed() {
        check_observed(obs, z_names)?;
    }
    Ok(z_names
        .iter()
        .map(|z| {
            r_targets
                .iter()
                .map(|r| match mech {
                    Mechanism::Mcar => false,
                    Mechanism::Mnar => true,
                    Mechanism::SelfCensoring => z == r,
                    Mechanism::NoSelfCensoring => z != r,
                    Mechanism::Mar(obs) | Mechanism::MarMcar(obs) => obs.contains(z) && !obs.contains(r),
                })
                .collect()
        })
        .collect())
}

pub fn indicator_name(z: &str) -> String {
    format!("R_{z}")
}

/// Substantive side of an m-graph.
#[derive(Debug, Clone)]
pub enum ZSource<'a> {
    Graph(&'a Graph),
    /// Column names of an ingested dataset; each becomes a data-backed source node.
    Dataset(&'a [String]),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Preset {
    /// Indicators and edges as the guideline says.
    Plain,
    /// No `Z -> R` edges; missingness spreads through `R -> R` edges.
    RToR,
    /// `Z -> R` density 0.6 with nonlinear edge functions and products in `ζ`.
    Nonlinear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MGraphConfig {
    pub mechanism: Mechanism,
    pub ratio: f64,
    /// Overrides the guideline sparsity for `Z -> R` edges.
    pub sparsity: Option<f64>,
    /// Probability of each `R_i -> R_j` edge, `i` declared before `j`.
    pub r_density: f64,
    pub preset: Preset,
    pub burn_in: usize,
}

impl MGraphConfig {
    pub fn new(mechanism: Mechanism, ratio: f64) -> Self {
        MGraphConfig {
            mechanism,
            ratio,
            sparsity: None,
            r_density: 0.0,
            preset: Preset::Plain,
            burn_in: MGRAPH_BURN_IN,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MGraph {
    /// Calibrated graph over `Z` and `R` nodes.
    pub graph: Graph,
    pub description: PartialGraph,
    pub trace: RandomizationTrace,
    pub z_names: Vec<String>,
    /// Variables with an indicator, in declaration order.
    pub r_targets: Vec<String>,
    pub mask: Vec<Vec<bool>>,
}

impl MGraph {
    pub fn r_names(&self) -> Vec<String> {
        self.r_targets.iter().map(|z| indicator_name(z)).collect()
    }
}

/// The guideline a preset actually uses.
pub fn preset_guideline(base: &Guideline, cfg: &MGraphConfig) -> Guideline {
    let mut g = base.clone();
    match cfg.preset {
        Preset::Plain => {}
        Preset::RToR => g.sparsity = (0.0, 0.0),
        Preset::Nonlinear => {
            g.sparsity = (0.6, 0.6);
            g.terms = Terms::Quadratic;
            if g.functions.iter().all(|f| f.kind == EdgeFunctionKind::Identity) {
                g.functions = [EdgeFunctionKind::Sigmoid, EdgeFunctionKind::Arctan, EdgeFunctionKind::GaussianRbf]
                    .into_iter()
                    .map(FunctionTemplate::with_defaults)
                    .collect();
            }
        }
    }
    if let Some(s) = cfg.sparsity {
        g.sparsity = (s, s);
    }
    g
}

/// Description of the m-graph before randomization.
/// Self-censoring edges are mandatory; every other admissible `Z -> R` edge is optional.
/// Edges out of dataset columns are always standardized.
pub fn mgraph_description(
    z: &ZSource,
    mech: &Mechanism,
    r_targets: &[String],
    ratio: f64,
    r_density: f64,
) -> PartialGraph {
    let mut pg = match z {
        ZSource::Graph(g) => PartialGraph::from_graph(g),
        ZSource::Dataset(names) => PartialGraph {
            nodes: names
                .iter()
                .map(|n| NodeEntry {
                    name: n.clone(),
                    presence: Presence::Always,
                    body: NodeBody::Data,
                    dtype: None,
                })
                .collect(),
            edges: Vec::new(),
        },
    };
    let z_names: Vec<String> = pg.nodes.iter().map(|n| n.name.clone()).collect();
    // raw columns of real data come in arbitrary scales
    let standardize = matches!(z, ZSource::Dataset(_)).then_some(true);
    for r in r_targets {
        pg.nodes.push(NodeEntry {
            name: indicator_name(r),
            presence: Presence::Always,
            body: NodeBody::Fixed(NodeTemplate {
                dist: crate::dist::Distribution::Bernoulli,
                params: vec![ParamExpression::all_hole()],
                corrections: vec![Some(CorrectionSpec {
                    lower: 0.0,
                    upper: 1.0,
                    target_mean: Some(ratio),
                })],
            }),
            dtype: None,
        });
    }
    for z in &z_names {
        for r in r_targets {
            pg.edges.push(EdgeEntry {
                source: z.clone(),
                target: indicator_name(r),
                presence: if *mech == Mechanism::SelfCensoring && z == r {
                    EdgePresence::RequiredIfExists
                } else {
                    EdgePresence::Optional(None)
                },
                body: EdgeBody {
                    correction: standardize,
                    ..EdgeBody::random()
                },
            });
        }
    }
    if r_density > 0.0 {
        for (a, ra) in r_targets.iter().enumerate() {
            for rb in &r_targets[a + 1..] {
                pg.edges.push(EdgeEntry {
                    source: indicator_name(ra),
                    target: indicator_name(rb),
                    presence: EdgePresence::Optional(Some(r_density)),
                    body: EdgeBody::random(),
                });
            }
        }
    }
    pg.canonicalize();
    pg
}

/// Builds and calibrates an m-graph. `data` backs the burn-in of dataset sources.
pub fn build_mgraph(
    z: &ZSource,
    cfg: &MGraphConfig,
    guideline: &Guideline,
    seed: u64,
    data: Option<&Dataset>,
) -> Result<MGraph, MissingError> {
    if !(cfg.ratio > 0.0 && cfg.ratio < 1.0) {
        return Err(MissingError::InvalidRange(format!("ratio must lie in (0, 1), got {}", cfg.ratio)));
    }
    if !(0.0..=1.0).contains(&cfg.r_density) {
        return Err(MissingError::InvalidRange(format!("R density must lie in [0, 1], got {}", cfg.r_density)));
    }
    if let Some(s) = cfg.sparsity.filter(|s| !(0.0..=1.0).contains(s)) {
        return Err(MissingError::InvalidRange(format!("sparsity must lie in [0, 1], got {s}")));
    }
    let z_names: Vec<String> = match z {
        ZSource::Graph(g) => g.nodes().iter().map(|n| n.name.clone()).collect(),
        ZSource::Dataset(names) => names.to_vec(),
    };
    let r_targets = cfg.mechanism.indicator_targets(&z_names)?;
    let mask = mechanism_mask(&cfg.mechanism, &z_names, &r_targets)?;
    let r_density = if cfg.preset == Preset::RToR && cfg.r_density == 0.0 { 0.5 } else { cfg.r_density };
    let description = mgraph_description(z, &cfg.mechanism, &r_targets, cfg.ratio, r_density);

    // singleton groups: Z -> Z free, Z -> R by mask, R -> R free, R -> Z never
    let r_names: Vec<String> = r_targets.iter().map(|r| indicator_name(r)).collect();
    let all: Vec<String> = z_names.iter().chain(&r_names).cloned().collect();
    let (nz, nr) = (z_names.len(), r_names.len());
    let full = (0..nz + nr)
        .map(|s| {
            (0..nz + nr)
                .map(|t| match (s < nz, t < nz) {
                    (true, true) | (false, false) => true,
                    (true, false) => mask[s][t - nz],
                    (false, true) => false,
                })
                .collect()
        })
        .collect();
    let guideline = preset_guideline(guideline, cfg).with_node_mask(&all, full);

    let (graph, trace) = randomize(&description, &guideline, seed)?;
    let graph = instantiate_with_data(&graph, cfg.burn_in, calibration_seed(seed), data)?;
    Ok(MGraph {
        graph,
        description,
        trace,
        z_names,
        r_targets,
        mask,
    })
}

/// Samples an m-graph. Dataset sources use `data` row for row, so the output
/// has one row per data row; otherwise `n` rows are drawn.
pub fn sample_mgraph(m: &MGraph, n: usize, seed: u64, data: Option<&Dataset>) -> Result<(Table, Table), MissingError> {
    let rows = data.map_or(n, Table::n_rows);
    let names: Vec<String> = m.graph.nodes().iter().map(|n| n.name.clone()).collect();
    let cols: Vec<Vec<f64>> = names.iter().map(|name| node_errors(seed, name, rows)).collect();
    let errors = Table::new(names.clone(), (0..rows).map(|r| cols.iter().map(|c| c[r]).collect()).collect())?;
    let batch = match data {
        Some(d) => sample_with_errors_and_data(&m.graph, &errors, d)?,
        None => sample_with_errors(&m.graph, &errors)?,
    };
    let pick = |wanted: &[String]| -> Result<Table, MissingError> {
        let idx: Vec<usize> = wanted
            .iter()
            .map(|w| batch.data.column_index(w).ok_or_else(|| MissingError::UnknownVariable(w.clone())))
            .collect::<Result<_, _>>()?;
        let rows = batch.data.rows.iter().map(|r| idx.iter().map(|&i| r[i]).collect()).collect();
        Ok(Table::new(wanted.to_vec(), rows)?)
    };
    Ok((pick(&m.z_names)?, pick(&m.r_names())?))
}

/// Values with per-cell missing flags.
#[derive(Debug, Clone, PartialEq)]
pub struct MaskedDataset {
    pub names: Vec<String>,
    pub values: Vec<Vec<f64>>,
    pub missing: Vec<Vec<bool>>,
    /// Fraction of missing cells per column.
    pub achieved_ratio: Vec<f64>,
}

/// Flags `(row, Z)` missing iff `R_Z = 1` in that row. Columns without an
/// indicator stay observed.
pub fn apply_missingness(z: &Table, r: &Table) -> Result<MaskedDataset, MissingError> {
    if z.n_rows() != r.n_rows() {
        return Err(MissingError::ShapeMismatch(format!(
            "{} value rows against {} indicator rows",
            z.n_rows(),
            r.n_rows()
        )));
    }
    let mut source = vec![None; z.names.len()];
    for (k, rn) in r.names.iter().enumerate() {
        let j = z
            .names
            .iter()
            .position(|zn| indicator_name(zn) == *rn || zn == rn)
            .ok_or_else(|| MissingError::ShapeMismatch(format!("indicator `{rn}` has no matching column")))?;
        source[j] = Some(k);
    }
    let missing: Vec<Vec<bool>> = r
        .rows
        .iter()
        .map(|rr| source.iter().map(|s| s.is_some_and(|k| rr[k] == 1.0)).collect())
        .collect();
    let n = z.n_rows().max(1) as f64;
    let achieved_ratio = (0..z.names.len())
        .map(|j| missing.iter().filter(|m| m[j]).count() as f64 / n)
        .collect();
    Ok(MaskedDataset {
        names: z.names.clone(),
        values: z.rows.clone(),
        missing,
        achieved_ratio,
    })
}
