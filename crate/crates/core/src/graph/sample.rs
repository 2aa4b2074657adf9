//! Burn-in calibration and observational / counterfactual sampling.

use rand::Rng;

use super::{zeta_into, zeta_len, Graph, GraphError, NodeModel};
use crate::correction::{calibrate_offset, estimate_moments, node_correction};
use crate::dist::{icdf_sample, DistError};
use crate::edge::EdgeCorrection;
use crate::seed;

/// Burn-in rows drawn at instantiation when the caller has no preference.
pub const DEFAULT_BURN_IN: usize = 1000;

/// Named columns over row-major values.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub names: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// An ingested real dataset; its columns back the graph's data nodes.
pub type Dataset = Table;

impl Table {
    pub fn new(names: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Table, GraphError> {
        if let Some(bad) = rows.iter().position(|r| r.len() != names.len()) {
            return Err(GraphError::Shape(format!(
                "row {bad} has {} values, header has {}",
                rows[bad].len(),
                names.len()
            )));
        }
        Ok(Table { names, rows })
    }

    pub(crate) fn from_columns(names: Vec<String>, cols: &[Vec<f64>]) -> Table {
        let n = cols.first().map_or(0, Vec::len);
        let rows = (0..n).map(|r| cols.iter().map(|c| c[r]).collect()).collect();
        Table { names, rows }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    /// `n` rows drawn with replacement under `seed`.
    pub fn resample(&self, n: usize, seed: u64) -> Table {
        if self.rows.is_empty() {
            return Table {
                names: self.names.clone(),
                rows: Vec::new(),
            };
        }
        let mut rng = seed::purpose_rng(seed, "row-resampling");
        let rows = (0..n)
            .map(|_| self.rows[rng.gen_range(0..self.rows.len())].clone())
            .collect();
        Table {
            names: self.names.clone(),
            rows,
        }
    }
}

/// Realizations paired with the uniform errors that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    /// Columns in topological order.
    pub data: Table,
    /// Same layout as `data`; entries in (0, 1).
    pub errors: Table,
    pub seed: Option<u64>,
}

impl Graph {
    fn needs_calibration(&self) -> bool {
        self.edges().iter().any(|e| e.correction.enabled)
            || self.nodes().iter().any(|n| match &n.model {
                NodeModel::Parametric(p) => p.corrections.iter().flatten().any(|c| c.target_mean.is_some()),
                NodeModel::Data => false,
            })
    }
}

/// Freezes edge moments and target-mean offsets from `burn_in` rows.
///
/// Nodes are calibrated in topological order, each against the already
/// calibrated values of its parents. An already calibrated graph is returned
/// unchanged.
pub fn instantiate(graph: &Graph, burn_in: usize, seed: u64) -> Result<Graph, GraphError> {
    instantiate_with_data(graph, burn_in, seed, None)
}

/// Like [`instantiate`], resampling burn-in rows of data-backed nodes from `data`.
pub fn instantiate_with_data(
    graph: &Graph,
    burn_in: usize,
    seed: u64,
    data: Option<&Dataset>,
) -> Result<Graph, GraphError> {
    if graph.is_calibrated() {
        return Ok(graph.clone());
    }
    recalibrate(graph, burn_in, seed, data)
}

/// Calibration from scratch, discarding any frozen constants.
pub fn recalibrate(graph: &Graph, burn_in: usize, seed: u64, data: Option<&Dataset>) -> Result<Graph, GraphError> {
    let mut g = graph.clone();
    if !g.needs_calibration() {
        g.set_calibrated(burn_in);
        return Ok(g);
    }
    let n = burn_in;
    let errors = generate_errors(&g, n, seed);
    let data_cols = match data {
        Some(d) => data_columns(&g, &d.resample(n, seed))?,
        None => data_columns(&g, &Table::from_columns(Vec::new(), &[]))?,
    };
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); g.nodes().len()];
    for pos in 0..g.order().len() {
        let i = g.order()[pos];
        for k in g.parent_edges(i).to_vec() {
            let e = &g.edges()[k];
            if !e.correction.enabled {
                continue;
            }
            let src = g.node_index(&e.source).expect("validated");
            let transformed: Vec<f64> = cols[src].iter().map(|&z| e.function.apply(z)).collect();
            let (mu, sigma) = estimate_moments(&transformed).map_err(|cause| GraphError::EdgeCalibration {
                from: e.source.clone(),
                to: e.target.clone(),
                cause,
            })?;
            g.edges_mut()[k].correction = EdgeCorrection::frozen(mu, sigma);
        }
        if let NodeModel::Parametric(p) = &g.nodes()[i].model {
            let targets: Vec<(usize, f64, f64, f64)> = p
                .corrections
                .iter()
                .enumerate()
                .filter_map(|(k, c)| c.and_then(|c| c.target_mean.map(|t| (k, t, c.lower, c.upper))))
                .collect();
            if !targets.is_empty() {
                let inputs = node_inputs(&g, i, &cols, n);
                let name = g.nodes()[i].name.clone();
                let mut offsets = Vec::with_capacity(targets.len());
                for &(k, target, lower, upper) in &targets {
                    let row = &p.rows[k];
                    let raw: Vec<f64> = inputs.chunks(row.len().max(1)).map(|z| super::dot(row, z)).collect();
                    let o = calibrate_offset(&raw, target, lower, upper)
                        .map_err(|source| GraphError::Correction { node: name.clone(), source })?;
                    offsets.push((k, o));
                }
                if let NodeModel::Parametric(p) = &mut g.nodes_mut()[i].model {
                    for (k, o) in offsets {
                        if let Some(c) = p.corrections[k].as_mut() {
                            c.offset = o;
                        }
                    }
                }
            }
        }
        cols[i] = node_column(&g, i, &cols, &errors[i], data_cols[i].as_deref(), n)?;
    }
    g.set_calibrated(burn_in);
    Ok(g)
}

/// Draws `n` rows with fresh errors from the node streams of `seed`.
pub fn sample(graph: &Graph, n: usize, seed: u64) -> Result<SampleBatch, GraphError> {
    if let Some(node) = graph.nodes().iter().find(|n| matches!(n.model, NodeModel::Data)) {
        return Err(GraphError::MissingData(node.name.clone()));
    }
    let errors = generate_errors(graph, n, seed);
    let data = vec![None; graph.nodes().len()];
    let mut batch = run(graph, &errors, &data, n)?;
    batch.seed = Some(seed);
    Ok(batch)
}

/// Draws `n` rows; data-backed nodes take rows resampled from `data` under `seed`.
pub fn sample_with_data(graph: &Graph, n: usize, seed: u64, data: &Dataset) -> Result<SampleBatch, GraphError> {
    let errors = generate_errors(graph, n, seed);
    let data_cols = data_columns(graph, &data.resample(n, seed))?;
    let mut batch = run(graph, &errors, &data_cols, n)?;
    batch.seed = Some(seed);
    Ok(batch)
}

/// Replays the pipeline on a given error matrix (columns matched by node name).
pub fn sample_with_errors(graph: &Graph, errors: &Table) -> Result<SampleBatch, GraphError> {
    if let Some(node) = graph.nodes().iter().find(|n| matches!(n.model, NodeModel::Data)) {
        return Err(GraphError::MissingData(node.name.clone()));
    }
    let data = vec![None; graph.nodes().len()];
    sample_with_errors_inner(graph, errors, &data)
}

/// [`sample_with_errors`] for graphs with data nodes; `data` rows align with `errors` rows.
pub fn sample_with_errors_and_data(graph: &Graph, errors: &Table, data: &Table) -> Result<SampleBatch, GraphError> {
    if data.n_rows() != errors.n_rows() {
        return Err(GraphError::Shape(format!(
            "data has {} rows, errors have {}",
            data.n_rows(),
            errors.n_rows()
        )));
    }
    let data_cols = data_columns(graph, data)?;
    sample_with_errors_inner(graph, errors, &data_cols)
}

fn sample_with_errors_inner(graph: &Graph, errors: &Table, data: &[Option<Vec<f64>>]) -> Result<SampleBatch, GraphError> {
    let n = errors.n_rows();
    let mut cols = vec![Vec::new(); graph.nodes().len()];
    for (i, node) in graph.nodes().iter().enumerate() {
        let j = errors
            .column_index(&node.name)
            .ok_or_else(|| GraphError::Shape(format!("error matrix has no column `{}`", node.name)))?;
        let col: Vec<f64> = errors.rows.iter().map(|r| r[j]).collect();
        if let Some(r) = col.iter().position(|&u| !(u > 0.0 && u < 1.0)) {
            return Err(GraphError::InvalidParameter {
                node: node.name.clone(),
                row: r,
                source: DistError::ErrorTerm(col[r]),
            });
        }
        cols[i] = col;
    }
    if errors.names.len() != graph.nodes().len() {
        return Err(GraphError::Shape(format!(
            "error matrix has {} columns, graph has {} nodes",
            errors.names.len(),
            graph.nodes().len()
        )));
    }
    if let Some(r) = errors.rows.iter().position(|r| r.len() != errors.names.len()) {
        return Err(GraphError::Shape(format!("error row {r} has the wrong width")));
    }
    run(graph, &cols, data, n)
}

fn generate_errors(graph: &Graph, n: usize, seed: u64) -> Vec<Vec<f64>> {
    graph
        .nodes()
        .iter()
        .map(|node| seed::node_errors(seed, &node.name, n))
        .collect()
}

fn data_columns(graph: &Graph, data: &Table) -> Result<Vec<Option<Vec<f64>>>, GraphError> {
    graph
        .nodes()
        .iter()
        .map(|node| match node.model {
            NodeModel::Data => data
                .column(&node.name)
                .map(Some)
                .ok_or_else(|| GraphError::MissingData(node.name.clone())),
            NodeModel::Parametric(_) => Ok(None),
        })
        .collect()
}

fn run(graph: &Graph, errors: &[Vec<f64>], data: &[Option<Vec<f64>>], n: usize) -> Result<SampleBatch, GraphError> {
    if graph.needs_calibration() && !graph.is_calibrated() {
        return Err(GraphError::NotCalibrated);
    }
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); graph.nodes().len()];
    for &i in graph.order() {
        cols[i] = node_column(graph, i, &cols, &errors[i], data[i].as_deref(), n)?;
    }
    let names = graph.topo_names();
    let ordered: Vec<Vec<f64>> = graph.order().iter().map(|&i| std::mem::take(&mut cols[i])).collect();
    let err_ordered: Vec<Vec<f64>> = graph.order().iter().map(|&i| errors[i].clone()).collect();
    Ok(SampleBatch {
        data: Table::from_columns(names.clone(), &ordered),
        errors: Table::from_columns(names, &err_ordered),
        seed: None,
    })
}

/// Row-major `ζ` vectors of node `i` for all `n` rows, concatenated.
fn node_inputs(graph: &Graph, i: usize, cols: &[Vec<f64>], n: usize) -> Vec<f64> {
    let parents = graph.parent_edges(i);
    let width = zeta_len(parents.len());
    let mut out = Vec::with_capacity(width * n);
    let mut x = vec![0.0; parents.len()];
    let mut z = Vec::with_capacity(width);
    let sources: Vec<usize> = parents
        .iter()
        .map(|&k| graph.node_index(&graph.edges()[k].source).expect("validated"))
        .collect();
    for r in 0..n {
        for (slot, (&k, &src)) in x.iter_mut().zip(parents.iter().zip(&sources)) {
            let e = &graph.edges()[k];
            *slot = e.correction.apply(e.function.apply(cols[src][r]));
        }
        zeta_into(&x, &mut z);
        out.extend_from_slice(&z);
    }
    out
}

fn node_column(
    graph: &Graph,
    i: usize,
    cols: &[Vec<f64>],
    errors: &[f64],
    data: Option<&[f64]>,
    n: usize,
) -> Result<Vec<f64>, GraphError> {
    let node = &graph.nodes()[i];
    let p = match &node.model {
        NodeModel::Data => {
            let col = data.ok_or_else(|| GraphError::MissingData(node.name.clone()))?;
            if col.len() != n {
                return Err(GraphError::Shape(format!("data column `{}` has {} rows, expected {n}", node.name, col.len())));
            }
            return Ok(col.to_vec());
        }
        NodeModel::Parametric(p) => p,
    };
    let inputs = node_inputs(graph, i, cols, n);
    let width = zeta_len(graph.parent_edges(i).len());
    let mut theta = vec![0.0; p.rows.len()];
    let mut out = Vec::with_capacity(n);
    for r in 0..n {
        let z = &inputs[r * width..(r + 1) * width];
        for (k, row) in p.rows.iter().enumerate() {
            let raw = super::dot(row, z);
            theta[k] = match &p.corrections[k] {
                Some(c) => node_correction(raw, c),
                None => raw,
            };
        }
        let v = icdf_sample(p.dist, &theta, errors[r]).map_err(|source| GraphError::InvalidParameter {
            node: node.name.clone(),
            row: r,
            source,
        })?;
        out.push(v);
    }
    Ok(out)
}
