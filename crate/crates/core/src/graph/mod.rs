//! Fully specified causal DAG with its structural equations.
//!
//! Every parametric node `i` computes its distribution parameters as
//! `θⁱ = Wⁱ · ζ(e(Z_pa(i)))`, where `e` are the incoming edge functions (plus the
//! optional edge standardization) and `ζ` is the bias/linear/quadratic input
//! library. The node value is then drawn through the inverse CDF of its
//! distribution with the node's own uniform error term.

mod intervene;
mod sample;

use std::collections::{BTreeSet, BinaryHeap, HashMap};
use std::cmp::Reverse;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::correction::{node_correction, CorrectionError, NodeCorrection};
use crate::dist::{DistError, Distribution};
use crate::edge::{EdgeCorrection, EdgeFunction};

pub use intervene::{intervene, Intervention, InterventionAction};
pub use sample::{
    instantiate, instantiate_with_data, recalibrate, sample, sample_with_data, sample_with_errors,
    sample_with_errors_and_data, Dataset, SampleBatch, Table, DEFAULT_BURN_IN,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("edge {from}->{to} references unknown node `{missing}`")]
    UnknownParent {
        from: String,
        to: String,
        missing: String,
    },
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("duplicate edge {0}->{1}")]
    DuplicateEdge(String, String),
    #[error("cycle detected: {}", format_cycle(.0))]
    CycleDetected(Vec<String>),
    #[error("node `{node}`: parameter `{param}` row has length {actual}, expected {expected}")]
    ShapeMismatch {
        node: String,
        param: String,
        expected: usize,
        actual: usize,
    },
    #[error("node `{node}`: {dist} needs {expected} parameter rows, got {actual}")]
    ParameterCoverage {
        node: String,
        dist: Distribution,
        expected: usize,
        actual: usize,
    },
    #[error("node `{node}`: constant parameter is invalid: {source}")]
    InvalidConstant { node: String, source: DistError },
    #[error("node `{0}` is data-backed and cannot have parents")]
    DataNodeWithParents(String),
    #[error("edge {from}->{to}: {message}")]
    InvalidEdgeFunction {
        from: String,
        to: String,
        message: String,
    },
    #[error("node `{node}`: correction on unknown parameter index {index}")]
    CorrectionTarget { node: String, index: usize },
    #[error("node `{node}`: {source}")]
    Correction {
        node: String,
        source: CorrectionError,
    },
    #[error("edge {from}->{to}: cannot standardize: {cause}")]
    EdgeCalibration {
        from: String,
        to: String,
        cause: CorrectionError,
    },
    #[error("node `{node}`, row {row}: {source}")]
    InvalidParameter {
        node: String,
        row: usize,
        source: DistError,
    },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("no data supplied for data-backed node `{0}`")]
    MissingData(String),
    #[error("graph has corrections that were never calibrated; instantiate it first")]
    NotCalibrated,
}

fn format_cycle(cycle: &[String]) -> String {
    let mut s = cycle.join(" -> ");
    if let Some(first) = cycle.first() {
        s.push_str(" -> ");
        s.push_str(first);
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataType {
    Continuous,
    Binary,
    Count,
}

impl DataType {
    pub fn default_for(dist: Distribution) -> DataType {
        match dist {
            Distribution::Bernoulli => DataType::Binary,
            Distribution::Poisson => DataType::Count,
            _ => DataType::Continuous,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DataType::Continuous => "continuous",
            DataType::Binary => "binary",
            DataType::Count => "count",
        }
    }
}

impl FromStr for DataType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "continuous" => Ok(DataType::Continuous),
            "binary" => Ok(DataType::Binary),
            "count" => Ok(DataType::Count),
            _ => Err(format!("unknown dtype `{s}`")),
        }
    }
}

impl fmt::Display for DataType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Structural equation of a parametric node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Parametric {
    pub dist: Distribution,
    /// One coefficient row per distribution parameter, each of length `|ζ|`.
    pub rows: Vec<Vec<f64>>,
    /// Optional correction per distribution parameter.
    pub corrections: Vec<Option<NodeCorrection>>,
}

impl Parametric {
    pub fn new(dist: Distribution, rows: Vec<Vec<f64>>) -> Self {
        let corrections = vec![None; rows.len()];
        Parametric {
            dist,
            rows,
            corrections,
        }
    }

    /// A parentless node with constant parameters.
    pub fn constant(dist: Distribution, theta: &[f64]) -> Self {
        Parametric::new(dist, theta.iter().map(|&t| vec![t]).collect())
    }

    pub fn with_correction(mut self, param: usize, corr: NodeCorrection) -> Self {
        if param < self.corrections.len() {
            self.corrections[param] = Some(corr);
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum NodeModel {
    Parametric(Parametric),
    /// Values are supplied by an ingested dataset; source nodes only.
    Data,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeSpec {
    pub name: String,
    pub dtype: DataType,
    pub model: NodeModel,
}

impl NodeSpec {
    pub fn parametric(name: impl Into<String>, model: Parametric) -> Self {
        NodeSpec {
            name: name.into(),
            dtype: DataType::default_for(model.dist),
            model: NodeModel::Parametric(model),
        }
    }

    pub fn data(name: impl Into<String>) -> Self {
        NodeSpec {
            name: name.into(),
            dtype: DataType::Continuous,
            model: NodeModel::Data,
        }
    }

    pub fn parametric_model(&self) -> Option<&Parametric> {
        match &self.model {
            NodeModel::Parametric(p) => Some(p),
            NodeModel::Data => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub source: String,
    pub target: String,
    pub function: EdgeFunction,
    pub correction: EdgeCorrection,
}

impl EdgeSpec {
    pub fn new(source: impl Into<String>, target: impl Into<String>, function: EdgeFunction) -> Self {
        EdgeSpec {
            source: source.into(),
            target: target.into(),
            function,
            correction: EdgeCorrection::DISABLED,
        }
    }

    pub fn identity(source: impl Into<String>, target: impl Into<String>) -> Self {
        EdgeSpec::new(source, target, EdgeFunction::identity())
    }

    pub fn corrected(mut self) -> Self {
        self.correction = EdgeCorrection::PENDING;
        self
    }
}

/// Length of `ζ` for `d` parents: bias, `d` linear terms and `d(d+1)/2` products.
pub fn zeta_len(d: usize) -> usize {
    1 + d + d * (d + 1) / 2
}

/// Input library: `(1, x₁..x_d, x_i·x_j for i ≤ j in lexicographic order)`.
pub fn zeta(x: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(zeta_len(x.len()));
    zeta_into(x, &mut out);
    out
}

pub(crate) fn zeta_into(x: &[f64], out: &mut Vec<f64>) {
    out.clear();
    out.push(1.0);
    out.extend_from_slice(x);
    for i in 0..x.len() {
        for j in i..x.len() {
            out.push(x[i] * x[j]);
        }
    }
}

/// Position of the product `x_i·x_j` (`i ≤ j`) inside `ζ` for `d` parents.
pub fn zeta_quad_index(d: usize, i: usize, j: usize) -> usize {
    debug_assert!(i <= j && j < d);
    // rows before i hold d, d-1, ..., d-i+1 products
    1 + d + i * d - i * i.saturating_sub(1) / 2 + (j - i)
}

/// `θ_k = W_k · ζ`, followed by the node correction where one is configured.
pub fn compute_theta(rows: &[Vec<f64>], zeta_vec: &[f64], corrections: &[Option<NodeCorrection>]) -> Vec<f64> {
    rows.iter()
        .enumerate()
        .map(|(k, row)| {
            let raw = dot(row, zeta_vec);
            match corrections.get(k).copied().flatten() {
                Some(c) => node_correction(raw, &c),
                None => raw,
            }
        })
        .collect()
}

pub(crate) fn dot(row: &[f64], zeta_vec: &[f64]) -> f64 {
    row.iter().zip(zeta_vec).map(|(w, z)| w * z).sum()
}

/// Validated DAG with a stable topological order.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    nodes: Vec<NodeSpec>,
    edges: Vec<EdgeSpec>,
    index: HashMap<String, usize>,
    order: Vec<usize>,
    /// Incoming edge indices per node, sorted by the parent's declaration index.
    parent_edges: Vec<Vec<usize>>,
    calibrated: bool,
    burn_in: usize,
}

impl Graph {
    /// Validates nodes and edges and computes the topological order.
    pub fn new(nodes: Vec<NodeSpec>, edges: Vec<EdgeSpec>) -> Result<Graph, GraphError> {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            if index.insert(n.name.clone(), i).is_some() {
                return Err(GraphError::DuplicateNode(n.name.clone()));
            }
        }

        let mut parent_edges = vec![Vec::new(); nodes.len()];
        let mut seen = BTreeSet::new();
        for (k, e) in edges.iter().enumerate() {
            let src = *index.get(&e.source).ok_or_else(|| GraphError::UnknownParent {
                from: e.source.clone(),
                to: e.target.clone(),
                missing: e.source.clone(),
            })?;
            let dst = *index.get(&e.target).ok_or_else(|| GraphError::UnknownParent {
                from: e.source.clone(),
                to: e.target.clone(),
                missing: e.target.clone(),
            })?;
            if src == dst {
                return Err(GraphError::CycleDetected(vec![e.source.clone()]));
            }
            if !seen.insert((src, dst)) {
                return Err(GraphError::DuplicateEdge(e.source.clone(), e.target.clone()));
            }
            e.function
                .kind
                .check(&e.function.params)
                .map_err(|message| GraphError::InvalidEdgeFunction {
                    from: e.source.clone(),
                    to: e.target.clone(),
                    message,
                })?;
            parent_edges[dst].push(k);
        }
        for list in &mut parent_edges {
            list.sort_by_key(|&k| index[&edges[k].source]);
        }

        let pairs: Vec<(usize, usize)> = edges.iter().map(|e| (index[&e.source], index[&e.target])).collect();
        let order = topo_sort(nodes.len(), &pairs).map_err(|cycle| {
            GraphError::CycleDetected(cycle.into_iter().map(|i| nodes[i].name.clone()).collect())
        })?;

        for (i, node) in nodes.iter().enumerate() {
            let d = parent_edges[i].len();
            match &node.model {
                NodeModel::Data => {
                    if d > 0 {
                        return Err(GraphError::DataNodeWithParents(node.name.clone()));
                    }
                }
                NodeModel::Parametric(p) => check_parametric(&node.name, p, d)?,
            }
        }

        Ok(Graph {
            nodes,
            edges,
            index,
            order,
            parent_edges,
            calibrated: false,
            burn_in: 0,
        })
    }

    pub fn nodes(&self) -> &[NodeSpec] {
        &self.nodes
    }

    pub fn edges(&self) -> &[EdgeSpec] {
        &self.edges
    }

    pub fn node(&self, name: &str) -> Option<&NodeSpec> {
        self.index.get(name).map(|&i| &self.nodes[i])
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Node indices in topological order (ties broken by declaration order).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn topo_names(&self) -> Vec<String> {
        self.order.iter().map(|&i| self.nodes[i].name.clone()).collect()
    }

    /// Parent names of a node in `ζ` order.
    pub fn parents(&self, name: &str) -> Vec<&str> {
        match self.index.get(name) {
            Some(&i) => self.parent_edges[i]
                .iter()
                .map(|&k| self.edges[k].source.as_str())
                .collect(),
            None => Vec::new(),
        }
    }

    pub(crate) fn parent_edges(&self, i: usize) -> &[usize] {
        &self.parent_edges[i]
    }

    pub fn edge(&self, source: &str, target: &str) -> Option<&EdgeSpec> {
        self.edges.iter().find(|e| e.source == source && e.target == target)
    }

    /// All nodes reachable from `name` along directed edges, excluding itself.
    pub fn descendants(&self, name: &str) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = vec![name.to_string()];
        while let Some(cur) = stack.pop() {
            for e in self.edges.iter().filter(|e| e.source == cur) {
                if out.insert(e.target.clone()) {
                    stack.push(e.target.clone());
                }
            }
        }
        out
    }

    pub fn is_calibrated(&self) -> bool {
        self.calibrated
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in
    }

    pub fn has_data_nodes(&self) -> bool {
        self.nodes.iter().any(|n| matches!(n.model, NodeModel::Data))
    }

    pub(crate) fn set_calibrated(&mut self, burn_in: usize) {
        self.calibrated = true;
        self.burn_in = burn_in;
    }

    pub(crate) fn nodes_mut(&mut self) -> &mut [NodeSpec] {
        &mut self.nodes
    }

    pub(crate) fn edges_mut(&mut self) -> &mut [EdgeSpec] {
        &mut self.edges
    }

    /// Decomposes into declaration-ordered nodes and edges.
    pub fn into_parts(self) -> (Vec<NodeSpec>, Vec<EdgeSpec>) {
        (self.nodes, self.edges)
    }
}

fn check_parametric(name: &str, p: &Parametric, d: usize) -> Result<(), GraphError> {
    let arity = p.dist.arity();
    if p.rows.len() != arity {
        return Err(GraphError::ParameterCoverage {
            node: name.to_string(),
            dist: p.dist,
            expected: arity,
            actual: p.rows.len(),
        });
    }
    if p.corrections.len() != arity {
        return Err(GraphError::CorrectionTarget {
            node: name.to_string(),
            index: p.corrections.len(),
        });
    }
    let expected = zeta_len(d);
    for (k, row) in p.rows.iter().enumerate() {
        if row.len() != expected {
            return Err(GraphError::ShapeMismatch {
                node: name.to_string(),
                param: p.dist.param_names()[k].to_string(),
                expected,
                actual: row.len(),
            });
        }
    }
    for c in p.corrections.iter().flatten() {
        NodeCorrection::new(c.lower, c.upper, c.target_mean).map_err(|source| GraphError::Correction {
            node: name.to_string(),
            source,
        })?;
    }
    // constant-fold parameters that cannot depend on parents
    let folds: Vec<Option<f64>> = p
        .rows
        .iter()
        .zip(&p.corrections)
        .map(|(row, c)| match c {
            Some(c) if row[1..].iter().all(|&w| w == 0.0) => Some(node_correction(row[0], c)),
            None if row[1..].iter().all(|&w| w == 0.0) => Some(row[0]),
            _ => None,
        })
        .collect();
    if folds.iter().all(Option::is_some) {
        let theta: Vec<f64> = folds.into_iter().flatten().collect();
        p.dist.check(&theta).map_err(|source| GraphError::InvalidConstant {
            node: name.to_string(),
            source,
        })?;
    } else {
        for (k, f) in folds.iter().enumerate() {
            if let Some(v) = f {
                if !p.dist.param_range(k).contains(*v) {
                    return Err(GraphError::InvalidConstant {
                        node: name.to_string(),
                        source: DistError::InvalidParameter {
                            dist: p.dist,
                            param: p.dist.param_names()[k],
                            value: *v,
                            reason: "outside the valid range",
                        },
                    });
                }
            }
        }
    }
    Ok(())
}

/// Kahn's algorithm with a min-heap on declaration index; returns a cycle on failure.
pub(crate) fn topo_sort(n: usize, edges: &[(usize, usize)]) -> Result<Vec<usize>, Vec<usize>> {
    let mut indeg = vec![0usize; n];
    let mut children = vec![Vec::new(); n];
    for &(s, t) in edges {
        indeg[t] += 1;
        children[s].push(t);
    }
    let mut heap: BinaryHeap<Reverse<usize>> = (0..n).filter(|&i| indeg[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(i)) = heap.pop() {
        order.push(i);
        for &c in &children[i] {
            indeg[c] -= 1;
            if indeg[c] == 0 {
                heap.push(Reverse(c));
            }
        }
    }
    if order.len() == n {
        return Ok(order);
    }
    Err(find_cycle(&children, &indeg))
}

/// Walks backwards-free: every remaining node has a remaining child, so following
/// children from any remaining node must revisit one.
fn find_cycle(children: &[Vec<usize>], indeg: &[usize]) -> Vec<usize> {
    let remaining: Vec<bool> = indeg.iter().map(|&d| d > 0).collect();
    let start = remaining.iter().position(|&r| r).unwrap_or(0);
    // among remaining nodes every node has a remaining parent; walk parents instead
    let n = children.len();
    let mut parents = vec![Vec::new(); n];
    for (s, cs) in children.iter().enumerate() {
        for &c in cs {
            if remaining[s] && remaining[c] {
                parents[c].push(s);
            }
        }
    }
    let mut pos = vec![usize::MAX; n];
    let mut path = Vec::new();
    let mut cur = start;
    loop {
        if pos[cur] != usize::MAX {
            let mut cycle: Vec<usize> = path[pos[cur]..].to_vec();
            cycle.reverse();
            // rotate so the smallest declaration index leads
            let m = cycle.iter().enumerate().min_by_key(|(_, &v)| v).map(|(i, _)| i).unwrap_or(0);
            cycle.rotate_left(m);
            return cycle;
        }
        pos[cur] = path.len();
        path.push(cur);
        cur = *parents[cur].iter().min().expect("remaining node has a remaining parent");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn normal(mu: f64, sigma: f64) -> Parametric {
        Parametric::constant(Distribution::Normal, &[mu, sigma])
    }

    fn three_node() -> Graph {
        let z3 = Parametric::new(
            Distribution::Normal,
            vec![vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0], vec![2.0, 0.0, 0.0, 0.0, 1.0, 0.0]],
        );
        let z2 = Parametric::new(Distribution::Normal, vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]]);
        Graph::new(
            vec![
                NodeSpec::parametric("Z1", normal(0.0, 1.0)),
                NodeSpec::parametric("Z2", z2),
                NodeSpec::parametric("Z3", z3),
            ],
            vec![
                EdgeSpec::identity("Z1", "Z2"),
                EdgeSpec::identity("Z1", "Z3"),
                EdgeSpec::identity("Z2", "Z3"),
            ],
        )
        .unwrap()
    }

    #[test]
    fn three_node_order() {
        let g = three_node();
        assert_eq!(g.topo_names(), vec!["Z1", "Z2", "Z3"]);
        assert_eq!(g.parents("Z3"), vec!["Z1", "Z2"]);
    }

    #[test]
    fn declaration_order_breaks_ties() {
        let g = Graph::new(
            vec![
                NodeSpec::parametric("B", normal(0.0, 1.0)),
                NodeSpec::parametric("A", Parametric::new(Distribution::Normal, vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]])),
                NodeSpec::parametric("C", normal(0.0, 1.0)),
            ],
            vec![EdgeSpec::identity("B", "A")],
        )
        .unwrap();
        assert_eq!(g.topo_names(), vec!["B", "A", "C"]);
        let g = Graph::new(
            vec![
                NodeSpec::parametric("A", Parametric::new(Distribution::Normal, vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]])),
                NodeSpec::parametric("C", normal(0.0, 1.0)),
                NodeSpec::parametric("B", normal(0.0, 1.0)),
            ],
            vec![EdgeSpec::identity("B", "A")],
        )
        .unwrap();
        assert_eq!(g.topo_names(), vec!["C", "B", "A"]);
    }

    #[test]
    fn single_node() {
        let g = Graph::new(vec![NodeSpec::parametric("X", normal(0.0, 1.0))], vec![]).unwrap();
        assert_eq!(g.topo_names(), vec!["X"]);
    }

    #[test]
    fn two_cycle_is_named() {
        let one = || Parametric::new(Distribution::Normal, vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]]);
        let err = Graph::new(
            vec![NodeSpec::parametric("A", one()), NodeSpec::parametric("B", one())],
            vec![EdgeSpec::identity("A", "B"), EdgeSpec::identity("B", "A")],
        )
        .unwrap_err();
        assert_eq!(err, GraphError::CycleDetected(vec!["A".into(), "B".into()]));
        assert_eq!(err.to_string(), "cycle detected: A -> B -> A");
    }

    #[test]
    fn longer_cycle_behind_a_source() {
        let one = || Parametric::new(Distribution::Normal, vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 0.0]]);
        let two = || Parametric::new(Distribution::Normal, vec![vec![0.0; 6], vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0]]);
        let err = Graph::new(
            vec![
                NodeSpec::parametric("S", normal(0.0, 1.0)),
                NodeSpec::parametric("A", two()),
                NodeSpec::parametric("B", one()),
                NodeSpec::parametric("C", one()),
            ],
            vec![
                EdgeSpec::identity("S", "A"),
                EdgeSpec::identity("A", "B"),
                EdgeSpec::identity("B", "C"),
                EdgeSpec::identity("C", "A"),
            ],
        )
        .unwrap_err();
        assert_eq!(err, GraphError::CycleDetected(vec!["A".into(), "B".into(), "C".into()]));
    }

    #[test]
    fn shape_and_reference_errors() {
        let err = Graph::new(
            vec![
                NodeSpec::parametric("A", normal(0.0, 1.0)),
                NodeSpec::parametric("B", normal(0.0, 1.0)),
            ],
            vec![EdgeSpec::identity("A", "B")],
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::ShapeMismatch { expected: 3, actual: 1, .. }));
        let err = Graph::new(vec![NodeSpec::parametric("A", normal(0.0, 1.0))], vec![EdgeSpec::identity("Q", "A")])
            .unwrap_err();
        assert!(matches!(err, GraphError::UnknownParent { .. }));
        let err = Graph::new(
            vec![NodeSpec::parametric("A", normal(0.0, 1.0)), NodeSpec::parametric("A", normal(0.0, 1.0))],
            vec![],
        )
        .unwrap_err();
        assert_eq!(err, GraphError::DuplicateNode("A".into()));
        let err = Graph::new(
            vec![NodeSpec::parametric("A", Parametric::constant(Distribution::Bernoulli, &[1.5]))],
            vec![],
        )
        .unwrap_err();
        assert!(matches!(err, GraphError::InvalidConstant { .. }));
    }

    #[test]
    fn zeta_examples() {
        assert_eq!(zeta(&[]), vec![1.0]);
        let z = zeta(&[0.2, 0.3]);
        let expected = [1.0, 0.2, 0.3, 0.2 * 0.2, 0.2 * 0.3, 0.3 * 0.3];
        assert_eq!(z, expected);
        for d in 0..=10 {
            assert_eq!(zeta(&vec![1.5; d]).len(), zeta_len(d));
        }
    }

    #[test]
    fn quad_index_matches_zeta_layout() {
        for d in 1..=7 {
            let x: Vec<f64> = (0..d).map(|i| (i + 2) as f64).collect();
            let z = zeta(&x);
            for i in 0..d {
                for j in i..d {
                    assert_eq!(z[zeta_quad_index(d, i, j)], x[i] * x[j], "d={d} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn theta_examples() {
        let rows = vec![vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0], vec![2.0, 0.0, 0.0, 0.0, 1.0, 0.0]];
        let theta = compute_theta(&rows, &zeta(&[0.2, 0.3]), &[None, None]);
        assert_eq!(theta, vec![1.5, 2.06]);
        let zeros = compute_theta(&[vec![0.0; 6]], &zeta(&[4.0, -1.0]), &[None]);
        assert_eq!(zeros, vec![0.0]);
        let bias = compute_theta(&[vec![3.5, 0.0, 0.0, 0.0, 0.0, 0.0]], &zeta(&[4.0, -1.0]), &[None]);
        assert_eq!(bias, vec![3.5]);
    }
}
