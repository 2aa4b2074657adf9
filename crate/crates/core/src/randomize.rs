//! Partial randomization: completing a [`PartialGraph`] under a [`Guideline`].
//!
//! Choices are drawn in a fixed order (node existence, edges, edge functions,
//! distributions, coefficients) into a [`RandomizationTrace`], and the graph is
//! then assembled from the description plus the trace. [`replay`] runs only the
//! assembly step.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::correction::NodeCorrection;
use crate::dist::Distribution;
use crate::edge::{EdgeCorrection, EdgeFunction};
use crate::graph::{topo_sort, zeta_len, DataType, EdgeSpec, Graph, GraphError, NodeModel, NodeSpec, Parametric};
use crate::guideline::{CorrectionPolicy, Guideline, IntervalUnion, Terms};
use crate::pdl::{Coef, EdgeFunctionSpec, EdgePresence, NodeBody, PartialGraph, Presence};
use crate::seed::purpose_rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RandomizeError {
    #[error("mandatory edges form a cycle: {}", .0.join(" -> "))]
    CycleDetected(Vec<String>),
    #[error("edge {0}->{1} is fixed but forbidden by the connection mask")]
    MaskConflict(String, String),
    #[error("trace does not match the description: {0}")]
    TraceMismatch(String),
    #[error("invalid correction on node `{node}`: {message}")]
    Correction { node: String, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeChoice {
    pub exists: bool,
    /// Chosen distribution; `None` for absent and data nodes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<Distribution>,
    /// Complete coefficient rows over the node's realised parents.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rows: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub corrections: Vec<Option<NodeCorrection>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeChoice {
    pub exists: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<EdgeFunction>,
    #[serde(default)]
    pub correction: bool,
}

/// Every random outcome of one randomization, aligned with the description's
/// nodes and (canonically ordered) edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomizationTrace {
    pub seed: u64,
    /// Fingerprint of the description the trace was drawn for.
    pub fingerprint: u64,
    pub sparsity: f64,
    pub nodes: Vec<NodeChoice>,
    pub edges: Vec<EdgeChoice>,
}

impl RandomizationTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// Node ranks of the global order: a stable topological sort of the mandatory
/// edges, ties broken by declaration order.
fn global_rank(pg: &PartialGraph) -> Result<Vec<usize>, RandomizeError> {
    let pairs: Vec<(usize, usize)> = pg
        .edges
        .iter()
        .filter(|e| !matches!(e.presence, EdgePresence::Optional(_)))
        .filter_map(|e| Some((pg.node_index(&e.source)?, pg.node_index(&e.target)?)))
        .collect();
    let order = topo_sort(pg.nodes.len(), &pairs)
        .map_err(|cycle| RandomizeError::CycleDetected(cycle.into_iter().map(|i| pg.nodes[i].name.clone()).collect()))?;
    let mut rank = vec![0; order.len()];
    for (r, &i) in order.iter().enumerate() {
        rank[i] = r;
    }
    Ok(rank)
}

/// Draws a completion of `pg` and returns it with its trace.
pub fn randomize(pg: &PartialGraph, g: &Guideline, seed: u64) -> Result<(Graph, RandomizationTrace), RandomizeError> {
    let mut pg = pg.clone();
    pg.canonicalize();
    let trace = draw_trace(&pg, g, seed)?;
    let graph = assemble(&pg, &trace)?;
    Ok((graph, trace))
}

/// Rebuilds the graph a trace was drawn for.
pub fn replay(pg: &PartialGraph, trace: &RandomizationTrace) -> Result<Graph, RandomizeError> {
    let mut pg = pg.clone();
    pg.canonicalize();
    if pg.fingerprint() != trace.fingerprint {
        return Err(RandomizeError::TraceMismatch("description fingerprint differs".into()));
    }
    if pg.nodes.len() != trace.nodes.len() || pg.edges.len() != trace.edges.len() {
        return Err(RandomizeError::TraceMismatch("element counts differ".into()));
    }
    assemble(&pg, trace)
}

pub fn draw_trace(pg: &PartialGraph, g: &Guideline, seed: u64) -> Result<RandomizationTrace, RandomizeError> {
    let mut pg = pg.clone();
    pg.canonicalize();
    let pg = &pg;
    let mut rng = purpose_rng(seed, "randomize");
    let sparsity = draw_range(&mut rng, g.sparsity);

    // 1. node existence
    let exists: Vec<bool> = pg
        .nodes
        .iter()
        .map(|n| match n.presence {
            Presence::Always => true,
            Presence::Optional(p) => rng.gen_bool(p.unwrap_or(g.existence)),
        })
        .collect();

    // 2. edges
    let rank = global_rank(pg)?;
    let mut edges = Vec::with_capacity(pg.edges.len());
    for e in &pg.edges {
        let (s, t) = (idx(pg, &e.source)?, idx(pg, &e.target)?);
        let allowed = g.allows(&e.source, &e.target);
        let present = match e.presence {
            EdgePresence::Always | EdgePresence::RequiredIfExists => {
                if !allowed {
                    return Err(RandomizeError::MaskConflict(e.source.clone(), e.target.clone()));
                }
                exists[s] && exists[t]
            }
            EdgePresence::Optional(p) => {
                exists[s] && exists[t] && allowed && rank[s] < rank[t] && rng.gen_bool(p.unwrap_or(sparsity))
            }
        };
        edges.push(EdgeChoice {
            exists: present,
            function: None,
            correction: false,
        });
    }

    // 3. edge functions
    for (e, choice) in pg.edges.iter().zip(&mut edges) {
        if !choice.exists {
            continue;
        }
        let (kind, given) = match &e.body.function {
            EdgeFunctionSpec::Fixed { kind, params } => (*kind, Some(params)),
            EdgeFunctionSpec::Random => (g.functions.choose(&mut rng).expect("non-empty choices").kind, None),
        };
        let template = g.template(kind);
        let params = (0..kind.param_names().len())
            .map(|k| match given.map(|p| p[k]) {
                Some(Coef::Fixed(v)) => v,
                _ => template.ranges[k].sample(&mut rng),
            })
            .collect();
        choice.function = Some(EdgeFunction { kind, params });
        choice.correction = e.body.correction.unwrap_or(g.edge_correction);
    }

    // 4. distributions
    let mut nodes: Vec<NodeChoice> = exists
        .iter()
        .map(|&exists| NodeChoice {
            exists,
            dist: None,
            rows: Vec::new(),
            corrections: Vec::new(),
        })
        .collect();
    for (n, choice) in pg.nodes.iter().zip(&mut nodes) {
        if !choice.exists {
            continue;
        }
        match &n.body {
            NodeBody::Data => {}
            NodeBody::Fixed(t) => {
                choice.dist = Some(t.dist);
                // free parameters without an explicit correction fall under the policy
                let free: Vec<bool> = t
                    .params
                    .iter()
                    .enumerate()
                    .map(|(k, p)| p.has_holes() && t.corrections.get(k).is_none_or(Option::is_none))
                    .collect();
                if free.iter().any(|&f| f) {
                    let policy = policy_corrections(t.dist, g, &mut rng)
                        .map_err(|message| RandomizeError::Correction { node: n.name.clone(), message })?;
                    if policy.iter().zip(&free).any(|(c, &f)| f && c.is_some()) {
                        choice.corrections =
                            policy.into_iter().zip(&free).map(|(c, &f)| c.filter(|_| f)).collect();
                    }
                }
            }
            NodeBody::Random => {
                let dist = *g.distributions.choose(&mut rng).expect("non-empty choices");
                choice.dist = Some(dist);
                choice.corrections = policy_corrections(dist, g, &mut rng)
                    .map_err(|message| RandomizeError::Correction { node: n.name.clone(), message })?;
            }
        }
    }

    // 5. coefficients
    for (n, choice) in pg.nodes.iter().zip(&mut nodes) {
        let Some(dist) = choice.dist.filter(|_| choice.exists) else {
            continue;
        };
        let parents = realised_parents(pg, &n.name, &edges);
        let d = parents.len();
        let linear_only = |k: usize| g.terms == Terms::Linear && k > d;
        choice.rows = match &n.body {
            NodeBody::Random => {
                let mut rows: Vec<Vec<f64>> = (0..dist.arity())
                    .map(|_| {
                        (0..zeta_len(d))
                            .map(|k| if linear_only(k) { 0.0 } else { g.coef_range.sample(&mut rng) })
                            .collect()
                    })
                    .collect();
                if dist == Distribution::Uniform {
                    // high = low + width keeps the support non-empty for every parent value
                    let width = rows[1][0].abs();
                    rows[1] = rows[0].clone();
                    rows[1][0] += if width > 0.0 { width } else { 1.0 };
                }
                rows
            }
            NodeBody::Fixed(t) => t
                .params
                .iter()
                .map(|p| {
                    p.to_row(&parents)
                        .into_iter()
                        .enumerate()
                        .map(|(k, c)| match c {
                            Coef::Fixed(v) => v,
                            Coef::Hole if p.all_hole && linear_only(k) => 0.0,
                            Coef::Hole => g.coef_range.sample(&mut rng),
                        })
                        .collect()
                })
                .collect(),
            NodeBody::Data => unreachable!("data nodes have no distribution"),
        };
    }

    Ok(RandomizationTrace {
        seed,
        fingerprint: pg.fingerprint(),
        sparsity,
        nodes,
        edges,
    })
}

fn idx(pg: &PartialGraph, name: &str) -> Result<usize, RandomizeError> {
    pg.node_index(name)
        .ok_or_else(|| RandomizeError::TraceMismatch(format!("edge endpoint `{name}` is not declared")))
}

fn draw_range(rng: &mut ChaCha8Rng, (a, b): (f64, f64)) -> f64 {
    if a == b {
        a
    } else {
        rng.gen_range(a..=b)
    }
}

/// Parents present in the completion, in declaration order.
fn realised_parents<'a>(pg: &'a PartialGraph, name: &str, edges: &[EdgeChoice]) -> Vec<&'a str> {
    let mut ps: Vec<(usize, &str)> = pg
        .edges
        .iter()
        .zip(edges)
        .filter(|(e, c)| c.exists && e.target == name)
        .map(|(e, _)| (pg.node_index(&e.source).unwrap_or(usize::MAX), e.source.as_str()))
        .collect();
    ps.sort();
    ps.into_iter().map(|(_, s)| s).collect()
}

/// Corrections a randomly drawn distribution receives under the guideline policy.
fn policy_corrections(
    dist: Distribution,
    g: &Guideline,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<Option<NodeCorrection>>, String> {
    (0..dist.arity())
        .map(|k| {
            let range = dist.param_range(k);
            let wanted = match g.policy {
                CorrectionPolicy::Never => false,
                CorrectionPolicy::Always => true,
                CorrectionPolicy::Bounded => range.is_restricted(),
            };
            if !wanted {
                return Ok(None);
            }
            let lower = if range.lower.is_finite() { range.lower } else { g.lower };
            let upper = if range.upper.is_finite() { range.upper } else { g.upper.max(lower + 1.0) };
            let target = g
                .target_mean
                .as_ref()
                .map(|u: &IntervalUnion| u.sample(rng))
                .filter(|t| *t > lower && *t < upper);
            NodeCorrection::new(lower, upper, target).map(Some).map_err(|e| e.to_string())
        })
        .collect()
}

/// Builds the completion: fixed values from the description, the rest from the trace.
fn assemble(pg: &PartialGraph, trace: &RandomizationTrace) -> Result<Graph, RandomizeError> {
    let mismatch = |what: String| RandomizeError::TraceMismatch(what);
    if pg.nodes.len() != trace.nodes.len() || pg.edges.len() != trace.edges.len() {
        return Err(mismatch("element counts differ".into()));
    }

    let mut nodes = Vec::new();
    for (n, c) in pg.nodes.iter().zip(&trace.nodes) {
        if n.presence == Presence::Always && !c.exists {
            return Err(mismatch(format!("mandatory node `{}` marked absent", n.name)));
        }
        if !c.exists {
            continue;
        }
        let parents = realised_parents(pg, &n.name, &trace.edges);
        let spec = match &n.body {
            NodeBody::Data => NodeSpec {
                name: n.name.clone(),
                dtype: n.dtype.unwrap_or(DataType::Continuous),
                model: NodeModel::Data,
            },
            body => {
                let dist = c.dist.ok_or_else(|| mismatch(format!("node `{}` has no distribution", n.name)))?;
                let width = zeta_len(parents.len());
                if c.rows.len() != dist.arity() || c.rows.iter().any(|r| r.len() != width) {
                    return Err(mismatch(format!("coefficient shape of node `{}`", n.name)));
                }
                let mut model = Parametric::new(dist, c.rows.clone());
                match body {
                    NodeBody::Fixed(t) => {
                        if t.dist != dist {
                            return Err(mismatch(format!("distribution of node `{}`", n.name)));
                        }
                        for (p, row) in t.params.iter().zip(&c.rows) {
                            let fixed_ok = p
                                .to_row(&parents)
                                .iter()
                                .zip(row)
                                .all(|(c, v)| c.fixed().is_none_or(|f| f == *v));
                            if !fixed_ok {
                                return Err(mismatch(format!("fixed coefficient of node `{}`", n.name)));
                            }
                        }
                        for (k, spec) in t.corrections.iter().enumerate() {
                            if let Some(spec) = spec {
                                let corr = spec.to_correction().map_err(|e| RandomizeError::Correction {
                                    node: n.name.clone(),
                                    message: e.to_string(),
                                })?;
                                model = model.with_correction(k, corr);
                            }
                        }
                        if !c.corrections.is_empty() {
                            if c.corrections.len() != dist.arity() {
                                return Err(mismatch(format!("corrections of node `{}`", n.name)));
                            }
                            for (k, corr) in c.corrections.iter().enumerate() {
                                let explicit = t.corrections.get(k).is_some_and(Option::is_some);
                                match corr {
                                    Some(_) if explicit || !t.params[k].has_holes() => {
                                        return Err(mismatch(format!("correction of fixed parameter of `{}`", n.name)))
                                    }
                                    Some(corr) => model = model.with_correction(k, *corr),
                                    None => {}
                                }
                            }
                        }
                    }
                    _ => {
                        if c.corrections.len() != dist.arity() {
                            return Err(mismatch(format!("corrections of node `{}`", n.name)));
                        }
                        model.corrections = c.corrections.clone();
                    }
                }
                NodeSpec {
                    name: n.name.clone(),
                    dtype: n.dtype.unwrap_or(DataType::default_for(dist)),
                    model: NodeModel::Parametric(model),
                }
            }
        };
        nodes.push(spec);
    }

    let mut edges = Vec::new();
    for (e, c) in pg.edges.iter().zip(&trace.edges) {
        if !c.exists {
            continue;
        }
        let function = c
            .function
            .clone()
            .ok_or_else(|| mismatch(format!("edge {}->{} has no function", e.source, e.target)))?;
        if let EdgeFunctionSpec::Fixed { kind, params } = &e.body.function {
            let same = function.kind == *kind
                && function.params.len() == params.len()
                && params.iter().zip(&function.params).all(|(p, v)| p.fixed().is_none_or(|f| f == *v));
            if !same {
                return Err(mismatch(format!("fixed function of edge {}->{}", e.source, e.target)));
            }
        }
        if let Some(fixed) = e.body.correction {
            if fixed != c.correction {
                return Err(mismatch(format!("correction of edge {}->{}", e.source, e.target)));
            }
        }
        let mut spec = EdgeSpec::new(e.source.clone(), e.target.clone(), function);
        if c.correction {
            spec.correction = EdgeCorrection::PENDING;
        }
        edges.push(spec);
    }
    Ok(Graph::new(nodes, edges)?)
}
