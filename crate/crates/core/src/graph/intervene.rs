//! Interventions: replace a node's conditional distribution and keep everything
//! else, including frozen calibration constants, untouched.

use std::collections::HashMap;

use super::{zeta_len, zeta_quad_index, EdgeSpec, Graph, GraphError, NodeModel, NodeSpec, Parametric};
use crate::dist::Distribution;

#[derive(Debug, Clone, PartialEq)]
pub enum InterventionAction {
    /// `do(Z = value)`: a degenerate distribution with all parents cut.
    SetConstant(f64),
    /// New distribution and coefficients; `parents` rewires the parent set
    /// (identity edges for new parents), `None` keeps the current one.
    ReplaceDistribution {
        model: Parametric,
        parents: Option<Vec<String>>,
    },
    /// Removes the listed parents and drops their terms from every row.
    SeverParents(Vec<String>),
}

/// Actions keyed by target node, applied in order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Intervention {
    pub actions: Vec<(String, InterventionAction)>,
}

impl Intervention {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set_constant(mut self, node: impl Into<String>, value: f64) -> Self {
        self.actions.push((node.into(), InterventionAction::SetConstant(value)));
        self
    }

    pub fn with(mut self, node: impl Into<String>, action: InterventionAction) -> Self {
        self.actions.push((node.into(), action));
        self
    }

    pub fn targets(&self) -> impl Iterator<Item = &str> {
        self.actions.iter().map(|(n, _)| n.as_str())
    }
}

/// Returns the post-intervention graph. Calibration state and frozen constants
/// of every other node and edge are inherited as they are.
pub fn intervene(graph: &Graph, iv: &Intervention) -> Result<Graph, GraphError> {
    let calibrated = graph.is_calibrated();
    let burn_in = graph.burn_in();
    let (mut nodes, mut edges) = graph.clone().into_parts();

    for (target, action) in &iv.actions {
        let i = nodes
            .iter()
            .position(|n| &n.name == target)
            .ok_or_else(|| GraphError::UnknownNode(target.clone()))?;
        let current: Vec<String> = parents_in_zeta_order(&nodes, &edges, target);
        match action {
            InterventionAction::SetConstant(value) => {
                edges.retain(|e| &e.target != target);
                nodes[i] = NodeSpec {
                    name: target.clone(),
                    dtype: nodes[i].dtype,
                    model: NodeModel::Parametric(Parametric::constant(Distribution::Deterministic, &[*value])),
                };
            }
            InterventionAction::ReplaceDistribution { model, parents } => {
                if let Some(new_parents) = parents {
                    for p in new_parents {
                        if !nodes.iter().any(|n| &n.name == p) {
                            return Err(GraphError::UnknownNode(p.clone()));
                        }
                    }
                    let kept: HashMap<String, EdgeSpec> = edges
                        .iter()
                        .filter(|e| &e.target == target)
                        .map(|e| (e.source.clone(), e.clone()))
                        .collect();
                    edges.retain(|e| &e.target != target);
                    for p in new_parents {
                        edges.push(kept.get(p).cloned().unwrap_or_else(|| EdgeSpec::identity(p.clone(), target.clone())));
                    }
                }
                nodes[i] = NodeSpec {
                    name: target.clone(),
                    dtype: nodes[i].dtype,
                    model: NodeModel::Parametric(model.clone()),
                };
            }
            InterventionAction::SeverParents(remove) => {
                for r in remove {
                    if !current.contains(r) {
                        return Err(GraphError::UnknownParent {
                            from: r.clone(),
                            to: target.clone(),
                            missing: r.clone(),
                        });
                    }
                }
                let keep: Vec<usize> = (0..current.len()).filter(|&j| !remove.contains(&current[j])).collect();
                edges.retain(|e| !(&e.target == target && remove.contains(&e.source)));
                if let NodeModel::Parametric(p) = &mut nodes[i].model {
                    let d = current.len();
                    let positions = kept_zeta_positions(d, &keep);
                    for row in &mut p.rows {
                        if row.len() == zeta_len(d) {
                            *row = positions.iter().map(|&k| row[k]).collect();
                        }
                    }
                }
            }
        }
    }

    let mut out = Graph::new(nodes, edges)?;
    if calibrated {
        out.set_calibrated(burn_in);
    }
    Ok(out)
}

fn parents_in_zeta_order(nodes: &[NodeSpec], edges: &[EdgeSpec], target: &str) -> Vec<String> {
    let decl = |name: &str| nodes.iter().position(|n| n.name == name).unwrap_or(usize::MAX);
    let mut ps: Vec<&str> = edges.iter().filter(|e| e.target == target).map(|e| e.source.as_str()).collect();
    ps.sort_by_key(|p| decl(p));
    ps.into_iter().map(String::from).collect()
}

/// Positions of the `ζ` entries that survive when only parents `keep` remain.
fn kept_zeta_positions(d: usize, keep: &[usize]) -> Vec<usize> {
    let mut out = vec![0];
    out.extend(keep.iter().map(|&j| 1 + j));
    for (a, &i) in keep.iter().enumerate() {
        for &j in &keep[a..] {
            out.push(zeta_quad_index(d, i, j));
        }
    }
    out
}
