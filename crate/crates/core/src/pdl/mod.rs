//! Graph description language.
//!
//! A description is a list of `node` and `edge` lines. Any element may be
//! fixed, left `random`, or made `optional`; single coefficients may be left as
//! holes (`?`). A description without any of these converts to a [`Graph`].
//!
//! ```text
//! node Z1 : normal(mu=0, sigma=1)
//! node Z2 : bernoulli(p=?*Z1), correction(0, 1, target_mean=0.3)
//! node Z3 : optional(p=0.5)
//! edge Z1->Z2 : sigmoid(alpha=2, beta=0, gamma=1), correction
//! edge Z1->Z3 : optional(p=0.2) { random }
//! ```

mod expr;
mod lexer;
mod parser;
mod writer;

use std::collections::HashMap;

use thiserror::Error;

use crate::correction::{CorrectionError, NodeCorrection};
use crate::dist::Distribution;
use crate::edge::{EdgeCorrection, EdgeFunction, EdgeFunctionKind};
use crate::graph::{DataType, EdgeSpec, Graph, GraphError, NodeModel, NodeSpec, Parametric};
use crate::seed::name_hash;

pub use expr::{basis_positions, parse_param_expression, Basis, Coef, ParamExpression};
pub use parser::parse_description;
pub use writer::{serialize, serialize_graph};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PdlErrorKind {
    #[error("expected {expected}, found {found}")]
    Syntax { expected: String, found: String },
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("unterminated quoted name")]
    UnterminatedString,
    #[error("invalid escape in quoted name")]
    BadEscape,
    #[error("empty name")]
    EmptyName,
    #[error("invalid number `{0}`")]
    BadNumber(String),
    #[error("duplicate node `{0}`")]
    DuplicateNode(String),
    #[error("edge {from}->{to} references undeclared node `{missing}`")]
    UnknownParent { from: String, to: String, missing: String },
    #[error("duplicate edge {0}->{1}")]
    DuplicateEdge(String, String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("node `{node}`: `{name}` is not a parent")]
    UnknownParentInExpression { node: String, name: String },
    #[error("terms of degree above two are not supported; route the value through a deterministic helper node")]
    NonQuadraticTerm,
    #[error("invalid exponent {0}; only 1 and 2 are allowed")]
    InvalidExponent(f64),
    #[error("a hole `?` cannot be scaled, negated or repeated within one term")]
    ScaledHole,
    #[error("a hole `?` shares its position with another term")]
    HoleConflict,
    #[error("unknown distribution `{0}`")]
    UnknownDistribution(String),
    #[error("unknown edge function `{0}`")]
    UnknownEdgeFunction(String),
    #[error("`{owner}` has no parameter `{param}`")]
    UnknownParameter { owner: String, param: String },
    #[error("parameter `{0}` given twice")]
    DuplicateParameter(String),
    #[error("`{owner}` needs parameter `{param}`")]
    MissingParameter { owner: String, param: String },
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),
    #[error("invalid correction: {0}")]
    InvalidCorrection(String),
    #[error("invalid edge function parameters: {0}")]
    InvalidEdgeParameter(String),
    #[error("unknown dtype `{0}`")]
    UnknownDtype(String),
    #[error("`{0}` given twice")]
    DuplicateClause(String),
}

/// Diagnostic with a 1-based source position.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct PdlError {
    pub line: usize,
    pub col: usize,
    pub kind: PdlErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConvertError {
    #[error("{0} is not fully specified; randomize the description first")]
    Unresolved(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrectionSpec {
    pub lower: f64,
    pub upper: f64,
    pub target_mean: Option<f64>,
}

impl CorrectionSpec {
    pub fn to_correction(self) -> Result<NodeCorrection, CorrectionError> {
        NodeCorrection::new(self.lower, self.upper, self.target_mean)
    }
}

impl From<NodeCorrection> for CorrectionSpec {
    fn from(c: NodeCorrection) -> Self {
        CorrectionSpec {
            lower: c.lower,
            upper: c.upper,
            target_mean: c.target_mean,
        }
    }
}

/// A distribution with per-parameter expressions, possibly holding holes.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeTemplate {
    pub dist: Distribution,
    pub params: Vec<ParamExpression>,
    pub corrections: Vec<Option<CorrectionSpec>>,
}

impl NodeTemplate {
    pub fn has_holes(&self) -> bool {
        self.params.iter().any(ParamExpression::has_holes)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NodeBody {
    Fixed(NodeTemplate),
    /// Distribution and every coefficient left to the randomizer.
    Random,
    /// Values come from an ingested dataset.
    Data,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Presence {
    Always,
    /// Kept with the given probability, or the guideline default when absent.
    Optional(Option<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeEntry {
    pub name: String,
    pub presence: Presence,
    pub body: NodeBody,
    /// Explicit dtype; the distribution's default otherwise.
    pub dtype: Option<DataType>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum EdgeFunctionSpec {
    Fixed { kind: EdgeFunctionKind, params: Vec<Coef> },
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeBody {
    pub function: EdgeFunctionSpec,
    /// `None` defers to the guideline.
    pub correction: Option<bool>,
}

impl EdgeBody {
    pub fn identity() -> Self {
        EdgeBody {
            function: EdgeFunctionSpec::Fixed {
                kind: EdgeFunctionKind::Identity,
                params: Vec::new(),
            },
            correction: Some(false),
        }
    }

    pub fn random() -> Self {
        EdgeBody {
            function: EdgeFunctionSpec::Random,
            correction: None,
        }
    }

    pub fn is_fixed(&self) -> bool {
        self.correction.is_some()
            && match &self.function {
                EdgeFunctionSpec::Fixed { params, .. } => params.iter().all(|c| *c != Coef::Hole),
                EdgeFunctionSpec::Random => false,
            }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgePresence {
    Always,
    /// Kept with the given probability, or the guideline sparsity when absent.
    Optional(Option<f64>),
    /// Present exactly when both endpoints exist.
    RequiredIfExists,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeEntry {
    pub source: String,
    pub target: String,
    pub presence: EdgePresence,
    pub body: EdgeBody,
}

/// A parsed description; edges are kept sorted by (source, target) declaration index.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PartialGraph {
    pub nodes: Vec<NodeEntry>,
    pub edges: Vec<EdgeEntry>,
}

impl PartialGraph {
    pub fn node(&self, name: &str) -> Option<&NodeEntry> {
        self.nodes.iter().find(|n| n.name == name)
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name == name)
    }

    /// Sources of every edge entry into `name`, in declaration order.
    pub fn parents_of(&self, name: &str) -> Vec<&str> {
        let mut ps: Vec<(usize, &str)> = self
            .edges
            .iter()
            .filter(|e| e.target == name)
            .map(|e| (self.node_index(&e.source).unwrap_or(usize::MAX), e.source.as_str()))
            .collect();
        ps.sort();
        ps.into_iter().map(|(_, s)| s).collect()
    }

    /// Orders edges by the declaration index of source, then target.
    pub fn canonicalize(&mut self) {
        let index: HashMap<&str, usize> = self.nodes.iter().enumerate().map(|(i, n)| (n.name.as_str(), i)).collect();
        let key = |e: &EdgeEntry| {
            (
                index.get(e.source.as_str()).copied().unwrap_or(usize::MAX),
                index.get(e.target.as_str()).copied().unwrap_or(usize::MAX),
            )
        };
        let mut keyed: Vec<((usize, usize), EdgeEntry)> = self.edges.drain(..).map(|e| (key(&e), e)).collect();
        keyed.sort_by_key(|(k, _)| *k);
        self.edges = keyed.into_iter().map(|(_, e)| e).collect();
    }

    /// True when nothing is left to randomize.
    pub fn is_fully_specified(&self) -> bool {
        self.unresolved().is_none()
    }

    fn unresolved(&self) -> Option<String> {
        for n in &self.nodes {
            if n.presence != Presence::Always {
                return Some(format!("node `{}` (optional)", n.name));
            }
            match &n.body {
                NodeBody::Random => return Some(format!("node `{}` (random)", n.name)),
                NodeBody::Fixed(t) if t.has_holes() => return Some(format!("node `{}` (holes)", n.name)),
                _ => {}
            }
        }
        for e in &self.edges {
            if let EdgePresence::Optional(_) = e.presence {
                return Some(format!("edge {}->{} (optional)", e.source, e.target));
            }
            if !e.body.is_fixed() {
                return Some(format!("edge {}->{} (random)", e.source, e.target));
            }
        }
        None
    }

    /// Number of `?` positions under the current parent sets.
    pub fn hole_count(&self) -> usize {
        let mut n = 0;
        for node in &self.nodes {
            if let NodeBody::Fixed(t) = &node.body {
                let parents = self.parents_of(&node.name);
                for p in &t.params {
                    n += p.to_row(&parents).iter().filter(|c| **c == Coef::Hole).count();
                }
            }
        }
        for e in &self.edges {
            if let EdgeFunctionSpec::Fixed { params, .. } = &e.body.function {
                n += params.iter().filter(|c| **c == Coef::Hole).count();
            }
        }
        n
    }

    /// Stable 64-bit digest of the canonical text.
    pub fn fingerprint(&self) -> u64 {
        name_hash(&serialize(self))
    }

    /// Converts a fully specified description into a validated graph.
    pub fn to_graph(&self) -> Result<Graph, ConvertError> {
        if let Some(what) = self.unresolved() {
            return Err(ConvertError::Unresolved(what));
        }
        let mut nodes = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let parents = self.parents_of(&n.name);
            let spec = match &n.body {
                NodeBody::Data => NodeSpec {
                    name: n.name.clone(),
                    dtype: n.dtype.unwrap_or(DataType::Continuous),
                    model: NodeModel::Data,
                },
                NodeBody::Fixed(t) => {
                    let rows = t
                        .params
                        .iter()
                        .map(|p| p.to_fixed_row(&parents).expect("checked for holes"))
                        .collect();
                    let mut model = Parametric::new(t.dist, rows);
                    for (k, c) in t.corrections.iter().enumerate() {
                        if let Some(c) = c {
                            let corr = c.to_correction().map_err(|source| GraphError::Correction {
                                node: n.name.clone(),
                                source,
                            })?;
                            model = model.with_correction(k, corr);
                        }
                    }
                    NodeSpec {
                        name: n.name.clone(),
                        dtype: n.dtype.unwrap_or(DataType::default_for(t.dist)),
                        model: NodeModel::Parametric(model),
                    }
                }
                NodeBody::Random => unreachable!("checked above"),
            };
            nodes.push(spec);
        }
        let edges = self
            .edges
            .iter()
            .map(|e| match &e.body.function {
                EdgeFunctionSpec::Fixed { kind, params } => {
                    let values: Vec<f64> = params.iter().filter_map(|c| c.fixed()).collect();
                    let function = EdgeFunction::new(*kind, values).map_err(|message| GraphError::InvalidEdgeFunction {
                        from: e.source.clone(),
                        to: e.target.clone(),
                        message,
                    })?;
                    let mut spec = EdgeSpec::new(e.source.clone(), e.target.clone(), function);
                    if e.body.correction == Some(true) {
                        spec.correction = EdgeCorrection::PENDING;
                    }
                    Ok(spec)
                }
                EdgeFunctionSpec::Random => unreachable!("checked above"),
            })
            .collect::<Result<Vec<_>, GraphError>>()?;
        Ok(Graph::new(nodes, edges)?)
    }

    /// Fully fixed description of a graph; frozen calibration constants are dropped.
    pub fn from_graph(graph: &Graph) -> PartialGraph {
        let nodes = graph
            .nodes()
            .iter()
            .map(|n| {
                let parents = graph.parents(&n.name);
                match &n.model {
                    NodeModel::Data => NodeEntry {
                        name: n.name.clone(),
                        presence: Presence::Always,
                        body: NodeBody::Data,
                        dtype: (n.dtype != DataType::Continuous).then_some(n.dtype),
                    },
                    NodeModel::Parametric(p) => NodeEntry {
                        name: n.name.clone(),
                        presence: Presence::Always,
                        body: NodeBody::Fixed(NodeTemplate {
                            dist: p.dist,
                            params: p.rows.iter().map(|r| ParamExpression::from_row(r, &parents)).collect(),
                            corrections: p.corrections.iter().map(|c| c.map(CorrectionSpec::from)).collect(),
                        }),
                        dtype: (n.dtype != DataType::default_for(p.dist)).then_some(n.dtype),
                    },
                }
            })
            .collect();
        let edges = graph
            .edges()
            .iter()
            .map(|e| EdgeEntry {
                source: e.source.clone(),
                target: e.target.clone(),
                presence: EdgePresence::Always,
                body: EdgeBody {
                    function: EdgeFunctionSpec::Fixed {
                        kind: e.function.kind,
                        params: e.function.params.iter().map(|&v| Coef::Fixed(v)).collect(),
                    },
                    correction: Some(e.correction.enabled),
                },
            })
            .collect();
        let mut pg = PartialGraph { nodes, edges };
        pg.canonicalize();
        pg
    }
}
