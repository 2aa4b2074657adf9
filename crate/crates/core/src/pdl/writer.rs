use std::fmt::Write as _;

use super::lexer::{is_ident_char, is_ident_start};
use super::{
    Coef, EdgeBody, EdgeEntry, EdgeFunctionSpec, EdgePresence, NodeBody, NodeEntry, PartialGraph, Presence,
};
use crate::edge::EdgeFunctionKind;
use crate::graph::{DataType, Graph};

/// Shortest text that parses back to exactly `x`.
pub(crate) fn fmt_num(x: f64) -> String {
    let plain = format!("{x}");
    if plain.len() <= 21 {
        plain
    } else {
        format!("{x:e}")
    }
}

pub(crate) fn fmt_name(name: &str) -> String {
    let mut chars = name.chars();
    let plain = chars.next().is_some_and(is_ident_start) && chars.all(is_ident_char);
    if plain {
        name.to_string()
    } else {
        format!("\"{}\"", name.replace('\\', "\\\\").replace('"', "\\\""))
    }
}

fn fmt_coef(c: Coef) -> String {
    match c {
        Coef::Fixed(v) => fmt_num(v),
        Coef::Hole => "?".into(),
    }
}

/// Canonical text: nodes in declaration order, edges by (source, target).
pub fn serialize(pg: &PartialGraph) -> String {
    let mut pg = pg.clone();
    pg.canonicalize();
    let mut out = String::new();
    for n in &pg.nodes {
        let _ = writeln!(out, "node {} : {}", fmt_name(&n.name), node_spec(&pg, n));
    }
    for e in &pg.edges {
        let _ = writeln!(
            out,
            "edge {}->{} : {}",
            fmt_name(&e.source),
            fmt_name(&e.target),
            edge_spec(e)
        );
    }
    out
}

/// Text of a fully specified graph (frozen calibration constants are not written).
pub fn serialize_graph(graph: &Graph) -> String {
    serialize(&PartialGraph::from_graph(graph))
}

fn node_spec(pg: &PartialGraph, n: &NodeEntry) -> String {
    let body = node_body(pg, n);
    match n.presence {
        Presence::Always => body,
        Presence::Optional(p) => {
            let mut s = "optional".to_string();
            if let Some(p) = p {
                let _ = write!(s, "(p={})", fmt_num(p));
            }
            if !(n.body == NodeBody::Random && n.dtype.is_none()) {
                let _ = write!(s, " {{ {body} }}");
            }
            s
        }
    }
}

fn node_body(pg: &PartialGraph, n: &NodeEntry) -> String {
    let mut s = match &n.body {
        NodeBody::Random => "random".to_string(),
        NodeBody::Data => "data".to_string(),
        NodeBody::Fixed(t) => {
            let parents = pg.parents_of(&n.name);
            let args: Vec<String> = t
                .dist
                .param_names()
                .iter()
                .zip(&t.params)
                .map(|(name, e)| format!("{name}={}", e.write(&parents)))
                .collect();
            let mut s = format!("{}({})", t.dist.name(), args.join(", "));
            for (k, c) in t.corrections.iter().enumerate() {
                if let Some(c) = c {
                    let _ = write!(s, ", correction({}, {}", fmt_num(c.lower), fmt_num(c.upper));
                    if let Some(m) = c.target_mean {
                        let _ = write!(s, ", target_mean={}", fmt_num(m));
                    }
                    if t.dist.default_corrected_param() != Some(k) {
                        let _ = write!(s, ", param={}", t.dist.param_names()[k]);
                    }
                    s.push(')');
                }
            }
            s
        }
    };
    if let Some(d) = n.dtype {
        let _ = write!(s, ", dtype={}", DataType::name(d));
    }
    s
}

fn edge_spec(e: &EdgeEntry) -> String {
    let body = edge_body(&e.body);
    let wrap = |head: String| {
        if e.body == EdgeBody::random() {
            head
        } else {
            format!("{head} {{ {body} }}")
        }
    };
    match e.presence {
        EdgePresence::Always => body,
        EdgePresence::Optional(p) => wrap(match p {
            Some(p) => format!("optional(p={})", fmt_num(p)),
            None => "optional".into(),
        }),
        EdgePresence::RequiredIfExists => wrap("required_if_exists".into()),
    }
}

fn edge_body(b: &EdgeBody) -> String {
    let mut s = match &b.function {
        EdgeFunctionSpec::Random => "random".to_string(),
        EdgeFunctionSpec::Fixed { kind, params } => {
            if *kind == EdgeFunctionKind::Identity {
                "identity".to_string()
            } else {
                let args: Vec<String> = kind
                    .param_names()
                    .iter()
                    .zip(params)
                    .map(|(k, c)| format!("{k}={}", fmt_coef(*c)))
                    .collect();
                format!("{}({})", kind.name(), args.join(", "))
            }
        }
    };
    match (&b.function, b.correction) {
        (_, Some(true)) => s.push_str(", correction"),
        (EdgeFunctionSpec::Random, Some(false)) => s.push_str(", correction=off"),
        _ => {}
    }
    s
}
