use std::collections::HashSet;

use super::expr::{parse_raw, resolve, RawExpr};
use super::lexer::{tokenize, Tok, Token};
use super::{
    Coef, CorrectionSpec, EdgeBody, EdgeEntry, EdgeFunctionSpec, EdgePresence, NodeBody, NodeEntry, NodeTemplate,
    PartialGraph, PdlError, PdlErrorKind, Presence,
};
use crate::dist::Distribution;
use crate::edge::EdgeFunctionKind;
use crate::graph::DataType;

/// Token stream; newlines are insignificant inside parentheses and braces.
pub(crate) struct Cursor {
    toks: Vec<Token>,
    i: usize,
    depth: usize,
}

impl Cursor {
    pub(crate) fn new(toks: Vec<Token>) -> Self {
        Cursor { toks, i: 0, depth: 0 }
    }

    fn skip_nested_newlines(&mut self) {
        if self.depth > 0 {
            self.skip_newlines();
        }
    }

    pub(crate) fn skip_newlines(&mut self) {
        while self.toks[self.i].tok == Tok::Newline {
            self.i += 1;
        }
    }

    pub(crate) fn peek(&mut self) -> &Tok {
        self.skip_nested_newlines();
        &self.toks[self.i].tok
    }

    pub(crate) fn here(&mut self) -> (usize, usize) {
        self.skip_nested_newlines();
        let t = &self.toks[self.i];
        (t.line, t.col)
    }

    pub(crate) fn bump(&mut self) -> Token {
        self.skip_nested_newlines();
        let t = self.toks[self.i].clone();
        if t.tok != Tok::Eof {
            self.i += 1;
        }
        match t.tok {
            Tok::LParen | Tok::LBrace => self.depth += 1,
            Tok::RParen | Tok::RBrace => self.depth = self.depth.saturating_sub(1),
            _ => {}
        }
        t
    }

    pub(crate) fn error_at(&self, line: usize, col: usize, kind: PdlErrorKind) -> PdlError {
        PdlError { line, col, kind }
    }

    fn unexpected(&mut self, expected: &str) -> PdlError {
        let (line, col) = self.here();
        let found = self.peek().describe();
        PdlError {
            line,
            col,
            kind: PdlErrorKind::Syntax {
                expected: expected.to_string(),
                found,
            },
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, PdlError> {
        if *self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn is_word(&mut self, word: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == word)
    }

    fn expect_word(&mut self, word: &str) -> Result<(), PdlError> {
        if self.is_word(word) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{word}`")))
        }
    }

    /// Identifier or quoted name, with its position.
    fn name(&mut self, what: &str) -> Result<(String, usize, usize), PdlError> {
        let (line, col) = self.here();
        match self.peek().clone() {
            Tok::Ident(s) | Tok::Quoted(s) => {
                self.bump();
                Ok((s, line, col))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn word(&mut self, what: &str) -> Result<(String, usize, usize), PdlError> {
        let (line, col) = self.here();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok((s, line, col))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn number(&mut self) -> Result<f64, PdlError> {
        let sign = match self.peek() {
            Tok::Minus => {
                self.bump();
                -1.0
            }
            Tok::Plus => {
                self.bump();
                1.0
            }
            _ => 1.0,
        };
        match self.peek().clone() {
            Tok::Number(v) => {
                self.bump();
                Ok(sign * v)
            }
            _ => Err(self.unexpected("number")),
        }
    }
}

enum RawBody {
    Fixed {
        dist: Distribution,
        params: Vec<RawExpr>,
        corrections: Vec<Option<CorrectionSpec>>,
    },
    Random,
    Data,
}

struct RawNode {
    name: String,
    presence: Presence,
    body: RawBody,
    dtype: Option<DataType>,
}

struct RawEdge {
    entry: EdgeEntry,
    line: usize,
    col: usize,
}

/// Parses a description into a [`PartialGraph`], or reports the first problem.
pub fn parse_description(text: &str) -> Result<PartialGraph, PdlError> {
    let mut cur = Cursor::new(tokenize(text)?);
    let mut nodes: Vec<RawNode> = Vec::new();
    let mut names: HashSet<String> = HashSet::new();
    let mut edges: Vec<RawEdge> = Vec::new();

    loop {
        cur.skip_newlines();
        if *cur.peek() == Tok::Eof {
            break;
        }
        if cur.is_word("node") {
            cur.bump();
            let (name, line, col) = cur.name("node name")?;
            if !names.insert(name.clone()) {
                return Err(cur.error_at(line, col, PdlErrorKind::DuplicateNode(name)));
            }
            cur.expect(Tok::Colon, "`:`")?;
            nodes.push(node_spec(&mut cur, name)?);
        } else if cur.is_word("edge") {
            let (line, col) = cur.here();
            cur.bump();
            let (source, _, _) = cur.name("source node")?;
            cur.expect(Tok::Arrow, "`->`")?;
            let (target, _, _) = cur.name("target node")?;
            cur.expect(Tok::Colon, "`:`")?;
            let (presence, body) = edge_spec(&mut cur)?;
            edges.push(RawEdge {
                entry: EdgeEntry {
                    source,
                    target,
                    presence,
                    body,
                },
                line,
                col,
            });
        } else {
            return Err(cur.unexpected("`node` or `edge`"));
        }
        match cur.peek() {
            Tok::Newline | Tok::Eof => {}
            _ => return Err(cur.unexpected("end of line")),
        }
    }

    let mut seen = HashSet::new();
    for e in &edges {
        let (s, t) = (&e.entry.source, &e.entry.target);
        for missing in [s, t] {
            if !names.contains(missing) {
                return Err(cur.error_at(
                    e.line,
                    e.col,
                    PdlErrorKind::UnknownParent {
                        from: s.clone(),
                        to: t.clone(),
                        missing: missing.clone(),
                    },
                ));
            }
        }
        if s == t {
            return Err(cur.error_at(e.line, e.col, PdlErrorKind::SelfLoop(s.clone())));
        }
        if !seen.insert((s.clone(), t.clone())) {
            return Err(cur.error_at(e.line, e.col, PdlErrorKind::DuplicateEdge(s.clone(), t.clone())));
        }
    }

    let mut pg = PartialGraph {
        nodes: Vec::with_capacity(nodes.len()),
        edges: edges.into_iter().map(|e| e.entry).collect(),
    };
    // placeholder bodies so parents_of sees declaration order
    pg.nodes = nodes
        .iter()
        .map(|n| NodeEntry {
            name: n.name.clone(),
            presence: n.presence,
            body: NodeBody::Random,
            dtype: n.dtype,
        })
        .collect();
    pg.canonicalize();
    for (i, n) in nodes.into_iter().enumerate() {
        pg.nodes[i].body = match n.body {
            RawBody::Random => NodeBody::Random,
            RawBody::Data => NodeBody::Data,
            RawBody::Fixed {
                dist,
                params,
                corrections,
            } => {
                let parents = pg.parents_of(&n.name);
                let params = params
                    .iter()
                    .map(|raw| resolve(raw, &n.name, &parents))
                    .collect::<Result<Vec<_>, _>>()?;
                NodeBody::Fixed(NodeTemplate {
                    dist,
                    params,
                    corrections,
                })
            }
        };
    }
    Ok(pg)
}

fn node_spec(cur: &mut Cursor, name: String) -> Result<RawNode, PdlError> {
    if cur.is_word("optional") {
        cur.bump();
        let p = optional_probability(cur)?;
        let (body, dtype) = if *cur.peek() == Tok::LBrace {
            cur.bump();
            let inner = node_inner(cur)?;
            cur.expect(Tok::RBrace, "`}`")?;
            inner
        } else {
            (RawBody::Random, None)
        };
        return Ok(RawNode {
            name,
            presence: Presence::Optional(p),
            body,
            dtype,
        });
    }
    let (body, dtype) = node_inner(cur)?;
    Ok(RawNode {
        name,
        presence: Presence::Always,
        body,
        dtype,
    })
}

fn optional_probability(cur: &mut Cursor) -> Result<Option<f64>, PdlError> {
    if *cur.peek() != Tok::LParen {
        return Ok(None);
    }
    cur.bump();
    cur.expect_word("p")?;
    cur.expect(Tok::Eq, "`=`")?;
    let (line, col) = cur.here();
    let p = cur.number()?;
    if !(0.0..=1.0).contains(&p) {
        return Err(cur.error_at(line, col, PdlErrorKind::InvalidProbability(p)));
    }
    cur.expect(Tok::RParen, "`)`")?;
    Ok(Some(p))
}

fn node_inner(cur: &mut Cursor) -> Result<(RawBody, Option<DataType>), PdlError> {
    let (word, line, col) = cur.word("distribution, `random` or `data`")?;
    let mut body = match word.as_str() {
        "random" => RawBody::Random,
        "data" => RawBody::Data,
        _ => {
            let dist: Distribution = word
                .parse()
                .map_err(|_| cur.error_at(line, col, PdlErrorKind::UnknownDistribution(word.clone())))?;
            let params = dist_params(cur, dist, line, col)?;
            RawBody::Fixed {
                dist,
                params,
                corrections: vec![None; dist.arity()],
            }
        }
    };

    let mut dtype = None;
    let mut pending_target: Option<(f64, usize, usize)> = None;
    while *cur.peek() == Tok::Comma {
        cur.bump();
        let (clause, cl, cc) = cur.word("`dtype`, `correction` or `target_mean`")?;
        match (clause.as_str(), &mut body) {
            ("dtype", _) => {
                if dtype.is_some() {
                    return Err(cur.error_at(cl, cc, PdlErrorKind::DuplicateClause(clause)));
                }
                cur.expect(Tok::Eq, "`=`")?;
                let (d, dl, dc) = cur.word("dtype")?;
                dtype = Some(
                    d.parse::<DataType>()
                        .map_err(|_| cur.error_at(dl, dc, PdlErrorKind::UnknownDtype(d.clone())))?,
                );
            }
            ("correction", RawBody::Fixed { dist, corrections, .. }) => {
                let (k, spec) = correction_clause(cur, *dist, cl, cc)?;
                if corrections[k].is_some() {
                    return Err(cur.error_at(cl, cc, PdlErrorKind::DuplicateClause(format!("correction on {}", dist.param_names()[k]))));
                }
                corrections[k] = Some(spec);
            }
            ("target_mean", RawBody::Fixed { .. }) => {
                if pending_target.is_some() {
                    return Err(cur.error_at(cl, cc, PdlErrorKind::DuplicateClause(clause)));
                }
                cur.expect(Tok::Eq, "`=`")?;
                pending_target = Some((cur.number()?, cl, cc));
            }
            _ => {
                return Err(cur.error_at(
                    cl,
                    cc,
                    PdlErrorKind::Syntax {
                        expected: "a clause valid for this node".into(),
                        found: format!("`{clause}`"),
                    },
                ))
            }
        }
    }

    if let RawBody::Fixed { corrections, .. } = &mut body {
        if let Some((t, tl, tc)) = pending_target {
            let present: Vec<usize> = (0..corrections.len()).filter(|&k| corrections[k].is_some()).collect();
            match present.as_slice() {
                [k] => {
                    let c = corrections[*k].as_mut().expect("present");
                    if c.target_mean.is_some() {
                        return Err(cur.error_at(tl, tc, PdlErrorKind::DuplicateClause("target_mean".into())));
                    }
                    c.target_mean = Some(t);
                }
                [] => {
                    return Err(cur.error_at(
                        tl,
                        tc,
                        PdlErrorKind::InvalidCorrection("target_mean needs a correction".into()),
                    ))
                }
                _ => {
                    return Err(cur.error_at(
                        tl,
                        tc,
                        PdlErrorKind::InvalidCorrection("ambiguous target_mean; put it inside a correction".into()),
                    ))
                }
            }
        }
        for c in corrections.iter().flatten() {
            c.to_correction()
                .map_err(|e| cur.error_at(line, col, PdlErrorKind::InvalidCorrection(e.to_string())))?;
        }
    }
    Ok((body, dtype))
}

fn dist_params(cur: &mut Cursor, dist: Distribution, line: usize, col: usize) -> Result<Vec<RawExpr>, PdlError> {
    cur.expect(Tok::LParen, "`(`")?;
    let mut slots: Vec<Option<RawExpr>> = vec![None; dist.arity()];
    if *cur.peek() != Tok::RParen {
        loop {
            let (pname, pl, pc) = cur.word("parameter name")?;
            let k = dist.param_index(&pname).ok_or_else(|| {
                cur.error_at(
                    pl,
                    pc,
                    PdlErrorKind::UnknownParameter {
                        owner: dist.name().into(),
                        param: pname.clone(),
                    },
                )
            })?;
            if slots[k].is_some() {
                return Err(cur.error_at(pl, pc, PdlErrorKind::DuplicateParameter(pname)));
            }
            cur.expect(Tok::Eq, "`=`")?;
            slots[k] = Some(parse_raw(cur)?);
            if *cur.peek() == Tok::Comma {
                cur.bump();
            } else {
                break;
            }
        }
    }
    cur.expect(Tok::RParen, "`,` or `)`")?;
    slots
        .into_iter()
        .enumerate()
        .map(|(k, s)| {
            s.ok_or_else(|| {
                cur.error_at(
                    line,
                    col,
                    PdlErrorKind::MissingParameter {
                        owner: dist.name().into(),
                        param: dist.param_names()[k].into(),
                    },
                )
            })
        })
        .collect()
}

fn correction_clause(
    cur: &mut Cursor,
    dist: Distribution,
    line: usize,
    col: usize,
) -> Result<(usize, CorrectionSpec), PdlError> {
    cur.expect(Tok::LParen, "`(`")?;
    let lower = cur.number()?;
    cur.expect(Tok::Comma, "`,`")?;
    let upper = cur.number()?;
    let mut target_mean = None;
    let mut param = None;
    while *cur.peek() == Tok::Comma {
        cur.bump();
        let (key, kl, kc) = cur.word("`target_mean` or `param`")?;
        cur.expect(Tok::Eq, "`=`")?;
        match key.as_str() {
            "target_mean" if target_mean.is_none() => target_mean = Some(cur.number()?),
            "param" if param.is_none() => {
                let (p, pl, pc) = cur.word("parameter name")?;
                param = Some(dist.param_index(&p).ok_or_else(|| {
                    cur.error_at(
                        pl,
                        pc,
                        PdlErrorKind::UnknownParameter {
                            owner: dist.name().into(),
                            param: p.clone(),
                        },
                    )
                })?);
            }
            "target_mean" | "param" => return Err(cur.error_at(kl, kc, PdlErrorKind::DuplicateClause(key))),
            _ => {
                return Err(cur.error_at(
                    kl,
                    kc,
                    PdlErrorKind::Syntax {
                        expected: "`target_mean` or `param`".into(),
                        found: format!("`{key}`"),
                    },
                ))
            }
        }
    }
    cur.expect(Tok::RParen, "`)`")?;
    let k = match param.or(dist.default_corrected_param()) {
        Some(k) => k,
        None => {
            return Err(cur.error_at(
                line,
                col,
                PdlErrorKind::InvalidCorrection(format!("{} needs `param=` to choose the corrected parameter", dist.name())),
            ))
        }
    };
    Ok((
        k,
        CorrectionSpec {
            lower,
            upper,
            target_mean,
        },
    ))
}

fn edge_spec(cur: &mut Cursor) -> Result<(EdgePresence, EdgeBody), PdlError> {
    let presence = if cur.is_word("optional") {
        cur.bump();
        EdgePresence::Optional(optional_probability(cur)?)
    } else if cur.is_word("required_if_exists") {
        cur.bump();
        EdgePresence::RequiredIfExists
    } else {
        return Ok((EdgePresence::Always, edge_inner(cur)?));
    };
    let body = if *cur.peek() == Tok::LBrace {
        cur.bump();
        let b = edge_inner(cur)?;
        cur.expect(Tok::RBrace, "`}`")?;
        b
    } else {
        EdgeBody::random()
    };
    Ok((presence, body))
}

fn edge_inner(cur: &mut Cursor) -> Result<EdgeBody, PdlError> {
    let (word, line, col) = cur.word("edge function or `random`")?;
    let function = if word == "random" {
        EdgeFunctionSpec::Random
    } else {
        let kind: EdgeFunctionKind = word
            .parse()
            .map_err(|_| cur.error_at(line, col, PdlErrorKind::UnknownEdgeFunction(word.clone())))?;
        let mut params: Vec<Option<Coef>> = vec![None; kind.param_names().len()];
        if *cur.peek() == Tok::LParen {
            cur.bump();
            if *cur.peek() != Tok::RParen {
                loop {
                    let (pname, pl, pc) = cur.word("parameter name")?;
                    let k = kind.param_index(&pname).ok_or_else(|| {
                        cur.error_at(
                            pl,
                            pc,
                            PdlErrorKind::UnknownParameter {
                                owner: kind.name().into(),
                                param: pname.clone(),
                            },
                        )
                    })?;
                    if params[k].is_some() {
                        return Err(cur.error_at(pl, pc, PdlErrorKind::DuplicateParameter(pname)));
                    }
                    cur.expect(Tok::Eq, "`=`")?;
                    params[k] = Some(if *cur.peek() == Tok::Hole {
                        cur.bump();
                        Coef::Hole
                    } else {
                        Coef::Fixed(cur.number()?)
                    });
                    if *cur.peek() == Tok::Comma {
                        cur.bump();
                    } else {
                        break;
                    }
                }
            }
            cur.expect(Tok::RParen, "`,` or `)`")?;
        }
        let params: Vec<Coef> = params
            .into_iter()
            .zip(kind.default_params())
            .map(|(p, d)| p.unwrap_or(Coef::Fixed(*d)))
            .collect();
        let fixed: Option<Vec<f64>> = params.iter().map(|c| c.fixed()).collect();
        if let Some(values) = fixed {
            kind.check(&values)
                .map_err(|m| cur.error_at(line, col, PdlErrorKind::InvalidEdgeParameter(m)))?;
        }
        EdgeFunctionSpec::Fixed { kind, params }
    };

    let mut correction = None;
    while *cur.peek() == Tok::Comma {
        cur.bump();
        let (clause, cl, cc) = cur.word("`correction`")?;
        if clause != "correction" {
            return Err(cur.error_at(
                cl,
                cc,
                PdlErrorKind::Syntax {
                    expected: "`correction`".into(),
                    found: format!("`{clause}`"),
                },
            ));
        }
        if correction.is_some() {
            return Err(cur.error_at(cl, cc, PdlErrorKind::DuplicateClause(clause)));
        }
        let on = if *cur.peek() == Tok::Eq {
            cur.bump();
            let (v, vl, vc) = cur.word("`on` or `off`")?;
            match v.as_str() {
                "on" => true,
                "off" => false,
                _ => {
                    return Err(cur.error_at(
                        vl,
                        vc,
                        PdlErrorKind::Syntax {
                            expected: "`on` or `off`".into(),
                            found: format!("`{v}`"),
                        },
                    ))
                }
            }
        } else {
            true
        };
        correction = Some(on);
    }
    if correction.is_none() && function != EdgeFunctionSpec::Random {
        correction = Some(false);
    }
    Ok(EdgeBody { function, correction })
}
