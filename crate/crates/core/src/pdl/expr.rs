//! Parameter expressions: polynomials of degree at most two over the parents,
//! mapped onto the bias / linear / quadratic positions of `ζ`.

use std::collections::BTreeMap;

use super::lexer::{tokenize, Tok};
use super::parser::Cursor;
use super::writer::{fmt_name, fmt_num};
use super::{PdlError, PdlErrorKind};
use crate::graph::{zeta_len, zeta_quad_index};

/// A position of `ζ`, named by the parents involved.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Basis {
    Bias,
    Linear(String),
    /// Product of two parents in `ζ` order; both names equal for a square.
    Quad(String, String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coef {
    Fixed(f64),
    /// Left to the randomizer.
    Hole,
}

impl Coef {
    pub fn fixed(self) -> Option<f64> {
        match self {
            Coef::Fixed(v) => Some(v),
            Coef::Hole => None,
        }
    }
}

/// One distribution parameter as a sparse coefficient map over `ζ`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamExpression {
    pub terms: BTreeMap<Basis, Coef>,
    /// A bare `?`: every position of the final `ζ` is a hole.
    pub all_hole: bool,
}

impl ParamExpression {
    pub fn constant(c: f64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0.0 {
            terms.insert(Basis::Bias, Coef::Fixed(c));
        }
        ParamExpression { terms, all_hole: false }
    }

    pub fn all_hole() -> Self {
        ParamExpression {
            terms: BTreeMap::new(),
            all_hole: true,
        }
    }

    pub fn has_holes(&self) -> bool {
        self.all_hole || self.terms.values().any(|c| *c == Coef::Hole)
    }

    /// Parents mentioned by any term.
    pub fn referenced(&self) -> impl Iterator<Item = &str> {
        self.terms.keys().flat_map(|b| match b {
            Basis::Bias => vec![],
            Basis::Linear(a) => vec![a.as_str()],
            Basis::Quad(a, b) => vec![a.as_str(), b.as_str()],
        })
    }

    /// Coefficient row of length `|ζ|` for `parents`; omitted positions are 0.
    /// Terms on parents outside the list are dropped.
    pub fn to_row(&self, parents: &[&str]) -> Vec<Coef> {
        let d = parents.len();
        if self.all_hole {
            return vec![Coef::Hole; zeta_len(d)];
        }
        let mut row = vec![Coef::Fixed(0.0); zeta_len(d)];
        let pos = |name: &str| parents.iter().position(|p| *p == name);
        for (basis, coef) in &self.terms {
            let k = match basis {
                Basis::Bias => Some(0),
                Basis::Linear(a) => pos(a).map(|i| 1 + i),
                Basis::Quad(a, b) => match (pos(a), pos(b)) {
                    (Some(i), Some(j)) => Some(zeta_quad_index(d, i.min(j), i.max(j))),
                    _ => None,
                },
            };
            if let Some(k) = k {
                row[k] = *coef;
            }
        }
        row
    }

    /// Fully fixed row; `None` while holes remain.
    pub fn to_fixed_row(&self, parents: &[&str]) -> Option<Vec<f64>> {
        self.to_row(parents).into_iter().map(Coef::fixed).collect()
    }

    /// Inverse of [`to_row`](Self::to_row) on fixed rows; zero entries are omitted.
    pub fn from_row(row: &[f64], parents: &[&str]) -> Self {
        let mut terms = BTreeMap::new();
        for (k, basis) in basis_positions(parents).into_iter().enumerate() {
            if let Some(&w) = row.get(k) {
                if w != 0.0 {
                    terms.insert(basis, Coef::Fixed(w));
                }
            }
        }
        ParamExpression { terms, all_hole: false }
    }

    /// Canonical text in `ζ` order.
    pub fn write(&self, parents: &[&str]) -> String {
        if self.all_hole {
            return "?".into();
        }
        let mut order: Vec<&Basis> = Vec::new();
        for b in basis_positions(parents) {
            if let Some((k, _)) = self.terms.get_key_value(&b) {
                order.push(k);
            }
        }
        for k in self.terms.keys() {
            if !order.contains(&k) {
                order.push(k);
            }
        }
        if order.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (n, basis) in order.iter().enumerate() {
            let vars = match basis {
                Basis::Bias => String::new(),
                Basis::Linear(a) => fmt_name(a),
                Basis::Quad(a, b) if a == b => format!("{}^2", fmt_name(a)),
                Basis::Quad(a, b) => format!("{}*{}", fmt_name(a), fmt_name(b)),
            };
            let (neg, body) = match self.terms[*basis] {
                Coef::Hole if vars.is_empty() => (false, "?*1".to_string()),
                Coef::Hole => (false, format!("?*{vars}")),
                Coef::Fixed(c) => {
                    let mag = fmt_num(c.abs());
                    let body = if vars.is_empty() {
                        mag
                    } else if c.abs() == 1.0 {
                        vars
                    } else {
                        format!("{mag}*{vars}")
                    };
                    (c.is_sign_negative(), body)
                }
            };
            match (n, neg) {
                (0, false) => out.push_str(&body),
                (0, true) => {
                    out.push('-');
                    out.push_str(&body);
                }
                (_, false) => {
                    out.push_str(" + ");
                    out.push_str(&body);
                }
                (_, true) => {
                    out.push_str(" - ");
                    out.push_str(&body);
                }
            }
        }
        // a lone bias hole on a parentless node is the same thing as `?`
        if parents.is_empty() && out == "?*1" {
            return "?".into();
        }
        out
    }
}

/// Basis element of each `ζ` position for `parents`.
pub fn basis_positions(parents: &[&str]) -> Vec<Basis> {
    let d = parents.len();
    let mut out = Vec::with_capacity(zeta_len(d));
    out.push(Basis::Bias);
    out.extend(parents.iter().map(|p| Basis::Linear(p.to_string())));
    for i in 0..d {
        for j in i..d {
            out.push(Basis::Quad(parents[i].to_string(), parents[j].to_string()));
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RawVar {
    pub name: String,
    pub line: usize,
    pub col: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RawTerm {
    pub coef: f64,
    pub hole: bool,
    pub vars: Vec<RawVar>,
    pub factors: usize,
    pub line: usize,
    pub col: usize,
}

/// An expression whose parent names are not yet checked.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RawExpr {
    pub terms: Vec<RawTerm>,
    pub bare_hole: bool,
}

/// Reads an expression up to (not including) the next `,` or `)` at depth zero.
pub(crate) fn parse_raw(cur: &mut Cursor) -> Result<RawExpr, PdlError> {
    let mut terms = Vec::new();
    let signed = matches!(cur.peek(), Tok::Minus | Tok::Plus);
    let mut negate = match cur.peek() {
        Tok::Minus => {
            cur.bump();
            true
        }
        Tok::Plus => {
            cur.bump();
            false
        }
        _ => false,
    };
    loop {
        terms.push(parse_term(cur, negate)?);
        match cur.peek() {
            Tok::Plus => {
                cur.bump();
                negate = false;
            }
            Tok::Minus => {
                cur.bump();
                negate = true;
            }
            _ => break,
        }
        // `a + -b` and `a - -b`
        if *cur.peek() == Tok::Minus {
            cur.bump();
            negate = !negate;
            if *cur.peek() == Tok::Hole {
                let (l, c) = cur.here();
                return Err(cur.error_at(l, c, PdlErrorKind::ScaledHole));
            }
        }
    }
    let bare_hole = !signed && terms.len() == 1 && terms[0].hole && terms[0].factors == 1;
    Ok(RawExpr { terms, bare_hole })
}

fn parse_term(cur: &mut Cursor, negate: bool) -> Result<RawTerm, PdlError> {
    let (line, col) = cur.here();
    let mut coef = 1.0f64;
    let mut scaled = negate;
    let mut hole = false;
    let mut vars: Vec<RawVar> = Vec::new();
    let mut factors = 0usize;
    loop {
        factors += 1;
        let (fl, fc) = cur.here();
        match cur.peek().clone() {
            Tok::Number(v) => {
                cur.bump();
                coef *= v;
                if v != 1.0 {
                    scaled = true;
                }
            }
            Tok::Hole => {
                cur.bump();
                if hole {
                    return Err(cur.error_at(fl, fc, PdlErrorKind::ScaledHole));
                }
                hole = true;
            }
            Tok::Ident(name) | Tok::Quoted(name) => {
                cur.bump();
                let mut power = 1usize;
                if *cur.peek() == Tok::Caret {
                    cur.bump();
                    let (el, ec) = cur.here();
                    match cur.peek().clone() {
                        Tok::Number(e) if e == 1.0 || e == 2.0 => {
                            cur.bump();
                            power = e as usize;
                        }
                        Tok::Number(e) if e.fract() == 0.0 && e > 2.0 => {
                            return Err(cur.error_at(el, ec, PdlErrorKind::NonQuadraticTerm));
                        }
                        Tok::Number(e) => {
                            return Err(cur.error_at(el, ec, PdlErrorKind::InvalidExponent(e)));
                        }
                        other => {
                            return Err(cur.error_at(
                                el,
                                ec,
                                PdlErrorKind::Syntax {
                                    expected: "exponent 1 or 2".into(),
                                    found: other.describe(),
                                },
                            ))
                        }
                    }
                }
                for _ in 0..power {
                    vars.push(RawVar {
                        name: name.clone(),
                        line: fl,
                        col: fc,
                    });
                }
                if vars.len() > 2 {
                    return Err(cur.error_at(fl, fc, PdlErrorKind::NonQuadraticTerm));
                }
            }
            other => {
                return Err(cur.error_at(
                    fl,
                    fc,
                    PdlErrorKind::Syntax {
                        expected: "number, `?` or parent name".into(),
                        found: other.describe(),
                    },
                ))
            }
        }
        if *cur.peek() == Tok::Star {
            cur.bump();
        } else {
            break;
        }
    }
    if hole && scaled {
        return Err(cur.error_at(line, col, PdlErrorKind::ScaledHole));
    }
    if negate {
        coef = -coef;
    }
    Ok(RawTerm {
        coef,
        hole,
        vars,
        factors,
        line,
        col,
    })
}

/// Checks parent names and folds terms onto basis positions.
pub(crate) fn resolve(raw: &RawExpr, node: &str, parents: &[&str]) -> Result<ParamExpression, PdlError> {
    let pos = |v: &RawVar| -> Result<usize, PdlError> {
        parents.iter().position(|p| *p == v.name).ok_or_else(|| PdlError {
            line: v.line,
            col: v.col,
            kind: PdlErrorKind::UnknownParentInExpression {
                node: node.to_string(),
                name: v.name.clone(),
            },
        })
    };
    let mut terms: BTreeMap<Basis, Coef> = BTreeMap::new();
    for t in &raw.terms {
        let basis = match t.vars.as_slice() {
            [] => Basis::Bias,
            [a] => {
                pos(a)?;
                Basis::Linear(a.name.clone())
            }
            [a, b] => {
                let (i, j) = (pos(a)?, pos(b)?);
                let (x, y) = if i <= j { (a, b) } else { (b, a) };
                Basis::Quad(x.name.clone(), y.name.clone())
            }
            _ => unreachable!("degree checked while parsing"),
        };
        let coef = if t.hole { Coef::Hole } else { Coef::Fixed(t.coef) };
        let conflict = || PdlError {
            line: t.line,
            col: t.col,
            kind: PdlErrorKind::HoleConflict,
        };
        match (terms.get(&basis).copied(), coef) {
            (None, c) => {
                terms.insert(basis, c);
            }
            (Some(Coef::Fixed(a)), Coef::Fixed(b)) => {
                terms.insert(basis, Coef::Fixed(a + b));
            }
            _ => return Err(conflict()),
        }
    }
    terms.retain(|_, c| *c != Coef::Fixed(0.0));
    if raw.bare_hole || (parents.is_empty() && terms.len() == 1 && terms.get(&Basis::Bias) == Some(&Coef::Hole)) {
        return Ok(ParamExpression::all_hole());
    }
    Ok(ParamExpression { terms, all_hole: false })
}

/// Parses a standalone parameter expression against a fixed parent list.
pub fn parse_param_expression(text: &str, parents: &[&str]) -> Result<ParamExpression, PdlError> {
    let toks = tokenize(text)?;
    let mut cur = Cursor::new(toks);
    cur.skip_newlines();
    let raw = parse_raw(&mut cur)?;
    cur.skip_newlines();
    if *cur.peek() != Tok::Eof {
        let (l, c) = cur.here();
        let found = cur.peek().describe();
        return Err(cur.error_at(
            l,
            c,
            PdlErrorKind::Syntax {
                expected: "`+`, `-`, `*` or end of expression".into(),
                found,
            },
        ));
    }
    resolve(&raw, "<expression>", parents)
}
