//! Randomization guidelines (`.gdl`): the search space the randomizer draws from.
//!
//! ```text
//! nodes:
//!   distributions: [normal, bernoulli]
//!   coef_range: [-5,-1] U [1,5]
//!   existence: 0.5
//!   terms: linear
//! edges:
//!   functions: [identity, sigmoid(alpha=[0.5,2], beta=[-1,1], gamma=1)]
//!   sparsity: 0.5
//!   correction: off
//!   groups: Z=[A, B]; R=[R_A, R_B]
//!   mask: [[0,1],[0,0]]
//! corrections:
//!   policy: bounded
//!   upper: 10
//! ```
//!
//! Section headers are optional; every key has a home section and may not
//! appear under another one.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::Distribution;
use crate::edge::EdgeFunctionKind;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GuidelineErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("empty choice list for `{0}`")]
    EmptyChoiceList(String),
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("key `{key}` belongs in section `{home}`")]
    WrongSection { key: String, home: String },
    #[error("key `{0}` given twice")]
    DuplicateKey(String),
    #[error("unknown distribution `{0}`")]
    UnknownDistribution(String),
    #[error("unknown edge function `{0}`")]
    UnknownEdgeFunction(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct GuidelineError {
    pub line: usize,
    pub kind: GuidelineErrorKind,
}

/// Finite union of closed intervals; points are degenerate intervals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalUnion(Vec<(f64, f64)>);

impl IntervalUnion {
    pub fn new(intervals: Vec<(f64, f64)>) -> Result<Self, String> {
        if intervals.is_empty() {
            return Err("empty interval union".into());
        }
        for &(a, b) in &intervals {
            if !(a.is_finite() && b.is_finite()) {
                return Err(format!("[{a}, {b}] is not finite"));
            }
            if a > b {
                return Err(format!("[{a}, {b}] has lower bound above upper bound"));
            }
        }
        Ok(IntervalUnion(intervals))
    }

    pub fn point(v: f64) -> Self {
        IntervalUnion(vec![(v, v)])
    }

    pub fn interval(a: f64, b: f64) -> Result<Self, String> {
        IntervalUnion::new(vec![(a, b)])
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.0
    }

    pub fn contains(&self, x: f64) -> bool {
        self.0.iter().any(|&(a, b)| a <= x && x <= b)
    }

    pub fn min(&self) -> f64 {
        self.0.iter().map(|p| p.0).fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.0.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Uniform over the union, each interval weighted by its length. A union of
    /// points picks one of them uniformly.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let total: f64 = self.0.iter().map(|&(a, b)| b - a).sum();
        if total == 0.0 {
            let k = rng.gen_range(0..self.0.len());
            return self.0[k].0;
        }
        let mut u = rng.gen::<f64>() * total;
        for &(a, b) in &self.0 {
            let w = b - a;
            if u < w {
                return (a + u).min(b);
            }
            u -= w;
        }
        self.0.iter().rev().find(|p| p.1 > p.0).map_or(self.0[0].0, |p| p.1)
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, &(a, b)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" U ")?;
            }
            if a == b {
                write!(f, "{a}")?;
            } else {
                write!(f, "[{a},{b}]")?;
            }
        }
        Ok(())
    }
}

impl FromStr for IntervalUnion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut v = Values::new(s);
        let u = v.union()?;
        v.end()?;
        Ok(u)
    }
}

/// An edge function the randomizer may pick, with its parameter ranges.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionTemplate {
    pub kind: EdgeFunctionKind,
    pub ranges: Vec<IntervalUnion>,
}

impl FunctionTemplate {
    /// Default ranges: alpha in [0.5, 2], beta in [-1, 1], gamma = 1, phi in [0.75, 1.25].
    pub fn with_defaults(kind: EdgeFunctionKind) -> Self {
        let ranges = kind
            .param_names()
            .iter()
            .map(|p| match *p {
                "alpha" => IntervalUnion(vec![(0.5, 2.0)]),
                "beta" => IntervalUnion(vec![(-1.0, 1.0)]),
                "phi" => IntervalUnion(vec![(0.75, 1.25)]),
                _ => IntervalUnion::point(1.0),
            })
            .collect();
        FunctionTemplate { kind, ranges }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Terms {
    /// Bias and linear positions only.
    Linear,
    /// Every position of `ζ`, products included.
    Quadratic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrectionPolicy {
    /// Corrections on parameters with a finite bound (probabilities, scales, rates).
    Bounded,
    Always,
    Never,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Guideline {
    pub distributions: Vec<Distribution>,
    pub coef_range: IntervalUnion,
    /// Default keep-probability of optional nodes.
    pub existence: f64,
    pub terms: Terms,
    pub functions: Vec<FunctionTemplate>,
    /// Drawn once per randomized graph; a point when both ends agree.
    pub sparsity: (f64, f64),
    pub edge_correction: bool,
    /// Named node groups addressed by the mask, in declaration order.
    pub groups: Vec<(String, Vec<String>)>,
    /// `mask[s][t] = false` forbids edges from group `s` into group `t`.
    pub mask: Option<Vec<Vec<bool>>>,
    pub policy: CorrectionPolicy,
    /// Stand-ins for infinite natural bounds of corrected parameters.
    pub lower: f64,
    pub upper: f64,
    pub target_mean: Option<IntervalUnion>,
}

impl Default for Guideline {
    fn default() -> Self {
        Guideline {
            distributions: vec![Distribution::Normal],
            coef_range: IntervalUnion(vec![(-1.0, 1.0)]),
            existence: 0.5,
            terms: Terms::Linear,
            functions: vec![FunctionTemplate::with_defaults(EdgeFunctionKind::Identity)],
            sparsity: (0.5, 0.5),
            edge_correction: false,
            groups: Vec::new(),
            mask: None,
            policy: CorrectionPolicy::Bounded,
            lower: -10.0,
            upper: 10.0,
            target_mean: None,
        }
    }
}

impl Guideline {
    fn group_of(&self, node: &str) -> Option<usize> {
        self.groups.iter().position(|(_, members)| members.iter().any(|m| m == node))
    }

    /// Whether the mask admits an edge; nodes outside every group are unrestricted.
    pub fn allows(&self, source: &str, target: &str) -> bool {
        match (&self.mask, self.group_of(source), self.group_of(target)) {
            (Some(mask), Some(s), Some(t)) => mask[s][t],
            _ => true,
        }
    }

    /// Singleton groups, one per node, with the given admissibility matrix.
    pub fn with_node_mask(mut self, nodes: &[String], mask: Vec<Vec<bool>>) -> Self {
        self.groups = nodes.iter().map(|n| (n.clone(), vec![n.clone()])).collect();
        self.mask = Some(mask);
        self
    }

    pub fn template(&self, kind: EdgeFunctionKind) -> FunctionTemplate {
        self.functions
            .iter()
            .find(|t| t.kind == kind)
            .cloned()
            .unwrap_or_else(|| FunctionTemplate::with_defaults(kind))
    }
}

const SECTIONS: [&str; 3] = ["nodes", "edges", "corrections"];

fn home_section(key: &str) -> Option<&'static str> {
    Some(match key {
        "distributions" | "coef_range" | "existence" | "terms" => "nodes",
        "functions" | "sparsity" | "correction" | "groups" | "mask" => "edges",
        "policy" | "lower" | "upper" | "target_mean" => "corrections",
        _ => return None,
    })
}

/// Parses a guideline; keys not mentioned keep their defaults.
pub fn parse_guideline(text: &str) -> Result<Guideline, GuidelineError> {
    let mut g = Guideline::default();
    let mut section: Option<&str> = None;
    let mut seen: Vec<String> = Vec::new();
    let mut mask_line = 0usize;

    for (i, raw_line) in text.lines().enumerate() {
        let line = i + 1;
        let err = |kind| GuidelineError { line, kind };
        let content = raw_line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once(':') else {
            return Err(err(GuidelineErrorKind::Syntax(format!("expected `key: value`, found `{content}`"))));
        };
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            match SECTIONS.iter().find(|s| **s == key) {
                Some(s) => {
                    section = Some(s);
                    continue;
                }
                None => {
                    return Err(err(if home_section(key).is_some() {
                        GuidelineErrorKind::Syntax(format!("missing value for `{key}`"))
                    } else {
                        GuidelineErrorKind::UnknownKey(key.into())
                    }))
                }
            }
        }
        let home = home_section(key).ok_or_else(|| err(GuidelineErrorKind::UnknownKey(key.into())))?;
        if let Some(s) = section {
            if s != home {
                return Err(err(GuidelineErrorKind::WrongSection {
                    key: key.into(),
                    home: home.into(),
                }));
            }
        }
        if seen.iter().any(|k| k == key) {
            return Err(err(GuidelineErrorKind::DuplicateKey(key.into())));
        }
        seen.push(key.to_string());
        apply_key(&mut g, key, value).map_err(err)?;
        if key == "mask" {
            mask_line = line;
        }
    }

    if let Some(mask) = &g.mask {
        let n = g.groups.len();
        if mask.len() != n || mask.iter().any(|r| r.len() != n) {
            return Err(GuidelineError {
                line: mask_line,
                kind: GuidelineErrorKind::InvalidRange(format!("mask must be {n}x{n} to match the declared groups")),
            });
        }
    }
    Ok(g)
}

fn apply_key(g: &mut Guideline, key: &str, value: &str) -> Result<(), GuidelineErrorKind> {
    let mut v = Values::new(value);
    let syntax = GuidelineErrorKind::Syntax;
    match key {
        "distributions" => {
            let names = v.list(|v| v.word()).map_err(syntax)?;
            if names.is_empty() {
                return Err(GuidelineErrorKind::EmptyChoiceList(key.into()));
            }
            g.distributions = names
                .into_iter()
                .map(|n| n.parse().map_err(|_| GuidelineErrorKind::UnknownDistribution(n)))
                .collect::<Result<_, _>>()?;
        }
        "coef_range" => g.coef_range = v.union().map_err(GuidelineErrorKind::InvalidRange)?,
        "existence" => g.existence = probability(v.number().map_err(syntax)?)?,
        "terms" => {
            g.terms = match v.word().map_err(syntax)?.as_str() {
                "linear" => Terms::Linear,
                "quadratic" => Terms::Quadratic,
                other => return Err(syntax(format!("expected `linear` or `quadratic`, found `{other}`"))),
            }
        }
        "functions" => {
            let templates = v.list(function_template).map_err(syntax)?;
            if templates.is_empty() {
                return Err(GuidelineErrorKind::EmptyChoiceList(key.into()));
            }
            g.functions = templates.into_iter().collect::<Result<_, _>>()?;
        }
        "sparsity" => {
            let u = v.union().map_err(GuidelineErrorKind::InvalidRange)?;
            if u.intervals().len() != 1 {
                return Err(GuidelineErrorKind::InvalidRange("sparsity takes a single value or interval".into()));
            }
            let (a, b) = u.intervals()[0];
            probability(a)?;
            probability(b)?;
            g.sparsity = (a, b);
        }
        "correction" => g.edge_correction = on_off(&v.word().map_err(syntax)?)?,
        "groups" => {
            let mut groups = Vec::new();
            loop {
                let name = v.word().map_err(syntax)?;
                v.expect('=').map_err(syntax)?;
                let members = v.list(|v| v.word()).map_err(syntax)?;
                if members.is_empty() {
                    return Err(GuidelineErrorKind::EmptyChoiceList(format!("group {name}")));
                }
                groups.push((name, members));
                if !v.eat(';') {
                    break;
                }
            }
            g.groups = groups;
        }
        "mask" => {
            let rows = v.list(|v| v.list(|v| v.number())).map_err(syntax)?;
            let mut mask = Vec::with_capacity(rows.len());
            for row in rows {
                let mut r = Vec::with_capacity(row.len());
                for x in row {
                    r.push(match x {
                        x if x == 0.0 => false,
                        x if x == 1.0 => true,
                        x => return Err(GuidelineErrorKind::InvalidRange(format!("mask entries are 0 or 1, found {x}"))),
                    });
                }
                mask.push(r);
            }
            g.mask = Some(mask);
        }
        "policy" => {
            g.policy = match v.word().map_err(syntax)?.as_str() {
                "bounded" => CorrectionPolicy::Bounded,
                "always" => CorrectionPolicy::Always,
                "never" => CorrectionPolicy::Never,
                other => return Err(syntax(format!("expected `bounded`, `always` or `never`, found `{other}`"))),
            }
        }
        "lower" => g.lower = v.number().map_err(syntax)?,
        "upper" => g.upper = v.number().map_err(syntax)?,
        "target_mean" => {
            g.target_mean = if v.peek_word("none") {
                v.word().map_err(syntax)?;
                None
            } else {
                Some(v.union().map_err(GuidelineErrorKind::InvalidRange)?)
            }
        }
        _ => return Err(GuidelineErrorKind::UnknownKey(key.into())),
    }
    v.end().map_err(syntax)?;
    if !(g.lower < g.upper) {
        return Err(GuidelineErrorKind::InvalidRange(format!("lower {} must be below upper {}", g.lower, g.upper)));
    }
    Ok(())
}

fn probability(p: f64) -> Result<f64, GuidelineErrorKind> {
    if (0.0..=1.0).contains(&p) {
        Ok(p)
    } else {
        Err(GuidelineErrorKind::InvalidRange(format!("probability {p} is outside [0, 1]")))
    }
}

fn on_off(w: &str) -> Result<bool, GuidelineErrorKind> {
    match w {
        "on" => Ok(true),
        "off" => Ok(false),
        _ => Err(GuidelineErrorKind::Syntax(format!("expected `on` or `off`, found `{w}`"))),
    }
}

fn function_template(v: &mut Values) -> Result<Result<FunctionTemplate, GuidelineErrorKind>, String> {
    let name = v.word()?;
    let Ok(kind) = name.parse::<EdgeFunctionKind>() else {
        return Ok(Err(GuidelineErrorKind::UnknownEdgeFunction(name)));
    };
    let mut t = FunctionTemplate::with_defaults(kind);
    if v.eat('(')
        && !v.eat(')') {
            loop {
                let p = v.word()?;
                let Some(k) = kind.param_index(&p) else {
                    return Err(format!("`{name}` has no parameter `{p}`"));
                };
                v.expect('=')?;
                t.ranges[k] = v.union()?;
                if v.eat(')') {
                    break;
                }
                v.expect(',')?;
            }
        }
    if kind == EdgeFunctionKind::Power && t.ranges[0].min() <= 0.0 {
        return Ok(Err(GuidelineErrorKind::InvalidRange("power needs phi > 0".into())));
    }
    Ok(Ok(t))
}

/// Character cursor over one value.
struct Values<'a> {
    s: &'a str,
    i: usize,
}

impl<'a> Values<'a> {
    fn new(s: &'a str) -> Self {
        Values { s, i: 0 }
    }

    fn rest(&self) -> &'a str {
        &self.s[self.i..]
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.i += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.i += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), String> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(format!("expected `{c}` at `{}`", self.rest()))
        }
    }

    fn end(&mut self) -> Result<(), String> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(format!("unexpected trailing `{}`", self.rest())),
        }
    }

    fn peek_word(&mut self, w: &str) -> bool {
        self.skip_ws();
        let rest = self.rest();
        rest.starts_with(w) && !rest[w.len()..].starts_with(|c: char| c.is_alphanumeric() || c == '_')
    }

    fn word(&mut self) -> Result<String, String> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .find(|c: char| !(c.is_alphanumeric() || c == '_' || c == '.'))
            .unwrap_or(rest.len());
        if len == 0 || !rest.starts_with(|c: char| c.is_alphabetic() || c == '_') {
            return Err(format!("expected a name at `{rest}`"));
        }
        self.i += len;
        Ok(rest[..len].to_string())
    }

    fn number(&mut self) -> Result<f64, String> {
        self.skip_ws();
        let rest = self.rest();
        let len = rest
            .char_indices()
            .take_while(|&(k, c)| {
                c.is_ascii_digit()
                    || c == '.'
                    || ((c == '-' || c == '+') && (k == 0 || matches!(rest.as_bytes()[k - 1], b'e' | b'E')))
                    || ((c == 'e' || c == 'E') && k > 0)
            })
            .count();
        let text = &rest[..len];
        let x: f64 = text.parse().map_err(|_| format!("expected a number at `{rest}`"))?;
        if !x.is_finite() {
            return Err(format!("number `{text}` is not finite"));
        }
        self.i += len;
        Ok(x)
    }

    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T, String>) -> Result<Vec<T>, String> {
        self.expect('[')?;
        let mut out = Vec::new();
        if self.eat(']') {
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            if self.eat(']') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    /// `[a,b] U [c,d] U e`; `∪` works as well as `U`.
    fn union(&mut self) -> Result<IntervalUnion, String> {
        let mut parts = Vec::new();
        loop {
            if self.eat('[') {
                let a = self.number()?;
                self.expect(',')?;
                let b = self.number()?;
                self.expect(']')?;
                parts.push((a, b));
            } else {
                let x = self.number()?;
                parts.push((x, x));
            }
            if !(self.eat('U') || self.eat('∪')) {
                break;
            }
        }
        IntervalUnion::new(parts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn two_interval_union() {
        let g = parse_guideline("coef_range: [-5,-1] U [1,5]").unwrap();
        assert_eq!(g.coef_range.intervals(), &[(-5.0, -1.0), (1.0, 5.0)]);
        assert_eq!("[-2,-0.5] ∪ [0.5,2]".parse::<IntervalUnion>().unwrap().intervals(), &[(-2.0, -0.5), (0.5, 2.0)]);
    }

    #[test]
    fn point_sparsity() {
        assert_eq!(parse_guideline("sparsity: 0.5").unwrap().sparsity, (0.5, 0.5));
        assert_eq!(parse_guideline("edges:\n  sparsity: [0.2, 0.4]").unwrap().sparsity, (0.2, 0.4));
        assert!(matches!(
            parse_guideline("sparsity: 1.5").unwrap_err().kind,
            GuidelineErrorKind::InvalidRange(_)
        ));
    }

    #[test]
    fn empty_choice_lists() {
        let e = parse_guideline("nodes:\n  distributions: []\n").unwrap_err();
        assert_eq!(e, GuidelineError { line: 2, kind: GuidelineErrorKind::EmptyChoiceList("distributions".into()) });
        assert!(matches!(
            parse_guideline("functions: []").unwrap_err().kind,
            GuidelineErrorKind::EmptyChoiceList(_)
        ));
    }

    #[test]
    fn full_document() {
        let text = "# search space\n\
                    nodes:\n  distributions: [normal, bernoulli, poisson]\n  existence: 0.8\n  terms: quadratic\n\
                    edges:\n  functions: [identity, sigmoid(alpha=[1,3], gamma=2), power]\n  correction: on\n\
                    \x20 groups: Z=[A, B]; R=[RA]\n  mask: [[0,1],[0,0]]\n\
                    corrections:\n  policy: always\n  upper: 5\n  target_mean: [0.2, 0.3]\n";
        let g = parse_guideline(text).unwrap();
        assert_eq!(g.distributions, vec![Distribution::Normal, Distribution::Bernoulli, Distribution::Poisson]);
        assert_eq!(g.existence, 0.8);
        assert_eq!(g.terms, Terms::Quadratic);
        assert!(g.edge_correction);
        let sig = g.template(EdgeFunctionKind::Sigmoid);
        assert_eq!(sig.ranges, vec![IntervalUnion(vec![(1.0, 3.0)]), IntervalUnion(vec![(-1.0, 1.0)]), IntervalUnion::point(2.0)]);
        assert_eq!(g.template(EdgeFunctionKind::Power).ranges, vec![IntervalUnion(vec![(0.75, 1.25)])]);
        assert!(g.allows("A", "RA") && !g.allows("RA", "A") && !g.allows("A", "B"));
        assert!(g.allows("X", "A"));
        assert_eq!(g.policy, CorrectionPolicy::Always);
        assert_eq!(g.upper, 5.0);
    }

    #[test]
    fn misplaced_and_unknown_keys() {
        assert!(matches!(
            parse_guideline("edges:\n  coef_range: [0,1]").unwrap_err().kind,
            GuidelineErrorKind::WrongSection { .. }
        ));
        assert!(matches!(parse_guideline("colour: red").unwrap_err().kind, GuidelineErrorKind::UnknownKey(_)));
        assert!(matches!(
            parse_guideline("existence: 0.5\nexistence: 0.2").unwrap_err().kind,
            GuidelineErrorKind::DuplicateKey(_)
        ));
        assert!(matches!(
            parse_guideline("coef_range: [2, 1]").unwrap_err().kind,
            GuidelineErrorKind::InvalidRange(_)
        ));
        assert!(matches!(
            parse_guideline("groups: A=[x]\nmask: [[1,0]]").unwrap_err().kind,
            GuidelineErrorKind::InvalidRange(_)
        ));
        assert!(matches!(
            parse_guideline("distributions: [gamma]").unwrap_err().kind,
            GuidelineErrorKind::UnknownDistribution(_)
        ));
        assert_eq!(parse_guideline("").unwrap(), Guideline::default());
    }

    proptest! {
        #[test]
        fn samples_stay_in_union(seed in any::<u64>(), a in -10f64..0.0, w1 in 0f64..3.0, gap in 0f64..3.0, w2 in 0f64..3.0) {
            let u = IntervalUnion::new(vec![(a, a + w1), (a + w1 + gap, a + w1 + gap + w2)]).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..200 {
                prop_assert!(u.contains(u.sample(&mut rng)));
            }
        }

        #[test]
        fn guideline_parser_is_total(text in "\\PC{0,120}") {
            let _ = parse_guideline(&text);
        }
    }

    #[test]
    fn symmetric_union_has_no_mass_near_zero() {
        let u: IntervalUnion = "[-5,-1] U [1,5]".parse().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws: Vec<f64> = (0..20_000).map(|_| u.sample(&mut rng)).collect();
        assert!(draws.iter().all(|w| w.abs() >= 1.0 && w.abs() <= 5.0));
        let neg = draws.iter().filter(|w| **w < 0.0).count() as f64 / draws.len() as f64;
        assert!((neg - 0.5).abs() < 0.02);
    }
}
