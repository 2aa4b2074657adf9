//! Linear non-Gaussian acyclic benchmark graphs.
//!
//! Nodes `X1..Xp` get a uniformly drawn causal order and a full strictly lower
//! triangular weight matrix in that order. Each node is
//! `log_exponential(mu = Σ B_ij·g(X_j), rate = 1)`, so its noise is the log of a
//! unit exponential.

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::edge::EdgeFunction;
use crate::graph::{zeta_len, EdgeSpec, Graph, GraphError, NodeSpec, Parametric};
use crate::guideline::IntervalUnion;
use crate::dist::Distribution;
use crate::seed::purpose_rng;

/// Range of the per-graph power exponent when none is fixed.
pub const PHI_RANGE: (f64, f64) = (0.75, 1.25);

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LingamError {
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Phi {
    /// Plain linear edges.
    Linear,
    Fixed(f64),
    /// One exponent per graph, uniform in [`PHI_RANGE`].
    Random,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LingamConfig {
    pub p: usize,
    pub weights: IntervalUnion,
    pub phi: Phi,
    pub edge_correction: bool,
    /// Causal order as node indices; drawn when `None`.
    pub order: Option<Vec<usize>>,
}

impl LingamConfig {
    pub fn new(p: usize, weights: IntervalUnion) -> Self {
        LingamConfig {
            p,
            weights,
            phi: Phi::Linear,
            edge_correction: false,
            order: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LingamModel {
    pub graph: Graph,
    pub names: Vec<String>,
    /// `b[i][j]` is the weight of `X(j+1) -> X(i+1)`.
    pub b: Vec<Vec<f64>>,
    /// Node indices from first cause to last effect.
    pub order: Vec<usize>,
    pub phi: f64,
}

pub fn node_names(p: usize) -> Vec<String> {
    (1..=p).map(|i| format!("X{i}")).collect()
}

pub fn lingam_preset(p: usize, weights: &IntervalUnion, seed: u64) -> Result<LingamModel, LingamError> {
    lingam_model(&LingamConfig::new(p, weights.clone()), seed)
}

pub fn lingam_model(cfg: &LingamConfig, seed: u64) -> Result<LingamModel, LingamError> {
    let p = cfg.p;
    if p < 2 {
        return Err(LingamError::InvalidRange(format!("need at least 2 nodes, got {p}")));
    }
    let mut rng = purpose_rng(seed, "lingam");
    let order = match &cfg.order {
        Some(o) => {
            let mut sorted = o.clone();
            sorted.sort_unstable();
            if sorted != (0..p).collect::<Vec<_>>() {
                return Err(LingamError::InvalidRange(format!("{o:?} is not a permutation of 0..{p}")));
            }
            o.clone()
        }
        None => {
            let mut o: Vec<usize> = (0..p).collect();
            o.shuffle(&mut rng);
            o
        }
    };
    let phi = match cfg.phi {
        Phi::Linear => 1.0,
        Phi::Fixed(v) if v > 0.0 && v.is_finite() => v,
        Phi::Fixed(v) => return Err(LingamError::InvalidRange(format!("phi must be positive, got {v}"))),
        Phi::Random => rng.gen_range(PHI_RANGE.0..=PHI_RANGE.1),
    };

    let mut b = vec![vec![0.0; p]; p];
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[..pos] {
            b[i][j] = cfg.weights.sample(&mut rng);
        }
    }

    let names = node_names(p);
    let nodes = (0..p)
        .map(|i| {
            let parents: Vec<usize> = (0..p).filter(|&j| order_before(&order, j, i)).collect();
            let mut mu = vec![0.0; zeta_len(parents.len())];
            for (k, &j) in parents.iter().enumerate() {
                mu[1 + k] = b[i][j];
            }
            let mut rate = vec![0.0; mu.len()];
            rate[0] = 1.0;
            NodeSpec::parametric(names[i].clone(), Parametric::new(Distribution::LogExponential, vec![mu, rate]))
        })
        .collect();

    let function = if cfg.phi == Phi::Linear {
        EdgeFunction::identity()
    } else {
        EdgeFunction::power(phi).map_err(LingamError::InvalidRange)?
    };
    let mut edges = Vec::new();
    for i in 0..p {
        for j in 0..p {
            if order_before(&order, j, i) {
                let mut e = EdgeSpec::new(names[j].clone(), names[i].clone(), function.clone());
                if cfg.edge_correction {
                    e = e.corrected();
                }
                edges.push(e);
            }
        }
    }
    let graph = Graph::new(nodes, edges)?;
    Ok(LingamModel {
        graph,
        names,
        b,
        order,
        phi,
    })
}

fn order_before(order: &[usize], j: usize, i: usize) -> bool {
    let pos = |x| order.iter().position(|&o| o == x);
    pos(j) < pos(i)
}

/// `ε̂ = (I − B)·x` for one row in node order.
pub fn residuals(b: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| x[i] - b[i].iter().zip(x).map(|(w, v)| w * v).sum::<f64>())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::icdf_sample;
    use crate::graph::{instantiate, sample};

    fn default_weights() -> IntervalUnion {
        "[-2,-0.5] U [0.5,2]".parse().unwrap()
    }

    #[test]
    fn weights_stay_in_range() {
        for seed in 0..50 {
            let m = lingam_preset(5, &default_weights(), seed).unwrap();
            let mut present = 0;
            for i in 0..5 {
                for j in 0..5 {
                    let w = m.b[i][j];
                    if w != 0.0 {
                        present += 1;
                        assert!((0.5..=2.0).contains(&w.abs()));
                        assert!(m.graph.edge(&m.names[j], &m.names[i]).is_some());
                    }
                }
            }
            assert_eq!(present, 10);
            assert_eq!(m.graph.edges().len(), 10);
        }
    }

    #[test]
    fn order_is_a_permutation_and_b_is_triangular_in_it() {
        let m = lingam_preset(6, &default_weights(), 9).unwrap();
        let mut sorted = m.order.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..6).collect::<Vec<_>>());
        for (a, &i) in m.order.iter().enumerate() {
            for &j in &m.order[a..] {
                assert_eq!(m.b[i][j], 0.0);
            }
        }
    }

    #[test]
    fn degenerate_weight_range() {
        let mut cfg = LingamConfig::new(2, IntervalUnion::point(0.7));
        cfg.order = Some(vec![0, 1]);
        let m = lingam_model(&cfg, 3).unwrap();
        assert_eq!(m.b, vec![vec![0.0, 0.0], vec![0.7, 0.0]]);
    }

    #[test]
    fn residuals_match_engine_noise() {
        let m = lingam_preset(5, &default_weights(), 11).unwrap();
        let g = instantiate(&m.graph, 0, 11).unwrap();
        let batch = sample(&g, 2000, 11).unwrap();
        let cols: Vec<usize> = m.names.iter().map(|n| batch.data.column_index(n).unwrap()).collect();
        let mut worst: f64 = 0.0;
        for (row, err) in batch.data.rows.iter().zip(&batch.errors.rows) {
            let x: Vec<f64> = cols.iter().map(|&c| row[c]).collect();
            let eps = residuals(&m.b, &x);
            for (i, &c) in cols.iter().enumerate() {
                let noise = icdf_sample(Distribution::LogExponential, &[0.0, 1.0], err[c]).unwrap();
                worst = worst.max((eps[i] - noise).abs());
            }
        }
        assert!(worst < 1e-9, "max abs error {worst}");
    }

    #[test]
    fn phi_variants() {
        let mut cfg = LingamConfig::new(4, default_weights());
        cfg.phi = Phi::Random;
        cfg.edge_correction = true;
        let m = lingam_model(&cfg, 5).unwrap();
        assert!((PHI_RANGE.0..=PHI_RANGE.1).contains(&m.phi));
        assert!(m.graph.edges().iter().all(|e| e.function.params == vec![m.phi] && e.correction.enabled));
        cfg.phi = Phi::Fixed(0.0);
        assert!(matches!(lingam_model(&cfg, 5), Err(LingamError::InvalidRange(_))));
        assert!(matches!(lingam_preset(1, &default_weights(), 0), Err(LingamError::InvalidRange(_))));
    }
}
