//! Edge functions and the edge (standardization) correction.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Edge function family, without parameter values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeFunctionKind {
    Identity,
    Sigmoid,
    GaussianRbf,
    Arctan,
    Power,
}

impl EdgeFunctionKind {
    pub const ALL: [EdgeFunctionKind; 5] = [
        EdgeFunctionKind::Identity,
        EdgeFunctionKind::Sigmoid,
        EdgeFunctionKind::GaussianRbf,
        EdgeFunctionKind::Arctan,
        EdgeFunctionKind::Power,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EdgeFunctionKind::Identity => "identity",
            EdgeFunctionKind::Sigmoid => "sigmoid",
            EdgeFunctionKind::GaussianRbf => "gaussian_rbf",
            EdgeFunctionKind::Arctan => "arctan",
            EdgeFunctionKind::Power => "power",
        }
    }

    /// Parameter names: `alpha` is slope/width, `beta` the center, `gamma` the output scale.
    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            EdgeFunctionKind::Identity => &[],
            EdgeFunctionKind::Sigmoid | EdgeFunctionKind::GaussianRbf | EdgeFunctionKind::Arctan => {
                &["alpha", "beta", "gamma"]
            }
            EdgeFunctionKind::Power => &["phi"],
        }
    }

    /// Values used when a fixed edge omits a parameter.
    pub fn default_params(self) -> &'static [f64] {
        match self {
            EdgeFunctionKind::Identity => &[],
            EdgeFunctionKind::Sigmoid | EdgeFunctionKind::GaussianRbf | EdgeFunctionKind::Arctan => {
                &[1.0, 0.0, 1.0]
            }
            EdgeFunctionKind::Power => &[1.0],
        }
    }

    pub fn param_index(self, name: &str) -> Option<usize> {
        self.param_names().iter().position(|p| *p == name)
    }

    pub fn check(self, params: &[f64]) -> Result<(), String> {
        if params.len() != self.param_names().len() {
            return Err(format!(
                "{} expects {} parameters, got {}",
                self,
                self.param_names().len(),
                params.len()
            ));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(format!("{self} parameters must be finite"));
        }
        if self == EdgeFunctionKind::Power && params[0] <= 0.0 {
            return Err(format!("power requires phi > 0, got {}", params[0]));
        }
        Ok(())
    }
}

impl fmt::Display for EdgeFunctionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EdgeFunctionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EdgeFunctionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown edge function `{s}`"))
    }
}

/// An edge function with concrete parameter values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeFunction {
    pub kind: EdgeFunctionKind,
    pub params: Vec<f64>,
}

impl EdgeFunction {
    pub fn identity() -> Self {
        EdgeFunction {
            kind: EdgeFunctionKind::Identity,
            params: Vec::new(),
        }
    }

    pub fn new(kind: EdgeFunctionKind, params: Vec<f64>) -> Result<Self, String> {
        kind.check(&params)?;
        Ok(EdgeFunction { kind, params })
    }

    pub fn power(phi: f64) -> Result<Self, String> {
        Self::new(EdgeFunctionKind::Power, vec![phi])
    }

    pub fn apply(&self, z: f64) -> f64 {
        apply_edge_function(self, z)
    }
}

pub fn apply_edge_function(f: &EdgeFunction, z: f64) -> f64 {
    let p = &f.params;
    match f.kind {
        EdgeFunctionKind::Identity => z,
        EdgeFunctionKind::Sigmoid => p[2] / (1.0 + (-p[0] * (z - p[1])).exp()),
        EdgeFunctionKind::GaussianRbf => {
            let d = z - p[1];
            p[2] * (-p[0] * d * d).exp()
        }
        EdgeFunctionKind::Arctan => p[2] * (p[0] * (z - p[1])).atan(),
        EdgeFunctionKind::Power => {
            if z == 0.0 {
                0.0
            } else {
                z.signum() * z.abs().powf(p[0])
            }
        }
    }
}

/// Standardization of an edge's transformed parent values with burn-in moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeCorrection {
    pub enabled: bool,
    pub mu: f64,
    pub sigma: f64,
}

impl EdgeCorrection {
    pub const DISABLED: EdgeCorrection = EdgeCorrection {
        enabled: false,
        mu: 0.0,
        sigma: 1.0,
    };

    /// Enabled, not yet frozen (identity until calibration).
    pub const PENDING: EdgeCorrection = EdgeCorrection {
        enabled: true,
        mu: 0.0,
        sigma: 1.0,
    };

    pub fn frozen(mu: f64, sigma: f64) -> Self {
        EdgeCorrection {
            enabled: true,
            mu,
            sigma,
        }
    }

    pub fn apply(&self, z: f64) -> f64 {
        if self.enabled {
            apply_edge_correction(z, self)
        } else {
            z
        }
    }
}

impl Default for EdgeCorrection {
    fn default() -> Self {
        EdgeCorrection::DISABLED
    }
}

pub fn apply_edge_correction(z: f64, corr: &EdgeCorrection) -> f64 {
    (z - corr.mu) / corr.sigma
}
