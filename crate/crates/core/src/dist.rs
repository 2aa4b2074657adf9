//! Output distributions, sampled through their inverse CDFs.
//!
//! A node value is produced as `F⁻¹(ε; θ)` where `ε ~ Unif(0, 1)` is the node's
//! error term and `θ` are the distribution parameters computed from its parents.
//! Keeping the error term explicit is what makes counterfactual replays possible.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Upper bound on the number of pmf terms scanned by the Poisson quantile.
pub const POISSON_SCAN_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("invalid parameter {param}={value} for {dist}: {reason}")]
    InvalidParameter {
        dist: Distribution,
        param: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("{dist} expects {expected} parameters, got {actual}")]
    Arity {
        dist: Distribution,
        expected: usize,
        actual: usize,
    },
    #[error("error term {0} is outside (0, 1)")]
    ErrorTerm(f64),
}

/// Family of a node's output distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    Bernoulli,
    Normal,
    Uniform,
    Exponential,
    LogNormal,
    Poisson,
    /// `mu + ln(E)` with `E ~ Exp(rate)`: an additive, skewed, non-Gaussian noise family.
    LogExponential,
    /// Ignores the error term; the single parameter is the value.
    Deterministic,
}

/// Valid range of one distribution parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange {
    pub lower: f64,
    pub upper: f64,
    pub lower_inclusive: bool,
    pub upper_inclusive: bool,
}

impl ParamRange {
    const REAL: ParamRange = ParamRange {
        lower: f64::NEG_INFINITY,
        upper: f64::INFINITY,
        lower_inclusive: false,
        upper_inclusive: false,
    };
    const POSITIVE: ParamRange = ParamRange {
        lower: 0.0,
        upper: f64::INFINITY,
        lower_inclusive: false,
        upper_inclusive: false,
    };
    const NON_NEGATIVE: ParamRange = ParamRange {
        lower: 0.0,
        upper: f64::INFINITY,
        lower_inclusive: true,
        upper_inclusive: false,
    };
    const UNIT: ParamRange = ParamRange {
        lower: 0.0,
        upper: 1.0,
        lower_inclusive: true,
        upper_inclusive: true,
    };

    pub fn contains(&self, v: f64) -> bool {
        if v.is_nan() {
            return false;
        }
        let above = if self.lower_inclusive { v >= self.lower } else { v > self.lower };
        let below = if self.upper_inclusive { v <= self.upper } else { v < self.upper };
        above && below
    }

    /// True when at least one side of the range is finite.
    pub fn is_restricted(&self) -> bool {
        self.lower.is_finite() || self.upper.is_finite()
    }
}

impl Distribution {
    pub const ALL: [Distribution; 8] = [
        Distribution::Bernoulli,
        Distribution::Normal,
        Distribution::Uniform,
        Distribution::Exponential,
        Distribution::LogNormal,
        Distribution::Poisson,
        Distribution::LogExponential,
        Distribution::Deterministic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Distribution::Bernoulli => "bernoulli",
            Distribution::Normal => "normal",
            Distribution::Uniform => "uniform",
            Distribution::Exponential => "exponential",
            Distribution::LogNormal => "lognormal",
            Distribution::Poisson => "poisson",
            Distribution::LogExponential => "log_exponential",
            Distribution::Deterministic => "deterministic",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            Distribution::Bernoulli => &["p"],
            Distribution::Normal | Distribution::LogNormal => &["mu", "sigma"],
            Distribution::Uniform => &["low", "high"],
            Distribution::Exponential => &["rate"],
            Distribution::Poisson => &["lambda"],
            Distribution::LogExponential => &["mu", "rate"],
            Distribution::Deterministic => &["value"],
        }
    }

    pub fn arity(self) -> usize {
        self.param_names().len()
    }

    pub fn param_index(self, name: &str) -> Option<usize> {
        self.param_names().iter().position(|p| *p == name)
    }

    pub fn param_range(self, index: usize) -> ParamRange {
        match (self, index) {
            (Distribution::Bernoulli, 0) => ParamRange::UNIT,
            (Distribution::Normal | Distribution::LogNormal, 1) => ParamRange::NON_NEGATIVE,
            (Distribution::Exponential, 0) => ParamRange::POSITIVE,
            (Distribution::Poisson, 0) => ParamRange::POSITIVE,
            (Distribution::LogExponential, 1) => ParamRange::POSITIVE,
            _ => ParamRange::REAL,
        }
    }

    /// The parameter a bare `correction(L, U)` attaches to.
    pub fn default_corrected_param(self) -> Option<usize> {
        match self {
            Distribution::Bernoulli => Some(0),
            Distribution::Normal | Distribution::LogNormal => Some(1),
            Distribution::Exponential | Distribution::Poisson => Some(0),
            Distribution::LogExponential => Some(1),
            Distribution::Uniform | Distribution::Deterministic => None,
        }
    }

    pub fn is_discrete(self) -> bool {
        matches!(self, Distribution::Bernoulli | Distribution::Poisson)
    }

    /// Checks that `theta` has the right arity and lies in the valid parameter space.
    pub fn check(self, theta: &[f64]) -> Result<(), DistError> {
        if theta.len() != self.arity() {
            return Err(DistError::Arity {
                dist: self,
                expected: self.arity(),
                actual: theta.len(),
            });
        }
        for (i, &v) in theta.iter().enumerate() {
            if !self.param_range(i).contains(v) {
                return Err(DistError::InvalidParameter {
                    dist: self,
                    param: self.param_names()[i],
                    value: v,
                    reason: "outside the valid range",
                });
            }
        }
        if self == Distribution::Uniform && theta[0] >= theta[1] {
            return Err(DistError::InvalidParameter {
                dist: self,
                param: "high",
                value: theta[1],
                reason: "must exceed low",
            });
        }
        Ok(())
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Distribution {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Distribution::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| format!("unknown distribution `{s}`"))
    }
}

/// Draws `F⁻¹(epsilon; theta)` for the given distribution.
///
/// The result is monotone non-decreasing in `epsilon` for fixed `theta`.
pub fn icdf_sample(dist: Distribution, theta: &[f64], epsilon: f64) -> Result<f64, DistError> {
    dist.check(theta)?;
    if dist != Distribution::Deterministic && !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(DistError::ErrorTerm(epsilon));
    }
    Ok(match dist {
        Distribution::Bernoulli => {
            // generalized inverse of the right-continuous CDF: 0 iff u <= 1 - p
            if epsilon <= 1.0 - theta[0] {
                0.0
            } else {
                1.0
            }
        }
        Distribution::Normal => theta[0] + theta[1] * normal_quantile(epsilon),
        Distribution::Uniform => theta[0] + epsilon * (theta[1] - theta[0]),
        Distribution::Exponential => -(-epsilon).ln_1p() / theta[0],
        Distribution::LogNormal => (theta[0] + theta[1] * normal_quantile(epsilon)).exp(),
        Distribution::Poisson => poisson_quantile(theta[0], epsilon),
        Distribution::LogExponential => theta[0] + (-(-epsilon).ln_1p() / theta[1]).ln(),
        Distribution::Deterministic => theta[0],
    })
}

/// Cumulative pmf scan in log space, so large rates do not underflow the first term.
fn poisson_quantile(lambda: f64, u: f64) -> f64 {
    let ln_lambda = lambda.ln();
    let mut ln_pmf = -lambda;
    let mut cdf = 0.0;
    let mut k: u64 = 0;
    loop {
        let pmf = ln_pmf.exp();
        cdf += pmf;
        if cdf >= u {
            return k as f64;
        }
        // past the mode with vanishing terms: the remaining mass is below rounding
        if k as f64 > lambda && pmf == 0.0 {
            return k as f64;
        }
        if k + 1 >= POISSON_SCAN_CAP {
            return k as f64;
        }
        k += 1;
        ln_pmf += ln_lambda - (k as f64).ln();
    }
}

/// Standard normal quantile, Wichura's AS241 (PPND16), relative accuracy ~1e-16.
pub fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 8] = [
        3.387_132_872_796_366_5,
        1.331_416_678_917_843_8e2,
        1.971_590_950_306_551_3e3,
        1.373_169_376_550_946e4,
        4.592_195_393_154_987e4,
        6.726_577_092_700_87e4,
        3.343_057_558_358_813e4,
        2.509_080_928_730_122_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091e1,
        6.872_871_378_090_01e2,
        5.394_196_021_424_751e3,
        2.121_379_430_158_659_7e4,
        3.930_789_580_009_271e4,
        2.872_908_573_572_194_3e4,
        5.226_495_278_852_545e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_5,
        4.630_337_846_156_546,
        5.769_497_221_460_691,
        3.647_848_324_763_204_5,
        1.270_458_252_452_368_4,
        2.417_807_251_774_506e-1,
        2.272_384_498_926_918_4e-2,
        7.745_450_142_783_414e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_759,
        1.676_384_830_183_803_8,
        6.897_673_349_851e-1,
        1.481_039_764_274_800_8e-1,
        1.519_866_656_361_645_7e-2,
        5.475_938_084_995_345e-4,
        1.050_750_071_644_416_9e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103,
        5.463_784_911_164_114,
        1.784_826_539_917_291_3,
        2.965_605_718_285_048_7e-1,
        2.653_218_952_657_612_4e-2,
        1.242_660_947_388_078_4e-3,
        2.711_555_568_743_487_6e-5,
        2.010_334_399_292_288_1e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_88e-1,
        1.369_298_809_227_358e-1,
        1.487_536_129_085_061_5e-2,
        7.868_691_311_456_133e-4,
        1.846_318_317_510_054_8e-5,
        1.421_511_758_316_446e-7,
        2.044_263_103_389_939_7e-15,
    ];

    fn poly(c: &[f64; 8], x: f64) -> f64 {
        c.iter().rev().fold(0.0, |acc, &k| acc * x + k)
    }

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return q * poly(&A, r) / poly(&B, r);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let val = if r <= 5.0 {
        let r = r - 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        let r = r - 5.0;
        poly(&E, r) / poly(&F, r)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_is_identity_on_unit_interval() {
        assert_eq!(icdf_sample(Distribution::Uniform, &[0.0, 1.0], 0.3).unwrap(), 0.3);
    }

    #[test]
    fn normal_median_is_mu() {
        let v = icdf_sample(Distribution::Normal, &[1.5, 2.06], 0.5).unwrap();
        assert_eq!(v, 1.5);
    }

    #[test]
    fn bernoulli_convention() {
        assert_eq!(icdf_sample(Distribution::Bernoulli, &[0.7], 0.2).unwrap(), 0.0);
        assert_eq!(icdf_sample(Distribution::Bernoulli, &[0.7], 0.3).unwrap(), 0.0);
        assert_eq!(icdf_sample(Distribution::Bernoulli, &[0.7], 0.31).unwrap(), 1.0);
    }

    /// Independent route: add pmf terms computed from factorials directly.
    fn poisson_oracle(lambda: f64, u: f64) -> u64 {
        let mut cdf = 0.0;
        let mut fact = 1.0;
        for k in 0..170u64 {
            if k > 0 {
                fact *= k as f64;
            }
            cdf += (-lambda).exp() * lambda.powi(k as i32) / fact;
            if cdf >= u {
                return k;
            }
        }
        unreachable!()
    }

    #[test]
    fn poisson_matches_pmf_scan() {
        assert_eq!(poisson_oracle(2.0, 0.95), 5);
        assert_eq!(icdf_sample(Distribution::Poisson, &[2.0], 0.95).unwrap(), 5.0);
        for &lambda in &[0.3, 1.0, 4.5, 20.0] {
            for i in 1..100 {
                let u = i as f64 / 100.0;
                let got = icdf_sample(Distribution::Poisson, &[lambda], u).unwrap();
                assert_eq!(got as u64, poisson_oracle(lambda, u), "lambda={lambda} u={u}");
            }
        }
    }

    #[test]
    fn poisson_large_rate_does_not_underflow() {
        let v = icdf_sample(Distribution::Poisson, &[2000.0], 0.5).unwrap();
        assert!((v - 2000.0).abs() < 3.0, "{v}");
    }

    #[test]
    fn deterministic_ignores_error() {
        assert_eq!(icdf_sample(Distribution::Deterministic, &[4.2], 0.9).unwrap(), 4.2);
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(icdf_sample(Distribution::Bernoulli, &[1.2], 0.5).is_err());
        assert!(icdf_sample(Distribution::Normal, &[0.0, -1.0], 0.5).is_err());
        assert!(icdf_sample(Distribution::Uniform, &[1.0, 1.0], 0.5).is_err());
        assert!(icdf_sample(Distribution::Exponential, &[0.0], 0.5).is_err());
        assert!(icdf_sample(Distribution::Poisson, &[f64::NAN], 0.5).is_err());
        assert!(icdf_sample(Distribution::Normal, &[0.0], 0.5).is_err());
        assert!(icdf_sample(Distribution::Normal, &[0.0, 1.0], 1.0).is_err());
    }

    #[test]
    fn normal_quantile_known_values() {
        assert!((normal_quantile(0.975) - 1.959_963_984_540_054).abs() < 1e-14);
        assert!((normal_quantile(0.025) + 1.959_963_984_540_054).abs() < 1e-14);
        assert!((normal_quantile(1e-10) + 6.361_340_902_404_056).abs() < 1e-12);
    }

    #[test]
    fn names_round_trip() {
        for d in Distribution::ALL {
            assert_eq!(d.name().parse::<Distribution>().unwrap(), d);
        }
    }
}
