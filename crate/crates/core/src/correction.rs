//! Node correction (sigmoid squashing with a calibrated offset) and burn-in moments.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Search bracket for the target-mean offset; beyond it the sigmoid saturates in f64.
pub const OFFSET_BRACKET: (f64, f64) = (-700.0, 700.0);
/// Offset tolerance of the bracketed root.
pub const OFFSET_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CorrectionError {
    #[error("degenerate sample: all {n} values equal {value}")]
    DegenerateSample { n: usize, value: f64 },
    #[error("need at least two samples, got {0}")]
    TooFewSamples(usize),
    #[error("target mean {target} cannot be reached with offsets in [{}, {}]", OFFSET_BRACKET.0, OFFSET_BRACKET.1)]
    NonBracketable { target: f64 },
    #[error("invalid correction bounds: need L < target < U, got L={lower}, U={upper}, target={target:?}")]
    InvalidBounds {
        lower: f64,
        upper: f64,
        target: Option<f64>,
    },
}

/// Sigmoid correction of one distribution parameter into `(lower, upper)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NodeCorrection {
    pub lower: f64,
    pub upper: f64,
    pub target_mean: Option<f64>,
    /// Frozen at calibration; zero until then.
    pub offset: f64,
}

impl NodeCorrection {
    pub fn new(lower: f64, upper: f64, target_mean: Option<f64>) -> Result<Self, CorrectionError> {
        let bad = || CorrectionError::InvalidBounds {
            lower,
            upper,
            target: target_mean,
        };
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(bad());
        }
        if let Some(t) = target_mean {
            if !(t > lower && t < upper) {
                return Err(bad());
            }
        }
        Ok(NodeCorrection {
            lower,
            upper,
            target_mean,
            offset: 0.0,
        })
    }

    pub fn apply(&self, theta_raw: f64) -> f64 {
        node_correction(theta_raw, self)
    }
}

/// `(U − L) / (1 + exp(−θ + O)) + L`, kept strictly inside `(L, U)`.
pub fn node_correction(theta_raw: f64, corr: &NodeCorrection) -> f64 {
    squash(theta_raw - corr.offset, corr.lower, corr.upper)
}

fn squash(x: f64, lower: f64, upper: f64) -> f64 {
    let v = (upper - lower) / (1.0 + (-x).exp()) + lower;
    if v.is_nan() {
        // only reachable for NaN input
        return v;
    }
    v.clamp(lower.next_up(), upper.next_down())
}

/// Finds the offset `O` whose corrected mean over `raw_samples` equals `target_mean`.
///
/// The corrected mean is strictly decreasing in `O`, so bisection over
/// [`OFFSET_BRACKET`] converges to the unique root.
pub fn calibrate_offset(
    raw_samples: &[f64],
    target_mean: f64,
    lower: f64,
    upper: f64,
) -> Result<f64, CorrectionError> {
    if !(lower < upper && target_mean > lower && target_mean < upper) {
        return Err(CorrectionError::InvalidBounds {
            lower,
            upper,
            target: Some(target_mean),
        });
    }
    if raw_samples.is_empty() {
        return Err(CorrectionError::TooFewSamples(0));
    }
    let mean_at = |offset: f64| {
        let sum = neumaier_sum(raw_samples.iter().map(|&t| squash(t - offset, lower, upper)));
        sum / raw_samples.len() as f64
    };
    let (mut lo, mut hi) = OFFSET_BRACKET;
    if mean_at(lo) < target_mean || mean_at(hi) > target_mean {
        return Err(CorrectionError::NonBracketable {
            target: target_mean,
        });
    }
    // run to machine precision; this is far below OFFSET_TOLERANCE
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mean_at(mid) > target_mean {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let root = 0.5 * (lo + hi);
    debug_assert!(hi - lo <= OFFSET_TOLERANCE);
    Ok(root)
}

/// Sample mean and population (1/n) standard deviation.
pub fn estimate_moments(samples: &[f64]) -> Result<(f64, f64), CorrectionError> {
    let n = samples.len();
    if n < 2 {
        return Err(CorrectionError::TooFewSamples(n));
    }
    let first = samples[0];
    if samples.iter().all(|&x| x == first) {
        return Err(CorrectionError::DegenerateSample { n, value: first });
    }
    let nf = n as f64;
    let mean0 = neumaier_sum(samples.iter().copied()) / nf;
    // second pass removes the residual of the first
    let mean = mean0 + neumaier_sum(samples.iter().map(|&x| x - mean0)) / nf;
    let var = neumaier_sum(samples.iter().map(|&x| (x - mean) * (x - mean))) / nf;
    let sigma = var.sqrt();
    if sigma == 0.0 || !sigma.is_finite() {
        return Err(CorrectionError::DegenerateSample { n, value: first });
    }
    Ok((mean, sigma))
}

pub(crate) fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit() -> NodeCorrection {
        NodeCorrection::new(0.0, 1.0, None).unwrap()
    }

    #[test]
    fn midpoint_and_asymptote() {
        assert_eq!(node_correction(0.0, &unit()), 0.5);
        let top = node_correction(1e6, &unit());
        assert!(top < 1.0 && top > 0.999_999);
        let bottom = node_correction(-1e6, &unit());
        assert!(bottom > 0.0);
        assert!(node_correction(f64::INFINITY, &unit()) < 1.0);
    }

    /// Bisection on the closed-form sigmoid, independent of the implementation's bracket.
    fn constant_sample_oracle(raw: f64, target: f64) -> f64 {
        let (mut lo, mut hi) = (-100.0f64, 100.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let m = 1.0 / (1.0 + (-(raw - mid)).exp());
            if m > target {
                lo = mid
            } else {
                hi = mid
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn offset_for_constant_samples() {
        let oracle = constant_sample_oracle(20.0, 0.9);
        assert!((oracle - (20.0 - 9f64.ln())).abs() < 1e-9);
        let o = calibrate_offset(&[20.0; 50], 0.9, 0.0, 1.0).unwrap();
        assert!((o - 17.802_775_423_8).abs() < 1e-6, "{o}");
        assert!((o - oracle).abs() < 1e-9);
    }

    #[test]
    fn offset_for_symmetric_samples() {
        let raw: Vec<f64> = (-50..=50).map(|i| i as f64 * 0.1).collect();
        let o = calibrate_offset(&raw, 0.5, 0.0, 1.0).unwrap();
        assert!(o.abs() < 1e-9, "{o}");
    }

    #[test]
    fn unreachable_target_is_reported() {
        // L..U at 0..1 but every input saturates at the same value regardless of offset
        let err = calibrate_offset(&[f64::INFINITY; 4], 0.5, 0.0, 1.0).unwrap_err();
        assert!(matches!(err, CorrectionError::NonBracketable { .. }));
        assert!(calibrate_offset(&[1.0], 1.5, 0.0, 1.0).is_err());
        assert!(calibrate_offset(&[], 0.5, 0.0, 1.0).is_err());
    }

    #[test]
    fn moments_examples() {
        assert_eq!(estimate_moments(&[1.0, 1.0, 1.0, 3.0, 3.0, 3.0]).unwrap(), (2.0, 1.0));
        assert!(matches!(
            estimate_moments(&[4.0; 7]),
            Err(CorrectionError::DegenerateSample { n: 7, .. })
        ));
        assert!(estimate_moments(&[1.0]).is_err());
    }

    #[test]
    fn invalid_bounds() {
        assert!(NodeCorrection::new(1.0, 1.0, None).is_err());
        assert!(NodeCorrection::new(0.0, 1.0, Some(1.0)).is_err());
        assert!(NodeCorrection::new(0.0, 1.0, Some(0.2)).is_ok());
    }

    proptest! {
        #[test]
        fn output_strictly_inside_bounds(theta in -1e6f64..1e6, lower in -1e3f64..1e3, width in 1e-3f64..1e3, offset in -50f64..50.0) {
            let mut c = NodeCorrection::new(lower, lower + width, None).unwrap();
            c.offset = offset;
            let v = node_correction(theta, &c);
            prop_assert!(v > c.lower && v < c.upper);
        }

        #[test]
        fn strictly_increasing_where_resolvable(a in -30f64..30.0, d in 1e-3f64..5.0) {
            let c = unit();
            prop_assert!(node_correction(a + d, &c) > node_correction(a, &c));
        }

        #[test]
        fn calibration_reproduces_target(raw in proptest::collection::vec(-10f64..10.0, 2..200), target in 0.05f64..0.95) {
            let o = calibrate_offset(&raw, target, 0.0, 1.0).unwrap();
            let mut c = NodeCorrection::new(0.0, 1.0, Some(target)).unwrap();
            c.offset = o;
            let mean = raw.iter().map(|&t| c.apply(t)).sum::<f64>() / raw.len() as f64;
            prop_assert!((mean - target).abs() < 1e-6);
        }

        #[test]
        fn standardized_batch_has_unit_moments(xs in proptest::collection::vec(-1e3f64..1e3, 2..500)) {
            prop_assume!(xs.iter().any(|&x| x != xs[0]));
            let (mu, sigma) = estimate_moments(&xs).unwrap();
            prop_assume!(sigma > 1e-6);
            let z: Vec<f64> = xs.iter().map(|&x| (x - mu) / sigma).collect();
            let (m2, s2) = estimate_moments(&z).unwrap();
            prop_assert!(m2.abs() < 1e-10);
            prop_assert!((s2 - 1.0).abs() < 1e-10);
        }
    }
}
