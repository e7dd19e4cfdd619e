//! Reliability and responsiveness quotients.
//!
//! Both metrics are piecewise similarity functions of required vs. actual
//! performance: values at or above 1 mean the requirement is met, any
//! shortfall collapses to exactly 0, and a perfect (zero-variance) capability
//! scores a symbolic infinity. Infinity is carried as an enum variant rather
//! than an IEEE special value so that downstream sums stay exact.

use std::fmt;

use thiserror::Error;

/// A metric outcome: a finite non-negative score or symbolic infinity.
///
/// Infinity arises only from the zero-actual-variance branch of the
/// reliability quotient (and from aggregates of such capabilities).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricValue {
    Finite(f64),
    Infinite,
}

impl MetricValue {
    /// The requirement-met test: finite scores pass at >= 1, infinity always
    /// passes.
    pub fn is_passing(&self) -> bool {
        match self {
            MetricValue::Finite(v) => *v >= 1.0,
            MetricValue::Infinite => true,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, MetricValue::Infinite)
    }

    pub fn as_finite(&self) -> Option<f64> {
        match self {
            MetricValue::Finite(v) => Some(*v),
            MetricValue::Infinite => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, MetricValue::Finite(v) if *v == 0.0)
    }
}

impl fmt::Display for MetricValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricValue::Finite(v) => write!(f, "{v}"),
            MetricValue::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("variance must be non-negative and finite, got {value}")]
    InvalidVariance { value: f64 },
    #[error("probability must lie in [0, 1], got {value}")]
    ProbabilityOutOfRange { value: f64 },
    #[error("reference time must be non-negative and finite, got {value}")]
    InvalidReferenceTime { value: f64 },
    #[error("actual response time must be positive and finite, got {value}")]
    InvalidActualTime { value: f64 },
    #[error("indeterminate capability term: one metric is 0 while the other is infinite")]
    IndeterminateTerm,
}

/// Reliability quotient of required to actual error variance.
///
/// `var_ref >= var_act > 0` scores `var_ref / var_act`; a larger actual
/// variance scores exactly 0; `var_act == 0` scores infinity. The failing
/// branch maps to 0 rather than a fraction, so finite scores below 1 never
/// occur.
pub fn reliability(var_ref: f64, var_act: f64) -> Result<MetricValue, MetricError> {
    if !var_ref.is_finite() || var_ref < 0.0 {
        return Err(MetricError::InvalidVariance { value: var_ref });
    }
    if !var_act.is_finite() || var_act < 0.0 {
        return Err(MetricError::InvalidVariance { value: var_act });
    }
    if var_act == 0.0 {
        return Ok(MetricValue::Infinite);
    }
    if var_act > var_ref {
        return Ok(MetricValue::Finite(0.0));
    }
    Ok(MetricValue::Finite(var_ref / var_act))
}

/// Reliability for success-probability capabilities.
///
/// Trials are Bernoulli, so the per-trial variance is `p(1-p)`. Because that
/// variance is not monotone in `p`, a raw variance quotient would reward
/// arbitrarily bad success rates; the floor `p_act >= p_ref` is checked first
/// and any shortfall scores 0. `p_act == 1` has zero variance and scores
/// infinity.
pub fn reliability_success(p_ref: f64, p_act: f64) -> Result<MetricValue, MetricError> {
    for p in [p_ref, p_act] {
        if !p.is_finite() || !(0.0..=1.0).contains(&p) {
            return Err(MetricError::ProbabilityOutOfRange { value: p });
        }
    }
    if p_act < p_ref {
        return Ok(MetricValue::Finite(0.0));
    }
    reliability(p_ref * (1.0 - p_ref), p_act * (1.0 - p_act))
}

/// Responsiveness quotient of essential to actual response time.
///
/// `t_ref >= t_act` scores `t_ref / t_act`; a slower-than-required response
/// scores exactly 0. An unmeasurable `t_act == 0` is rejected — unlike the
/// reliability quotient there is no infinity branch here.
pub fn responsiveness(t_ref: f64, t_act: f64) -> Result<MetricValue, MetricError> {
    if !t_ref.is_finite() || t_ref < 0.0 {
        return Err(MetricError::InvalidReferenceTime { value: t_ref });
    }
    if !t_act.is_finite() || t_act <= 0.0 {
        return Err(MetricError::InvalidActualTime { value: t_act });
    }
    if t_act > t_ref {
        return Ok(MetricValue::Finite(0.0));
    }
    Ok(MetricValue::Finite(t_ref / t_act))
}

/// One capability's contribution to the degree-of-autonomy sum:
/// `1 / (c_rel * c_res)`.
///
/// A failed metric (either quotient 0) makes the term infinite so the
/// capability dominates the aggregate; an infinite metric paired with a
/// nonzero one makes the term 0 (bounded influence). The 0-times-infinity
/// pairing has no defensible value and is reported as an error.
pub fn capability_term(c_rel: MetricValue, c_res: MetricValue) -> Result<MetricValue, MetricError> {
    let zero = c_rel.is_zero() || c_res.is_zero();
    let infinite = c_rel.is_infinite() || c_res.is_infinite();
    match (zero, infinite) {
        (true, true) => Err(MetricError::IndeterminateTerm),
        (true, false) => Ok(MetricValue::Infinite),
        (false, true) => Ok(MetricValue::Finite(0.0)),
        (false, false) => {
            // Both finite and nonzero here.
            let rel = c_rel.as_finite().expect("finite");
            let res = c_res.as_finite().expect("finite");
            Ok(MetricValue::Finite(1.0 / (rel * res)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reliability_passing_ratio() {
        // (1.40 / 1.00)^2 alert-limit quotient expressed as variances.
        let c = reliability(1.96, 1.0).unwrap();
        assert_eq!(c, MetricValue::Finite(1.96));
    }

    #[test]
    fn reliability_equality_boundary() {
        assert_eq!(reliability(4.0, 4.0).unwrap(), MetricValue::Finite(1.0));
    }

    #[test]
    fn reliability_failing_branch_is_exact_zero() {
        assert_eq!(reliability(1.0, 2.0).unwrap(), MetricValue::Finite(0.0));
    }

    #[test]
    fn reliability_zero_actual_variance_is_infinite() {
        assert_eq!(reliability(1.0, 0.0).unwrap(), MetricValue::Infinite);
        // Zero-over-zero resolves to the infinity branch as well.
        assert_eq!(reliability(0.0, 0.0).unwrap(), MetricValue::Infinite);
    }

    #[test]
    fn reliability_rejects_negative_variance() {
        assert!(reliability(-1.0, 1.0).is_err());
        assert!(reliability(1.0, -1.0).is_err());
        assert!(reliability(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn success_reliability_better_rate_passes() {
        let c = reliability_success(0.95, 0.98).unwrap();
        let expected = 0.0475 / 0.0196;
        match c {
            MetricValue::Finite(v) => assert!((v - expected).abs() < 1e-12),
            _ => panic!("expected finite"),
        }
    }

    #[test]
    fn success_reliability_equal_rates_score_one() {
        assert_eq!(reliability_success(0.95, 0.95).unwrap(), MetricValue::Finite(1.0));
    }

    #[test]
    fn success_reliability_floor_guard_fires() {
        // 0.90 * 0.10 = 0.09 would beat 0.0475 on raw variance; the floor
        // check must override that and fail the capability.
        assert_eq!(reliability_success(0.95, 0.90).unwrap(), MetricValue::Finite(0.0));
    }

    #[test]
    fn success_reliability_perfect_rate_is_infinite() {
        assert_eq!(reliability_success(0.95, 1.0).unwrap(), MetricValue::Infinite);
    }

    #[test]
    fn success_reliability_range_checked() {
        assert!(reliability_success(1.2, 0.5).is_err());
        assert!(reliability_success(0.5, -0.1).is_err());
    }

    #[test]
    fn responsiveness_from_frequencies() {
        let c = responsiveness(1.0 / 150.0, 1.0 / 200.0).unwrap();
        match c {
            MetricValue::Finite(v) => assert!((v - 4.0 / 3.0).abs() < 1e-12),
            _ => panic!("expected finite"),
        }
    }

    #[test]
    fn responsiveness_boundary_and_failure() {
        assert_eq!(responsiveness(0.1, 0.1).unwrap(), MetricValue::Finite(1.0));
        assert_eq!(responsiveness(0.1, 0.2).unwrap(), MetricValue::Finite(0.0));
    }

    #[test]
    fn responsiveness_zero_actual_rejected() {
        assert!(matches!(
            responsiveness(0.1, 0.0),
            Err(MetricError::InvalidActualTime { .. })
        ));
    }

    #[test]
    fn term_of_passing_pair() {
        let t = capability_term(MetricValue::Finite(1.96), MetricValue::Finite(4.0 / 3.0)).unwrap();
        match t {
            MetricValue::Finite(v) => assert!((v - 0.3826530612244898).abs() < 1e-15),
            _ => panic!("expected finite"),
        }
    }

    #[test]
    fn term_identity() {
        assert_eq!(
            capability_term(MetricValue::Finite(1.0), MetricValue::Finite(1.0)).unwrap(),
            MetricValue::Finite(1.0)
        );
    }

    #[test]
    fn term_failed_capability_dominates() {
        assert_eq!(
            capability_term(MetricValue::Finite(0.0), MetricValue::Finite(1.5)).unwrap(),
            MetricValue::Infinite
        );
    }

    #[test]
    fn term_infinite_metric_vanishes() {
        assert_eq!(
            capability_term(MetricValue::Infinite, MetricValue::Finite(2.0)).unwrap(),
            MetricValue::Finite(0.0)
        );
        assert_eq!(
            capability_term(MetricValue::Infinite, MetricValue::Infinite).unwrap(),
            MetricValue::Finite(0.0)
        );
    }

    #[test]
    fn term_zero_times_infinity_is_indeterminate() {
        assert!(matches!(
            capability_term(MetricValue::Finite(0.0), MetricValue::Infinite),
            Err(MetricError::IndeterminateTerm)
        ));
    }
}
