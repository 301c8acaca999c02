use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::stats::P_FLOOR;

/// How a reported p-value relates to the true tail probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PBound {
    /// Value as computed.
    Exact,
    /// True p is at or below the reported value.
    Floor,
    /// True p is at or above the reported value.
    Cap,
}

/// Result of one hypothesis test. `decision` is always `p_value <= alpha`
/// on the stored values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub test_name: String,
    pub statistic: f64,
    pub params: BTreeMap<String, f64>,
    pub p_value: f64,
    pub p_bound: PBound,
    pub alpha: f64,
    pub decision: bool,
}

impl TestOutcome {
    pub fn new(test_name: impl Into<String>, statistic: f64, p_value: f64, alpha: f64) -> Self {
        let p = p_value.clamp(0.0, 1.0);
        Self {
            test_name: test_name.into(),
            statistic,
            params: BTreeMap::new(),
            p_value: p,
            p_bound: PBound::Exact,
            alpha,
            decision: p <= alpha,
        }
    }

    /// Like `new`, but p-values under [`P_FLOOR`] are floored and flagged.
    pub fn asymptotic(test_name: impl Into<String>, statistic: f64, p_value: f64, alpha: f64) -> Self {
        if p_value < P_FLOOR {
            Self::new(test_name, statistic, P_FLOOR, alpha).with_bound(PBound::Floor)
        } else {
            Self::new(test_name, statistic, p_value, alpha)
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn with_bound(mut self, bound: PBound) -> Self {
        self.p_bound = bound;
        self
    }

    /// Re-evaluates the decision against another alpha.
    pub fn at_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self.decision = self.p_value <= alpha;
        self
    }

    pub fn param(&self, key: &str) -> Option<f64> {
        self.params.get(key).copied()
    }

    pub fn is_consistent(&self) -> bool {
        (0.0..=1.0).contains(&self.p_value) && self.decision == (self.p_value <= self.alpha)
    }
}
