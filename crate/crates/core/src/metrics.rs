// Copyright 2026 The Scarf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Rule quality measures and threshold tests.
//!
//! All ratios are built from exact integer numerators and denominators, so a
//! float metric is its exact value rounded once:
//!
//! * confidence = support / lhs_support
//! * lift = support · n / (lhs_support · rhs_support)
//! * leverage = (support · n − lhs_support · rhs_support) / n²

use thiserror::Error;

use crate::bitmap::Bitmap;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum MetricsError {
    #[error("left-hand side matches no rows")]
    ZeroLhsSupport,
    #[error("right-hand side matches no rows")]
    ZeroRhsSupport,
    #[error("bit vectors cover {lhs} and {rhs} rows, expected {n}")]
    LengthMismatch { lhs: usize, rhs: usize, n: usize },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThresholdError {
    #[error("minimum confidence must lie in [0, 1], got {0}")]
    Confidence(f64),
    #[error("minimum lift must be non-negative, got {0}")]
    Lift(f64),
    #[error("minimum leverage must be a number, got {0}")]
    Leverage(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleMetrics<S = f64> {
    pub support: u64,
    pub lhs_support: u64,
    pub rhs_support: u64,
    pub n: u64,
    pub confidence: S,
    pub lift: S,
    pub leverage: S,
}

impl<S: Scalar> RuleMetrics<S> {
    /// Metrics from raw counts. Both sides must be non-empty.
    pub fn from_counts(
        support: u64,
        lhs_support: u64,
        rhs_support: u64,
        n: u64,
    ) -> Result<Self, MetricsError> {
        if lhs_support == 0 {
            return Err(MetricsError::ZeroLhsSupport);
        }
        if rhs_support == 0 {
            return Err(MetricsError::ZeroRhsSupport);
        }
        debug_assert!(support <= lhs_support.min(rhs_support));
        debug_assert!(lhs_support <= n && rhs_support <= n);
        let (s, l, r, n128) = (
            u128::from(support),
            u128::from(lhs_support),
            u128::from(rhs_support),
            u128::from(n),
        );
        let joint = (s * n128) as i128;
        let indep = (l * r) as i128;
        Ok(RuleMetrics {
            support,
            lhs_support,
            rhs_support,
            n,
            confidence: S::from_ratio(s as i128, l),
            lift: S::from_ratio(joint, l * r),
            leverage: S::from_ratio(joint - indep, n128 * n128),
        })
    }
}

/// Score a rule from its left- and right-hand row sets.
pub fn compute_metrics<S: Scalar>(
    lhs: &Bitmap,
    rhs: &Bitmap,
    n: usize,
) -> Result<RuleMetrics<S>, MetricsError> {
    if lhs.len() != n || rhs.len() != n {
        return Err(MetricsError::LengthMismatch {
            lhs: lhs.len(),
            rhs: rhs.len(),
            n,
        });
    }
    RuleMetrics::from_counts(lhs.and_count(rhs), lhs.count_ones(), rhs.count_ones(), n as u64)
}

/// Minimum values a rule must reach. All comparisons are inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds<S = f64> {
    /// Absolute row count, at least 1.
    pub min_support: u64,
    pub min_confidence: S,
    pub min_lift: S,
    /// May be negative to disable.
    pub min_leverage: S,
}

impl<S: Scalar> Thresholds<S> {
    /// Validated thresholds. A `min_support` of zero is raised to one.
    pub fn new(
        min_support: u64,
        min_confidence: S,
        min_lift: S,
        min_leverage: S,
    ) -> Result<Self, ThresholdError> {
        let as_f64 = |v: S| v.to_f64().unwrap_or(f64::NAN);
        if !(min_confidence >= S::zero() && min_confidence <= S::one()) {
            return Err(ThresholdError::Confidence(as_f64(min_confidence)));
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(min_lift >= S::zero()) {
            return Err(ThresholdError::Lift(as_f64(min_lift)));
        }
        #[allow(clippy::eq_op)]
        if min_leverage != min_leverage {
            return Err(ThresholdError::Leverage(as_f64(min_leverage)));
        }
        Ok(Thresholds {
            min_support: min_support.max(1),
            min_confidence,
            min_lift,
            min_leverage,
        })
    }
}

impl<S: Scalar> Default for Thresholds<S> {
    /// support ≥ 5, confidence ≥ 0.8, lift ≥ 1, leverage ≥ 0.
    fn default() -> Self {
        Thresholds {
            min_support: 5,
            min_confidence: S::from_ratio(4, 5),
            min_lift: S::one(),
            min_leverage: S::zero(),
        }
    }
}

pub fn passes<S: Scalar>(m: &RuleMetrics<S>, t: &Thresholds<S>) -> bool {
    m.support >= t.min_support.max(1)
        && m.confidence >= t.min_confidence
        && m.lift >= t.min_lift
        && m.leverage >= t.min_leverage
}
