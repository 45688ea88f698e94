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

//! Generalized association rule mining.
//!
//! Rules are instances of a user template such as `_ AND (_ OR _) -> _`,
//! where each blank becomes a `column=values` equality over a categorical
//! table. Candidates are scored with word-parallel bitmap operations and
//! filtered by support, confidence, lift and leverage.
//!
//! ```
//! use scarf::{mine, parse_csv, parse_pattern, render_rule, MinerConfig, Thresholds};
//!
//! let table = parse_csv(b"a;b\nx;y\nx;y\nz;w\n").unwrap();
//! let pattern = parse_pattern("_ -> _").unwrap();
//! let config = MinerConfig {
//!     thresholds: Thresholds::new(2, 0.9, 1.0, 0.0).unwrap(),
//!     ..MinerConfig::default()
//! };
//! let rules = mine::<f64>(&table, &pattern, &config).unwrap();
//! let text: Vec<String> = rules.iter().map(|r| render_rule(&r.rule, table.columns())).collect();
//! assert_eq!(text, ["a=x -> b=y", "b=y -> a=x"]);
//! ```

pub mod bitmap;
pub mod metrics;
pub mod miner;
pub mod pattern;
pub mod report;
pub mod scalar;
pub mod table;

pub use bitmap::Bitmap;
pub use metrics::{compute_metrics, passes, MetricsError, RuleMetrics, ThresholdError, Thresholds};
pub use miner::{
    enumerate_jobs, mine, mine_index, mine_job, prune_check, sort_rules, Job, MineOutcome,
    MineStats, MinedRule, MinerConfig, MinerError, Prune,
};
pub use num_rational::Rational64;
pub use pattern::{parse_pattern, render_rule, Clause, Equality, PatternError, Rule, RulePattern};
pub use report::{write_csv, write_txt, write_xml, Report, ReportMeta};
pub use scalar::Scalar;
pub use table::{build_index, parse_csv, parse_csv_with, BitmapIndex, DataTable, Delimiter, TableError};

/// Metrics in exact rational arithmetic.
pub type ExactMetrics = RuleMetrics<Rational64>;
pub type ExactThresholds = Thresholds<Rational64>;
pub type ExactMinerConfig = MinerConfig<Rational64>;
pub type ExactMinedRule = MinedRule<Rational64>;

/// Single-precision variants.
pub type MetricsF32 = RuleMetrics<f32>;
pub type ThresholdsF32 = Thresholds<f32>;
pub type MinerConfigF32 = MinerConfig<f32>;
pub type MinedRuleF32 = MinedRule<f32>;
