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

//! Plain-text, XML and CSV serializations of a mining run.
//!
//! Ratios are printed with six fixed decimals in all three formats. Only the
//! run metadata (elapsed time) varies between identical runs.

use std::fmt::Write as _;
use std::time::Duration;

use crate::metrics::{RuleMetrics, Thresholds};
use crate::miner::MinedRule;
use crate::pattern::RulePattern;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct ReportMeta<S = f64> {
    pub input: String,
    pub pattern: RulePattern,
    pub thresholds: Thresholds<S>,
    pub max_set_size: usize,
    pub n_rows: usize,
    pub n_columns: usize,
    pub elapsed: Option<Duration>,
    /// Set when the run stopped early; the rules are then a subset.
    pub partial: bool,
}

#[derive(Debug, Clone)]
pub struct Report<S = f64> {
    pub meta: ReportMeta<S>,
    /// Table column names, used to render rules.
    pub columns: Vec<String>,
    /// Rules in mining output order.
    pub rules: Vec<MinedRule<S>>,
}

/// Six-decimal fixed formatting shared by every output format.
pub fn fmt_ratio<S: Scalar>(v: S) -> String {
    format!("{:.6}", v.to_f64().unwrap_or(f64::NAN))
}

struct Fields {
    lhs: String,
    rhs: String,
    counts: [u64; 3],
    ratios: [String; 3],
}

impl<S: Scalar> Report<S> {
    fn fields(&self) -> impl Iterator<Item = Fields> + '_ {
        self.rules.iter().map(|r| {
            let RuleMetrics {
                support,
                lhs_support,
                rhs_support,
                confidence,
                lift,
                leverage,
                ..
            } = r.metrics;
            Fields {
                lhs: r.rule.render_lhs(&self.columns),
                rhs: r.rule.rhs.render(&self.columns),
                counts: [support, lhs_support, rhs_support],
                ratios: [fmt_ratio(confidence), fmt_ratio(lift), fmt_ratio(leverage)],
            }
        })
    }

    fn threshold_pairs(&self) -> [(&'static str, String); 4] {
        let t = &self.meta.thresholds;
        [
            ("min_support", t.min_support.to_string()),
            ("min_confidence", fmt_ratio(t.min_confidence)),
            ("min_lift", fmt_ratio(t.min_lift)),
            ("min_leverage", fmt_ratio(t.min_leverage)),
        ]
    }
}

fn elapsed_text(d: Option<Duration>) -> String {
    d.map(|d| format!("{:.3}s", d.as_secs_f64()))
        .unwrap_or_else(|| "-".to_string())
}

/// `#` header block, then one tab-separated line per rule.
pub fn write_txt<S: Scalar>(report: &Report<S>) -> String {
    let m = &report.meta;
    let mut out = String::new();
    if m.partial {
        out.push_str("# PARTIAL: run stopped before all jobs finished; rules below are incomplete\n");
    }
    let _ = writeln!(out, "# input: {}", m.input);
    let _ = writeln!(out, "# pattern: {}", m.pattern);
    let thresholds: Vec<String> = report
        .threshold_pairs()
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect();
    let _ = writeln!(out, "# thresholds: {}", thresholds.join(" "));
    let _ = writeln!(out, "# max_set_size: {}", m.max_set_size);
    let _ = writeln!(out, "# table: {} rows, {} columns", m.n_rows, m.n_columns);
    let _ = writeln!(out, "# rules: {}", report.rules.len());
    let _ = writeln!(out, "# elapsed: {}", elapsed_text(m.elapsed));
    for f in report.fields() {
        let _ = writeln!(
            out,
            "{} -> {}\tsupport={}\tlhs_support={}\trhs_support={}\tconfidence={}\tlift={}\tleverage={}",
            f.lhs, f.rhs, f.counts[0], f.counts[1], f.counts[2], f.ratios[0], f.ratios[1], f.ratios[2]
        );
    }
    out
}

/// Escape for a double-quoted attribute value.
pub fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '"' => out.push_str("&quot;"),
            _ => out.push(ch),
        }
    }
    out
}

/// Attribute-based XML, one `<rule/>` element per rule.
pub fn write_xml<S: Scalar>(report: &Report<S>) -> String {
    let m = &report.meta;
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<scarf>\n");
    let _ = write!(
        out,
        "  <meta input=\"{}\" pattern=\"{}\"",
        xml_escape(&m.input),
        xml_escape(&m.pattern.to_string())
    );
    for (k, v) in report.threshold_pairs() {
        let _ = write!(out, " {k}=\"{v}\"");
    }
    let _ = writeln!(
        out,
        " max_set_size=\"{}\" rows=\"{}\" columns=\"{}\" rule_count=\"{}\" partial=\"{}\" elapsed=\"{}\"/>",
        m.max_set_size,
        m.n_rows,
        m.n_columns,
        report.rules.len(),
        m.partial,
        elapsed_text(m.elapsed)
    );
    if report.rules.is_empty() {
        out.push_str("  <rules/>\n");
    } else {
        out.push_str("  <rules>\n");
        for f in report.fields() {
            let _ = writeln!(
                out,
                "    <rule lhs=\"{}\" rhs=\"{}\" support=\"{}\" lhs_support=\"{}\" rhs_support=\"{}\" confidence=\"{}\" lift=\"{}\" leverage=\"{}\"/>",
                xml_escape(&f.lhs),
                xml_escape(&f.rhs),
                f.counts[0],
                f.counts[1],
                f.counts[2],
                f.ratios[0],
                f.ratios[1],
                f.ratios[2]
            );
        }
        out.push_str("  </rules>\n");
    }
    out.push_str("</scarf>\n");
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', ' ', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub const CSV_HEADER: &str = "lhs,rhs,support,lhs_support,rhs_support,confidence,lift,leverage";

/// Header line plus one record per rule. Fields holding a delimiter, quote
/// or space are quoted. A partial run is flagged by a
/// leading `#` comment line.
pub fn write_csv<S: Scalar>(report: &Report<S>) -> String {
    let mut out = String::new();
    if report.meta.partial {
        out.push_str("# PARTIAL: run stopped before all jobs finished\n");
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for f in report.fields() {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            csv_field(&f.lhs),
            csv_field(&f.rhs),
            f.counts[0],
            f.counts[1],
            f.counts[2],
            f.ratios[0],
            f.ratios[1],
            f.ratios[2]
        );
    }
    out
}
