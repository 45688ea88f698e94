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

//! Command-line front end: read a table, mine a pattern, write a report.
//!
//! Exit status is 0 on success (including zero rules), 2 on any input or
//! configuration error, and 3 when the time budget ran out; in that case a
//! report marked PARTIAL with every rule found so far is still written.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use clap::{Parser, ValueEnum};
use scarf::{
    build_index, mine_index, parse_csv_with, parse_pattern, write_csv, write_txt, write_xml,
    Delimiter, MinerConfig, Report, ReportMeta, Thresholds,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_TIMEOUT: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Txt,
    Xml,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DelimiterArg {
    Comma,
    Semicolon,
}

/// Mine generalized association rules that match a pattern template.
#[derive(Debug, Clone, Parser)]
#[command(name = "scarf", version)]
pub struct CliConfig {
    /// Comma- or semicolon-separated table; the first line names the columns.
    #[arg(long)]
    pub input: PathBuf,

    /// Rule template, e.g. "_ AND (_ OR _) -> _".
    #[arg(long)]
    pub pattern: String,

    /// Minimum support: a row count ("5") or a fraction of rows ("0.05").
    #[arg(long, default_value = "5")]
    pub min_support: String,

    #[arg(long, default_value_t = 0.8)]
    pub min_confidence: f64,

    #[arg(long, default_value_t = 1.0)]
    pub min_lift: f64,

    /// May be negative to disable the leverage filter.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub min_leverage: f64,

    /// Largest value set per equality.
    #[arg(long, default_value_t = 2)]
    pub max_set_size: usize,

    /// Comma-separated columns allowed on the left-hand side.
    #[arg(long)]
    pub lhs_columns: Option<String>,

    /// Comma-separated columns allowed on the right-hand side.
    #[arg(long)]
    pub rhs_columns: Option<String>,

    /// Worker threads; defaults to the number of available cores.
    #[arg(long)]
    pub threads: Option<usize>,

    /// Report file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Txt)]
    pub format: Format,

    /// Stop after this many seconds and write a partial report.
    #[arg(long)]
    pub time_budget: Option<f64>,

    /// Keep only the best N rules.
    #[arg(long)]
    pub max_rules: Option<usize>,

    /// Override delimiter detection.
    #[arg(long, value_enum)]
    pub delimiter: Option<DelimiterArg>,
}

#[derive(Debug)]
struct Failure(String);

fn fail<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(msg.into()))
}

/// Resolve `--min-support`: integers are row counts, decimals are fractions
/// of `n_rows` rounded up.
pub fn resolve_min_support(text: &str, n_rows: usize) -> Result<u64, String> {
    let text = text.trim();
    if let Ok(count) = text.parse::<u64>() {
        return Ok(count);
    }
    match text.parse::<f64>() {
        Ok(f) if f > 0.0 && f <= 1.0 => Ok((n_rows as f64 * f).ceil() as u64),
        Ok(f) => Err(format!(
            "--min-support: fraction must lie in (0, 1], got {f}"
        )),
        Err(_) => Err(format!(
            "--min-support: expected a row count or a fraction, got {text:?}"
        )),
    }
}

fn split_list(list: &Option<String>) -> Option<Vec<String>> {
    list.as_ref().map(|s| {
        s.split(',')
            .map(str::trim)
            .filter(|c| !c.is_empty())
            .map(String::from)
            .collect()
    })
}

/// Run with the process's standard streams.
pub fn run(config: &CliConfig) -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(config, &mut stdout.lock(), &mut stderr.lock())
}

/// Run with explicit streams. The report goes to `--output` or `stdout`;
/// diagnostics only ever go to `stderr`.
pub fn run_with(config: &CliConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match execute(config, stdout, stderr) {
        Ok(code) => code,
        Err(Failure(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_CONFIG
        }
    }
}

fn execute(config: &CliConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, Failure> {
    let started = Instant::now();
    if !(0.0..=1.0).contains(&config.min_confidence) {
        return fail(format!(
            "--min-confidence must lie in [0, 1], got {}",
            config.min_confidence
        ));
    }
    if config.min_lift.is_nan() || config.min_lift < 0.0 {
        return fail(format!("--min-lift must be non-negative, got {}", config.min_lift));
    }
    if config.min_leverage.is_nan() {
        return fail("--min-leverage must be a number");
    }
    if config.max_set_size == 0 {
        return fail("--max-set-size must be at least 1");
    }
    if config.threads == Some(0) {
        return fail("--threads must be at least 1");
    }
    let budget = match config.time_budget {
        Some(secs) if !(secs > 0.0 && secs.is_finite()) => {
            return fail(format!("--time-budget must be a positive number of seconds, got {secs}"))
        }
        Some(secs) => Some(Duration::from_secs_f64(secs)),
        None => None,
    };

    let pattern = parse_pattern(&config.pattern)
        .or_else(|e| fail(format!("--pattern {:?}: {e} [{}]", config.pattern, e.kind())))?;

    let bytes = fs::read(&config.input)
        .or_else(|e| fail(format!("--input {}: {e}", config.input.display())))?;
    let delimiter = config.delimiter.map(|d| match d {
        DelimiterArg::Comma => Delimiter::Comma,
        DelimiterArg::Semicolon => Delimiter::Semicolon,
    });
    let table = parse_csv_with(&bytes, delimiter)
        .or_else(|e| fail(format!("--input {}: {e}", config.input.display())))?;

    let min_support = resolve_min_support(&config.min_support, table.n_rows()).or_else(fail)?;
    let thresholds = Thresholds::new(
        min_support,
        config.min_confidence,
        config.min_lift,
        config.min_leverage,
    )
    .or_else(|e| fail(e.to_string()))?;

    let threads = config.threads.unwrap_or_else(|| {
        std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)
    });
    let miner_config = MinerConfig {
        thresholds,
        max_set_size: config.max_set_size,
        lhs_columns: split_list(&config.lhs_columns),
        rhs_columns: split_list(&config.rhs_columns),
        threads,
        max_rules: config.max_rules,
        prune: true,
    };

    let index = build_index(&table);
    let cancel = AtomicBool::new(false);
    let outcome = std::thread::scope(|scope| {
        let (done, finished) = mpsc::channel::<()>();
        if let Some(budget) = budget {
            let cancel = &cancel;
            scope.spawn(move || {
                if let Err(mpsc::RecvTimeoutError::Timeout) = finished.recv_timeout(budget) {
                    cancel.store(true, Ordering::Relaxed);
                }
            });
        }
        let outcome = mine_index(&index, &pattern, &miner_config, Some(&cancel));
        drop(done);
        outcome
    });
    let outcome = outcome.or_else(|e| fail(e.to_string()))?;

    let report = Report {
        meta: ReportMeta {
            input: config.input.display().to_string(),
            pattern,
            thresholds,
            max_set_size: config.max_set_size,
            n_rows: table.n_rows(),
            n_columns: table.n_columns(),
            elapsed: Some(started.elapsed()),
            partial: !outcome.complete,
        },
        columns: table.columns().to_vec(),
        rules: outcome.rules,
    };
    let text = match config.format {
        Format::Txt => write_txt(&report),
        Format::Xml => write_xml(&report),
        Format::Csv => write_csv(&report),
    };
    match &config.output {
        Some(path) => fs::write(path, text)
            .or_else(|e| fail(format!("--output {}: {e}", path.display())))?,
        None => stdout
            .write_all(text.as_bytes())
            .or_else(|e| fail(format!("writing report: {e}")))?,
    }

    if outcome.complete {
        Ok(EXIT_OK)
    } else {
        let _ = writeln!(
            stderr,
            "warning: time budget exhausted; {} of {} jobs finished, PARTIAL report written",
            outcome.stats.jobs_completed, outcome.stats.jobs
        );
        Ok(EXIT_TIMEOUT)
    }
}
