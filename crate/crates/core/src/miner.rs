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

//! Template-driven rule search.
//!
//! Each right-hand side assignment `(column, value)` is one job. A job fills
//! the pattern's left-hand blanks depth-first in canonical order:
//!
//! * clauses are filled in pattern order (narrowest first);
//! * columns inside a clause strictly increase, and two clauses of equal width
//!   have strictly increasing first columns;
//! * no column is used twice, and the right-hand column is excluded.
//!
//! so every distinct rule is produced exactly once. Two bounds cut the tree:
//!
//! 1. after a clause is completed, the ANDed prefix must still cover at least
//!    `min_support` rows, both alone and together with the right-hand side;
//! 2. inside the last clause, per-alternative counts give an upper bound on
//!    support and a lower bound on the rows that violate the right-hand side.
//!    Every metric grows with the first and shrinks with the second, so a
//!    bound that fails the thresholds rules out the whole subtree.

use std::cmp::Ordering;
use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering as AtomicOrdering};

use thiserror::Error;

use crate::bitmap::Bitmap;
use crate::metrics::{passes, RuleMetrics, Thresholds};
use crate::pattern::{render_rule, Equality, Rule, RulePattern};
use crate::scalar::Scalar;
use crate::table::{build_index, BitmapIndex, DataTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MinerError {
    #[error("{side} column allow-list names unknown column {column:?}")]
    UnknownColumn { side: &'static str, column: String },
    #[error("max set size must be at least 1")]
    ZeroSetSize,
    #[error("thread count must be at least 1")]
    ZeroThreads,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinerConfig<S = f64> {
    pub thresholds: Thresholds<S>,
    /// Largest value set an equality may use.
    pub max_set_size: usize,
    /// Columns allowed on the left-hand side; `None` allows all.
    pub lhs_columns: Option<Vec<String>>,
    /// Columns allowed on the right-hand side; `None` allows all.
    pub rhs_columns: Option<Vec<String>>,
    pub threads: usize,
    /// Keep only the first `max_rules` rules of the sorted output.
    pub max_rules: Option<usize>,
    /// Turn both pruning bounds off. Output is identical either way; this
    /// exists to measure and verify the bounds.
    pub prune: bool,
}

impl<S: Scalar> Default for MinerConfig<S> {
    fn default() -> Self {
        MinerConfig {
            thresholds: Thresholds::default(),
            max_set_size: 2,
            lhs_columns: None,
            rhs_columns: None,
            threads: 1,
            max_rules: None,
            prune: true,
        }
    }
}

impl<S: Scalar> MinerConfig<S> {
    fn validate(&self, index: &BitmapIndex) -> Result<(), MinerError> {
        if self.max_set_size == 0 {
            return Err(MinerError::ZeroSetSize);
        }
        if self.threads == 0 {
            return Err(MinerError::ZeroThreads);
        }
        for (side, list) in [("lhs", &self.lhs_columns), ("rhs", &self.rhs_columns)] {
            for name in list.iter().flatten() {
                if index.column_index(name).is_none() {
                    return Err(MinerError::UnknownColumn {
                        side,
                        column: name.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    fn allowed(&self, index: &BitmapIndex, list: &Option<Vec<String>>) -> Vec<bool> {
        let mut mask = vec![list.is_none(); index.n_columns()];
        for name in list.iter().flatten() {
            if let Some(c) = index.column_index(name) {
                mask[c] = true;
            }
        }
        mask
    }
}

/// All search for one fixed right-hand side.
#[derive(Debug, Clone)]
pub struct Job<S = f64> {
    pub rhs: Equality,
    pub rhs_bits: Bitmap,
    /// `max(min_confidence, min_lift · rhs_support / n)`: once the right-hand
    /// side is fixed, the lift floor is a confidence floor.
    pub derived_min_confidence: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinedRule<S = f64> {
    pub rule: Rule,
    pub metrics: RuleMetrics<S>,
}

/// Search counters, summed over jobs.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MineStats {
    pub jobs: usize,
    pub jobs_completed: usize,
    /// Completed candidates whose counts were evaluated.
    pub candidates: u64,
    /// Branches cut at a completed clause.
    pub clause_cuts: u64,
    /// Branches cut by the last-clause bound.
    pub bound_cuts: u64,
}

impl MineStats {
    fn absorb(&mut self, other: &MineStats) {
        self.jobs_completed += other.jobs_completed;
        self.candidates += other.candidates;
        self.clause_cuts += other.clause_cuts;
        self.bound_cuts += other.bound_cuts;
    }
}

#[derive(Debug, Clone)]
pub struct MineOutcome<S = f64> {
    pub rules: Vec<MinedRule<S>>,
    pub stats: MineStats,
    /// False when cancellation stopped the run before every job finished.
    pub complete: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prune {
    Keep,
    Cut,
}

/// Decide whether a prefix of completed clauses can still reach `min_support`.
///
/// Further AND-clauses only remove rows, so the joint count of the prefix with
/// the right-hand side bounds the support of every completion.
pub fn prune_check(prefix_bits: &Bitmap, rhs_bits: &Bitmap, min_support: u64) -> Prune {
    let min_support = min_support.max(1);
    if prefix_bits.count_ones() < min_support || prefix_bits.and_count(rhs_bits) < min_support {
        Prune::Cut
    } else {
        Prune::Keep
    }
}

/// One candidate value set for one column.
#[derive(Debug, Clone)]
struct Atom {
    values: Vec<char>,
    bits: Bitmap,
}

/// Non-empty value subsets of every column, up to `max_set_size` values.
fn build_atoms(index: &BitmapIndex, max_set_size: usize) -> Vec<Vec<Atom>> {
    (0..index.n_columns())
        .map(|c| {
            let dict = index.dictionary(c);
            let mut atoms = Vec::new();
            for size in 1..=max_set_size.min(dict.len()) {
                for_each_combination(dict.len(), size, &mut |slots| {
                    let mut bits = Bitmap::zeros(index.n_rows());
                    for &s in slots {
                        bits.or_assign(index.value_bitmap(c, s));
                    }
                    atoms.push(Atom {
                        values: slots.iter().map(|&s| dict[s]).collect(),
                        bits,
                    });
                });
            }
            atoms
        })
        .collect()
}

fn for_each_combination(n: usize, k: usize, f: &mut impl FnMut(&[usize])) {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize])) {
        if cur.len() == k {
            f(cur);
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, f);
            cur.pop();
        }
    }
    go(0, n, k, &mut Vec::with_capacity(k), f);
}

/// One job per right-hand `(column, value)` that covers at least
/// `min_support` rows.
pub fn enumerate_jobs<S: Scalar>(
    index: &BitmapIndex,
    _pattern: &RulePattern,
    config: &MinerConfig<S>,
) -> Result<Vec<Job<S>>, MinerError> {
    config.validate(index)?;
    let allowed = config.allowed(index, &config.rhs_columns);
    let t = &config.thresholds;
    let n = index.n_rows() as u64;
    let mut jobs = Vec::new();
    for (c, _) in allowed.iter().enumerate().filter(|(_, ok)| **ok) {
        for (slot, &v) in index.dictionary(c).iter().enumerate() {
            let bits = index.value_bitmap(c, slot);
            let support = bits.count_ones();
            if support < t.min_support.max(1) {
                continue;
            }
            let lift_floor = t.min_lift * S::from_ratio(i128::from(support), u128::from(n));
            let derived = if lift_floor > t.min_confidence {
                lift_floor
            } else {
                t.min_confidence
            };
            jobs.push(Job {
                rhs: Equality::new(c, [v]),
                rhs_bits: bits.clone(),
                derived_min_confidence: derived,
            });
        }
    }
    Ok(jobs)
}

/// All passing rules for one job, in search order.
pub fn mine_job<S: Scalar>(
    index: &BitmapIndex,
    pattern: &RulePattern,
    job: &Job<S>,
    config: &MinerConfig<S>,
) -> Vec<MinedRule<S>> {
    let atoms = build_atoms(index, config.max_set_size.max(1));
    let lhs_allowed = config.allowed(index, &config.lhs_columns);
    let mut search = JobSearch::new(index, &atoms, &lhs_allowed, pattern, job, config, None);
    search.run();
    search.out
}

/// Mine a table end to end.
pub fn mine<S: Scalar>(
    table: &DataTable,
    pattern: &RulePattern,
    config: &MinerConfig<S>,
) -> Result<Vec<MinedRule<S>>, MinerError> {
    let index = build_index(table);
    Ok(mine_index(&index, pattern, config, None)?.rules)
}

/// Mine a prebuilt index. Workers poll `cancel` between jobs and at every
/// alternative of the search; rules found before cancellation are kept.
pub fn mine_index<S: Scalar>(
    index: &BitmapIndex,
    pattern: &RulePattern,
    config: &MinerConfig<S>,
    cancel: Option<&AtomicBool>,
) -> Result<MineOutcome<S>, MinerError> {
    let jobs = enumerate_jobs(index, pattern, config)?;
    let atoms = build_atoms(index, config.max_set_size);
    let lhs_allowed = config.allowed(index, &config.lhs_columns);
    let next = AtomicUsize::new(0);
    let workers = config.threads.min(jobs.len()).max(1);

    let work = || {
        let mut rules = Vec::new();
        let mut stats = MineStats::default();
        loop {
            if cancel.is_some_and(|c| c.load(AtomicOrdering::Relaxed)) {
                break;
            }
            let i = next.fetch_add(1, AtomicOrdering::Relaxed);
            let Some(job) = jobs.get(i) else { break };
            let mut search =
                JobSearch::new(index, &atoms, &lhs_allowed, pattern, job, config, cancel);
            search.run();
            if !search.cancelled {
                search.stats.jobs_completed += 1;
            }
            stats.absorb(&search.stats);
            rules.append(&mut search.out);
            keep_top(&mut rules, config.max_rules, index.columns());
        }
        (rules, stats)
    };

    let parts: Vec<(Vec<MinedRule<S>>, MineStats)> = if workers == 1 {
        vec![work()]
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers).map(|_| scope.spawn(work)).collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("mining worker panicked"))
                .collect()
        })
    };

    let mut stats = MineStats {
        jobs: jobs.len(),
        ..MineStats::default()
    };
    let mut rules = Vec::new();
    for (mut r, s) in parts {
        stats.absorb(&s);
        rules.append(&mut r);
    }
    let mut rules = sort_rules(rules, index.columns());
    if let Some(cap) = config.max_rules {
        rules.truncate(cap);
    }
    Ok(MineOutcome {
        rules,
        complete: stats.jobs_completed == stats.jobs,
        stats,
    })
}

/// Bound memory under a rule cap: once `rules` holds twice the cap, keep
/// only the best `cap`. The final top-`cap` of the union is unaffected.
fn keep_top<S: Scalar>(rules: &mut Vec<MinedRule<S>>, cap: Option<usize>, columns: &[String]) {
    if let Some(cap) = cap {
        if rules.len() >= cap.max(1024) * 2 {
            let mut sorted = sort_rules(std::mem::take(rules), columns);
            sorted.truncate(cap);
            *rules = sorted;
        }
    }
}

fn desc<S: PartialOrd>(a: &S, b: &S) -> Ordering {
    b.partial_cmp(a).unwrap_or(Ordering::Equal)
}

/// Descending lift, confidence, support; then ascending rule text.
pub fn sort_rules<S: Scalar>(rules: Vec<MinedRule<S>>, columns: &[String]) -> Vec<MinedRule<S>> {
    let mut keyed: Vec<(String, MinedRule<S>)> = rules
        .into_iter()
        .map(|r| (render_rule(&r.rule, columns), r))
        .collect();
    keyed.sort_by(|(ta, a), (tb, b)| {
        desc(&a.metrics.lift, &b.metrics.lift)
            .then_with(|| desc(&a.metrics.confidence, &b.metrics.confidence))
            .then_with(|| b.metrics.support.cmp(&a.metrics.support))
            .then_with(|| ta.cmp(tb))
    });
    keyed.into_iter().map(|(_, r)| r).collect()
}

/// Depth-first search state for one job.
struct JobSearch<'a, S> {
    index: &'a BitmapIndex,
    atoms: &'a [Vec<Atom>],
    thresholds: &'a Thresholds<S>,
    prune: bool,
    max_rules: Option<usize>,
    cancel: Option<&'a AtomicBool>,
    widths: Vec<usize>,
    /// Left-hand eligible columns, ascending.
    columns: Vec<usize>,
    rhs: &'a Equality,
    rhs_bits: &'a Bitmap,
    rhs_support: u64,
    used: Vec<bool>,
    /// `prefix[d]` = AND of clauses `0..d`.
    prefix: Vec<Bitmap>,
    /// `acc[d][j]` = OR of the first `j` alternatives of clause `d`.
    acc: Vec<Vec<Bitmap>>,
    chosen: Vec<Vec<(usize, usize)>>,
    out: Vec<MinedRule<S>>,
    stats: MineStats,
    cancelled: bool,
}

/// Per-alternative counts for the last clause under a fixed prefix.
struct LastClause {
    prefix_rhs: Bitmap,
    prefix_not_rhs: Bitmap,
    /// `hits[pos][a]` = rows of prefix ∧ rhs ∧ atom.
    hits: Vec<Vec<u64>>,
    /// `misses[pos][a]` = rows of prefix ∧ ¬rhs ∧ atom.
    misses: Vec<Vec<u64>>,
    /// `best_hits[pos]` = max of `hits` over positions `pos..`.
    best_hits: Vec<u64>,
    joint: u64,
}

impl<'a, S: Scalar> JobSearch<'a, S> {
    fn new(
        index: &'a BitmapIndex,
        atoms: &'a [Vec<Atom>],
        lhs_allowed: &[bool],
        pattern: &RulePattern,
        job: &'a Job<S>,
        config: &'a MinerConfig<S>,
        cancel: Option<&'a AtomicBool>,
    ) -> Self {
        let n = index.n_rows();
        let widths: Vec<usize> = pattern.clauses().iter().map(|c| c.blanks).collect();
        let columns = (0..index.n_columns())
            .filter(|&c| lhs_allowed[c] && c != job.rhs.column && !atoms[c].is_empty())
            .collect();
        JobSearch {
            index,
            atoms,
            thresholds: &config.thresholds,
            prune: config.prune,
            max_rules: config.max_rules,
            cancel,
            columns,
            rhs: &job.rhs,
            rhs_bits: &job.rhs_bits,
            rhs_support: job.rhs_bits.count_ones(),
            used: vec![false; index.n_columns()],
            prefix: vec![Bitmap::ones(n); widths.len() + 1],
            acc: widths.iter().map(|&w| vec![Bitmap::zeros(n); w + 1]).collect(),
            chosen: vec![Vec::new(); widths.len()],
            widths,
            out: Vec::new(),
            stats: MineStats::default(),
            cancelled: false,
        }
    }

    fn run(&mut self) {
        if self.rhs_support < self.thresholds.min_support.max(1) {
            return;
        }
        self.clause(0);
    }

    fn is_cancelled(&mut self) -> bool {
        if !self.cancelled && self.cancel.is_some_and(|c| c.load(AtomicOrdering::Relaxed)) {
            self.cancelled = true;
        }
        self.cancelled
    }

    /// Smallest column position the first alternative of clause `d` may use.
    fn first_position(&self, d: usize) -> usize {
        if d > 0 && self.widths[d] == self.widths[d - 1] {
            let prev = self.chosen[d - 1][0].0;
            self.columns.partition_point(|&c| c <= prev)
        } else {
            0
        }
    }

    fn clause(&mut self, d: usize) {
        let start = self.first_position(d);
        if d + 1 == self.widths.len() {
            self.last_clause(d, start);
        } else {
            self.open_blank(d, 0, start);
        }
    }

    /// Fill alternative `j` of a clause that is not the last one.
    fn open_blank(&mut self, d: usize, j: usize, start: usize) {
        let width = self.widths[d];
        for pos in start..self.columns.len() {
            if self.is_cancelled() {
                return;
            }
            let col = self.columns[pos];
            if self.used[col] {
                continue;
            }
            self.used[col] = true;
            for a in 0..self.atoms[col].len() {
                self.extend_clause(d, j, &self.atoms[col][a].bits);
                self.chosen[d].push((col, a));
                if j + 1 == width {
                    let (lo, hi) = self.prefix.split_at_mut(d + 1);
                    hi[0].assign_and(&lo[d], &self.acc[d][width]);
                    if !self.prune
                        || prune_check(&self.prefix[d + 1], self.rhs_bits, self.thresholds.min_support)
                            == Prune::Keep
                    {
                        self.clause(d + 1);
                    } else {
                        self.stats.clause_cuts += 1;
                    }
                } else {
                    self.open_blank(d, j + 1, pos + 1);
                }
                self.chosen[d].pop();
            }
            self.used[col] = false;
        }
    }

    /// `acc[d][j + 1] = acc[d][j] OR bits`.
    fn extend_clause(&mut self, d: usize, j: usize, bits: &Bitmap) {
        let (lo, hi) = self.acc[d].split_at_mut(j + 1);
        if j == 0 {
            hi[0].assign(bits);
        } else {
            hi[0].assign(&lo[j]);
            hi[0].or_assign(bits);
        }
    }

    fn last_clause(&mut self, d: usize, start: usize) {
        let prefix = &self.prefix[d];
        let prefix_rhs = prefix.and(self.rhs_bits);
        let prefix_not_rhs = prefix.and_not(self.rhs_bits);
        let joint = prefix_rhs.count_ones();
        if self.prune && joint < self.thresholds.min_support.max(1) {
            self.stats.clause_cuts += 1;
            return;
        }
        let mut hits = vec![Vec::new(); self.columns.len()];
        let mut misses = vec![Vec::new(); self.columns.len()];
        for pos in start..self.columns.len() {
            let col = self.columns[pos];
            if self.used[col] {
                continue;
            }
            for atom in &self.atoms[col] {
                hits[pos].push(atom.bits.and_count(&prefix_rhs));
                misses[pos].push(atom.bits.and_count(&prefix_not_rhs));
            }
        }
        let mut best_hits = vec![0; self.columns.len() + 1];
        for pos in (0..self.columns.len()).rev() {
            let here = hits[pos].iter().copied().max().unwrap_or(0);
            best_hits[pos] = best_hits[pos + 1].max(here);
        }
        let last = LastClause {
            prefix_rhs,
            prefix_not_rhs,
            hits,
            misses,
            best_hits,
            joint,
        };
        self.last_blank(d, &last, 0, start, 0, 0);
    }

    /// Could any completion with at most `hits` supporting rows and at least
    /// `misses` violating rows pass the thresholds?
    fn could_pass(&self, hits: u64, misses: u64) -> bool {
        if hits < self.thresholds.min_support.max(1) {
            return false;
        }
        let n = self.index.n_rows() as u64;
        match RuleMetrics::<S>::from_counts(hits, hits + misses, self.rhs_support, n) {
            Ok(m) => passes(&m, self.thresholds),
            Err(_) => false,
        }
    }

    fn last_blank(
        &mut self,
        d: usize,
        last: &LastClause,
        j: usize,
        start: usize,
        hit_sum: u64,
        miss_max: u64,
    ) {
        let width = self.widths[d];
        for pos in start..self.columns.len() {
            if self.is_cancelled() {
                return;
            }
            let col = self.columns[pos];
            if self.used[col] {
                continue;
            }
            self.used[col] = true;
            for a in 0..self.atoms[col].len() {
                let (h, m) = (last.hits[pos][a], last.misses[pos][a]);
                let remaining = (width - j - 1) as u64;
                if self.prune {
                    let hit_bound = (hit_sum + h + remaining * last.best_hits[pos + 1]).min(last.joint);
                    if !self.could_pass(hit_bound, miss_max.max(m)) {
                        self.stats.bound_cuts += 1;
                        continue;
                    }
                }
                let bits = &self.atoms[col][a].bits;
                self.chosen[d].push((col, a));
                if j + 1 == width {
                    let (support, violations) = if j == 0 {
                        (h, m)
                    } else {
                        (
                            or_and_count(&self.acc[d][j], bits, &last.prefix_rhs),
                            or_and_count(&self.acc[d][j], bits, &last.prefix_not_rhs),
                        )
                    };
                    self.score(support, support + violations);
                } else {
                    self.extend_clause(d, j, bits);
                    self.last_blank(d, last, j + 1, pos + 1, hit_sum + h, miss_max.max(m));
                }
                self.chosen[d].pop();
            }
            self.used[col] = false;
        }
    }

    fn score(&mut self, support: u64, lhs_support: u64) {
        self.stats.candidates += 1;
        if lhs_support == 0 {
            return;
        }
        let n = self.index.n_rows() as u64;
        let metrics = RuleMetrics::<S>::from_counts(support, lhs_support, self.rhs_support, n)
            .expect("non-empty sides");
        if !passes(&metrics, self.thresholds) {
            return;
        }
        let lhs = self
            .chosen
            .iter()
            .map(|clause| {
                clause
                    .iter()
                    .map(|&(col, a)| Equality {
                        column: col,
                        values: self.atoms[col][a].values.clone(),
                    })
                    .collect()
            })
            .collect();
        let rule = Rule {
            lhs,
            rhs: self.rhs.clone(),
        };
        debug_assert!(rule.is_canonical(), "search emitted a non-canonical rule");
        self.out.push(MinedRule { rule, metrics });
        keep_top(&mut self.out, self.max_rules, self.index.columns());
    }
}

/// `popcount((a OR b) AND mask)`.
#[inline]
fn or_and_count(a: &Bitmap, b: &Bitmap, mask: &Bitmap) -> u64 {
    a.words()
        .iter()
        .zip(b.words())
        .zip(mask.words())
        .map(|((x, y), m)| u64::from(((x | y) & m).count_ones()))
        .sum()
}
