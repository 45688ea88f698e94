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

//! Rule pattern templates and the instantiated rules that fill them.
//!
//! A pattern is a conjunction of OR-groups of blanks with a single blank on
//! the right-hand side:
//!
//! ```text
//! pattern := lhs "->" "_"
//! lhs     := group ("AND" group)*
//! group   := "_" | "(" "_" ("OR" "_")+ ")"
//! ```
//!
//! Keywords are case-insensitive and whitespace is ignored.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PatternError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("right-hand side must be a single blank `_` (at byte {offset})")]
    RhsNotSingleBlank { offset: usize },
    #[error("unsupported nesting at byte {offset}: patterns must be an AND of parenthesized OR-groups")]
    UnsupportedNesting { offset: usize },
}

impl PatternError {
    /// Short name of the error kind, for diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            PatternError::Syntax { .. } => "SyntaxError",
            PatternError::RhsNotSingleBlank { .. } => "RhsNotSingleBlank",
            PatternError::UnsupportedNesting { .. } => "UnsupportedNesting",
        }
    }
}

fn syntax(offset: usize, message: impl Into<String>) -> PatternError {
    PatternError::Syntax {
        offset,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok {
    Blank,
    Open,
    Close,
    And,
    Or,
    Implies,
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>, PatternError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let b = bytes[i];
        match b {
            b if b.is_ascii_whitespace() => i += 1,
            b'_' => {
                out.push((Tok::Blank, i));
                i += 1;
            }
            b'(' => {
                out.push((Tok::Open, i));
                i += 1;
            }
            b')' => {
                out.push((Tok::Close, i));
                i += 1;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((Tok::Implies, i));
                i += 2;
            }
            b if b.is_ascii_alphabetic() => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let word = &text[start..i];
                let tok = if word.eq_ignore_ascii_case("and") {
                    Tok::And
                } else if word.eq_ignore_ascii_case("or") {
                    Tok::Or
                } else {
                    return Err(syntax(start, format!("unknown keyword {word:?}")));
                };
                out.push((tok, start));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(syntax(i, format!("unexpected character {ch:?}")));
            }
        }
    }
    Ok(out)
}

/// One OR-group of the left-hand side, described by how many blanks it holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    pub blanks: usize,
}

/// A parsed template: AND of OR-groups on the left, one blank on the right.
///
/// Clauses are kept sorted by width (stable), so `(_ OR _) AND _` and
/// `_ AND (_ OR _)` denote the same pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RulePattern {
    lhs: Vec<Clause>,
}

impl RulePattern {
    /// Build from clause widths. Every width must be at least one.
    pub fn from_widths(widths: &[usize]) -> Option<Self> {
        if widths.is_empty() || widths.contains(&0) {
            return None;
        }
        let mut lhs: Vec<Clause> = widths.iter().map(|&blanks| Clause { blanks }).collect();
        lhs.sort();
        Some(RulePattern { lhs })
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.lhs
    }

    /// Blanks on the left-hand side.
    pub fn lhs_blanks(&self) -> usize {
        self.lhs.iter().map(|c| c.blanks).sum()
    }

    /// All blanks including the right-hand side.
    pub fn blank_count(&self) -> usize {
        self.lhs_blanks() + 1
    }
}

impl fmt::Display for RulePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, clause) in self.lhs.iter().enumerate() {
            if i > 0 {
                f.write_str(" AND ")?;
            }
            if clause.blanks == 1 {
                f.write_str("_")?;
            } else {
                f.write_str("(")?;
                for j in 0..clause.blanks {
                    if j > 0 {
                        f.write_str(" OR ")?;
                    }
                    f.write_str("_")?;
                }
                f.write_str(")")?;
            }
        }
        f.write_str(" -> _")
    }
}

impl std::str::FromStr for RulePattern {
    type Err = PatternError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_pattern(s)
    }
}

pub fn parse_pattern(text: &str) -> Result<RulePattern, PatternError> {
    let toks = tokenize(text)?;
    let Some(arrow) = toks.iter().position(|(t, _)| *t == Tok::Implies) else {
        return Err(syntax(text.len(), "missing `->`"));
    };
    let (lhs, rhs) = (&toks[..arrow], &toks[arrow + 1..]);
    let arrow_at = toks[arrow].1;
    if lhs.is_empty() {
        return Err(syntax(arrow_at, "empty left-hand side"));
    }
    match rhs {
        [] => return Err(syntax(text.len(), "empty right-hand side")),
        [(Tok::Blank, _)] => {}
        [(_, at), ..] => {
            let at = if rhs[0].0 == Tok::Blank { rhs[1].1 } else { *at };
            return Err(PatternError::RhsNotSingleBlank { offset: at });
        }
    }

    let mut widths = Vec::new();
    let mut i = 0;
    loop {
        let Some(&(tok, at)) = lhs.get(i) else {
            return Err(syntax(arrow_at, "expected a blank or `(`"));
        };
        match tok {
            Tok::Blank => {
                widths.push(1);
                i += 1;
            }
            Tok::Open => {
                let (width, next) = parse_group(lhs, i + 1, at)?;
                widths.push(width);
                i = next;
            }
            Tok::Close => return Err(syntax(at, "unbalanced `)`")),
            _ => return Err(syntax(at, "expected a blank or `(`")),
        }
        match lhs.get(i) {
            None => break,
            Some((Tok::And, _)) => i += 1,
            Some((Tok::Or, at)) => return Err(PatternError::UnsupportedNesting { offset: *at }),
            Some((Tok::Close, at)) => return Err(syntax(*at, "unbalanced `)`")),
            Some((_, at)) => return Err(syntax(*at, "expected AND or `->`")),
        }
    }
    Ok(RulePattern::from_widths(&widths).expect("parser only yields non-empty groups"))
}

/// Parse the inside of a parenthesized OR-group starting after `(`.
/// Returns the group width and the index past the closing `)`.
fn parse_group(
    toks: &[(Tok, usize)],
    mut i: usize,
    open_at: usize,
) -> Result<(usize, usize), PatternError> {
    let mut width = 0;
    loop {
        match toks.get(i) {
            Some((Tok::Blank, _)) => width += 1,
            Some((Tok::Open, at)) => return Err(PatternError::UnsupportedNesting { offset: *at }),
            Some((_, at)) => return Err(syntax(*at, "expected a blank")),
            None => return Err(syntax(open_at, "unbalanced `(`")),
        }
        i += 1;
        match toks.get(i) {
            Some((Tok::Or, _)) => i += 1,
            Some((Tok::Close, at)) => {
                if width < 2 {
                    return Err(syntax(*at, "a parenthesized group needs at least two blanks joined by OR"));
                }
                return Ok((width, i + 1));
            }
            Some((Tok::And, at)) => return Err(PatternError::UnsupportedNesting { offset: *at }),
            Some((_, at)) => return Err(syntax(*at, "expected OR or `)`")),
            None => return Err(syntax(open_at, "unbalanced `(`")),
        }
    }
}

/// `column ∈ values`, with the column given by its table index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Equality {
    pub column: usize,
    pub values: Vec<char>,
}

impl Equality {
    pub fn new(column: usize, values: impl IntoIterator<Item = char>) -> Self {
        let mut values: Vec<char> = values.into_iter().collect();
        values.sort_unstable();
        values.dedup();
        Equality { column, values }
    }

    pub fn render(&self, columns: &[String]) -> String {
        let mut s = columns[self.column].clone();
        s.push('=');
        s.extend(self.values.iter());
        s
    }
}

/// A filled pattern. Clauses are ANDed; equalities inside a clause are ORed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub lhs: Vec<Vec<Equality>>,
    pub rhs: Equality,
}

fn clause_order(a: &[Equality], b: &[Equality]) -> Ordering {
    a.len()
        .cmp(&b.len())
        .then_with(|| a.first().map(|e| e.column).cmp(&b.first().map(|e| e.column)))
        .then_with(|| a.cmp(b))
}

impl Rule {
    pub fn new(lhs: Vec<Vec<Equality>>, rhs: Equality) -> Self {
        let mut rule = Rule { lhs, rhs };
        rule.canonicalize();
        rule
    }

    /// Sort value sets, equalities by column within each clause, then clauses
    /// by (width, first column).
    pub fn canonicalize(&mut self) {
        for clause in &mut self.lhs {
            for eq in clause.iter_mut() {
                eq.values.sort_unstable();
            }
            clause.sort();
        }
        self.rhs.values.sort_unstable();
        self.lhs.sort_by(|a, b| clause_order(a, b));
    }

    pub fn is_canonical(&self) -> bool {
        let mut c = self.clone();
        c.canonicalize();
        c == *self
    }

    /// The pattern this rule instantiates.
    pub fn shape(&self) -> RulePattern {
        let widths: Vec<usize> = self.lhs.iter().map(Vec::len).collect();
        RulePattern::from_widths(&widths).expect("rule has an empty clause")
    }

    /// Every column referenced, left-hand side first.
    pub fn columns(&self) -> impl Iterator<Item = usize> + '_ {
        self.lhs
            .iter()
            .flatten()
            .map(|e| e.column)
            .chain(std::iter::once(self.rhs.column))
    }

    /// True when no column appears in more than one equality.
    pub fn columns_unique(&self) -> bool {
        let mut cols: Vec<usize> = self.columns().collect();
        let n = cols.len();
        cols.sort_unstable();
        cols.dedup();
        cols.len() == n
    }

    /// Left-hand side text, e.g. `age=AB AND (bread=y OR onions=n)`.
    pub fn render_lhs(&self, columns: &[String]) -> String {
        let parts: Vec<String> = self
            .lhs
            .iter()
            .map(|clause| {
                if clause.len() == 1 {
                    clause[0].render(columns)
                } else {
                    let alts: Vec<String> = clause.iter().map(|e| e.render(columns)).collect();
                    format!("({})", alts.join(" OR "))
                }
            })
            .collect();
        parts.join(" AND ")
    }
}

/// Deterministic text form: `age=AB AND (bread=y OR onions=n) -> butter=y`.
pub fn render_rule(rule: &Rule, columns: &[String]) -> String {
    format!("{} -> {}", rule.render_lhs(columns), rule.rhs.render(columns))
}
