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

//! Test-only helpers: random tables and a brute-force rule enumerator that
//! scans rows one at a time. Nothing here goes through the bitmap index or
//! the miner's search.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use scarf::DataTable;

pub const T0: &str = "age;bread;onions;butter\n\
                      A;y;n;y\n\
                      A;y;y;y\n\
                      B;n;n;y\n\
                      B;y;n;n\n\
                      C;n;y;n\n\
                      A;n;n;y\n\
                      B;y;y;y\n\
                      C;y;n;\n";

pub const PATTERNS: [&str; 4] = [
    "_ -> _",
    "_ AND _ -> _",
    "_ AND (_ OR _) -> _",
    "(_ OR _) AND (_ OR _) -> _",
];

/// Random categorical table. About one column in three is a noisy copy of an
/// earlier column so that rules with high confidence actually occur.
pub fn random_table(rng: &mut ChaCha8Rng, cols: usize, rows: usize, max_values: usize) -> DataTable {
    const ALPHABET: [char; 6] = ['a', 'b', 'c', 'd', 'e', 'f'];
    let values: Vec<usize> = (0..cols).map(|_| rng.gen_range(1..=max_values)).collect();
    let source: Vec<Option<usize>> = (0..cols)
        .map(|c| (c > 0 && rng.gen_bool(0.35)).then(|| rng.gen_range(0..c)))
        .collect();
    let na_rate = rng.gen_range(0.0..0.15);
    let mut data = vec![vec![None; cols]; rows];
    for row in data.iter_mut() {
        for c in 0..cols {
            if rng.gen_bool(na_rate) {
                continue;
            }
            let v = match source[c] {
                Some(s) if rng.gen_bool(0.85) => row[s]
                    .map(|ch: char| ALPHABET.iter().position(|&a| a == ch).unwrap() % values[c]),
                _ => Some(rng.gen_range(0..values[c])),
            };
            row[c] = v.map(|i| ALPHABET[i]);
        }
    }
    let names = (0..cols).map(|i| format!("c{i}")).collect();
    DataTable::new(names, data).unwrap()
}

/// Exact rational `num/den` with `den > 0`.
#[derive(Debug, Clone, Copy)]
pub struct Q(pub i128, pub i128);

impl Q {
    /// The decimal a user would have typed for `x` (its shortest round-trip
    /// spelling), as an exact fraction: 0.8 becomes 4/5.
    pub fn from_decimal(x: f64) -> Q {
        let text = format!("{x}");
        assert!(!text.contains('e'), "threshold {x} needs plain decimal notation");
        let (neg, digits) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text.as_str()),
        };
        let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
        let den = 10i128.pow(frac.len() as u32);
        let num = int.parse::<i128>().unwrap() * den + frac.parse::<i128>().unwrap_or(0);
        Q(if neg { -num } else { num }, den)
    }

    pub fn ge(self, other: Q) -> bool {
        self.0 * other.1 >= other.0 * self.1
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / self.1 as f64
    }
}

/// Thresholds as plain numbers, so the oracle never touches library types.
#[derive(Debug, Clone, Copy)]
pub struct OracleThresholds {
    pub min_support: u64,
    pub min_confidence: f64,
    pub min_lift: f64,
    pub min_leverage: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleRule {
    pub text: String,
    pub support: u64,
    pub lhs_support: u64,
    pub rhs_support: u64,
    /// Ratios straight from the textbook formulas in double precision.
    pub confidence: f64,
    pub lift: f64,
    pub leverage: f64,
}

fn render(names: &[String], clauses: &[Vec<(usize, Vec<char>)>], rhs: (usize, char)) -> String {
    let eq = |c: usize, v: &[char]| format!("{}={}", names[c], v.iter().collect::<String>());
    let lhs: Vec<String> = clauses
        .iter()
        .map(|cl| {
            if cl.len() == 1 {
                eq(cl[0].0, &cl[0].1)
            } else {
                let parts: Vec<String> = cl.iter().map(|(c, v)| eq(*c, v)).collect();
                format!("({})", parts.join(" OR "))
            }
        })
        .collect();
    format!("{} -> {}", lhs.join(" AND "), eq(rhs.0, &[rhs.1]))
}

fn subsets(dict: &[char], max: usize) -> Vec<Vec<char>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << dict.len()) {
        if mask.count_ones() as usize <= max {
            out.push((0..dict.len()).filter(|i| mask >> i & 1 == 1).map(|i| dict[i]).collect());
        }
    }
    out
}

fn permutations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        let mut rest = items.to_vec();
        rest.remove(i);
        for mut p in permutations(&rest, k - 1) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

fn dictionary(t: &DataTable, c: usize) -> Vec<char> {
    let mut d: Vec<char> = t.rows().iter().filter_map(|r| r[c]).collect();
    d.sort_unstable();
    d.dedup();
    d
}

/// Every rule the pattern admits, filled by exhaustive nested loops over
/// ordered column assignments and value subsets, deduplicated by a sorted key
/// and scored by scanning rows. `widths` lists the pattern's OR-group sizes.
pub fn brute_force(
    t: &DataTable,
    widths: &[usize],
    max_set: usize,
    th: &OracleThresholds,
    lhs_allowed: Option<&[usize]>,
    rhs_allowed: Option<&[usize]>,
) -> Vec<OracleRule> {
    let n = t.n_rows();
    let cols: Vec<usize> = (0..t.n_columns()).collect();
    let dicts: Vec<Vec<char>> = cols.iter().map(|&c| dictionary(t, c)).collect();
    let blanks: usize = widths.iter().sum();
    let mut out = Vec::new();
    for &rc in rhs_allowed.unwrap_or(&cols) {
        for &rv in &dicts[rc] {
            let rhs_rows: Vec<bool> = t.rows().iter().map(|r| r[rc] == Some(rv)).collect();
            let r = rhs_rows.iter().filter(|&&b| b).count() as u64;
            let lhs_cols: Vec<usize> = lhs_allowed
                .unwrap_or(&cols)
                .iter()
                .copied()
                .filter(|&c| c != rc)
                .collect();
            let mut seen = HashSet::new();
            for perm in permutations(&lhs_cols, blanks) {
                let choices: Vec<Vec<Vec<char>>> = perm.iter().map(|&c| subsets(&dicts[c], max_set)).collect();
                if choices.iter().any(Vec::is_empty) {
                    continue;
                }
                let mut idx = vec![0usize; blanks];
                'product: loop {
                    // Assemble clauses in pattern order, then sort to a key.
                    let mut clauses: Vec<Vec<(usize, Vec<char>)>> = Vec::new();
                    let mut b = 0;
                    for &w in widths {
                        let mut cl: Vec<(usize, Vec<char>)> =
                            (0..w).map(|k| (perm[b + k], choices[b + k][idx[b + k]].clone())).collect();
                        cl.sort();
                        clauses.push(cl);
                        b += w;
                    }
                    clauses.sort_by(|x, y| (x.len(), x[0].0).cmp(&(y.len(), y[0].0)));
                    if seen.insert(clauses.clone()) {
                        let mut s = 0u64;
                        let mut l = 0u64;
                        for (row, rhs_true) in t.rows().iter().zip(&rhs_rows) {
                            let lhs_true = clauses.iter().all(|cl| {
                                cl.iter().any(|(c, vs)| row[*c].is_some_and(|x| vs.contains(&x)))
                            });
                            if lhs_true {
                                l += 1;
                                if *rhs_true {
                                    s += 1;
                                }
                            }
                        }
                        if l > 0 && accept(s, l, r, n as u64, th) {
                            let (sf, lf, rf, nf) = (s as f64, l as f64, r as f64, n as f64);
                            out.push(OracleRule {
                                text: render(t.columns(), &clauses, (rc, rv)),
                                support: s,
                                lhs_support: l,
                                rhs_support: r,
                                confidence: sf / lf,
                                lift: (sf / nf) / ((lf / nf) * (rf / nf)),
                                leverage: sf / nf - (lf / nf) * (rf / nf),
                            });
                        }
                    }
                    // advance the mixed-radix counter
                    let mut k = blanks;
                    loop {
                        if k == 0 {
                            break 'product;
                        }
                        k -= 1;
                        idx[k] += 1;
                        if idx[k] < choices[k].len() {
                            break;
                        }
                        idx[k] = 0;
                    }
                }
            }
        }
    }
    out.sort_by(|a, b| a.text.cmp(&b.text));
    out
}

/// Threshold test in exact rational arithmetic against the decimal thresholds.
fn accept(s: u64, l: u64, r: u64, n: u64, th: &OracleThresholds) -> bool {
    let (s, l, r, n) = (s as i128, l as i128, r as i128, n as i128);
    s >= th.min_support.max(1) as i128
        && Q(s, l).ge(Q::from_decimal(th.min_confidence))
        && Q(s * n, l * r).ge(Q::from_decimal(th.min_lift))
        && Q(s * n - l * r, n * n).ge(Q::from_decimal(th.min_leverage))
}

/// Rows where a rule's left-hand side holds, evaluated one row at a time.
pub fn lhs_rows(t: &DataTable, clauses: &[Vec<(usize, Vec<char>)>]) -> Vec<usize> {
    (0..t.n_rows())
        .filter(|&r| {
            clauses
                .iter()
                .all(|cl| cl.iter().any(|(c, vs)| t.cell(r, *c).is_some_and(|x| vs.contains(&x))))
        })
        .collect()
}

/// Convenience: group oracle rules by text.
pub fn by_text(rules: &[OracleRule]) -> BTreeMap<String, OracleRule> {
    rules.iter().map(|r| (r.text.clone(), r.clone())).collect()
}
