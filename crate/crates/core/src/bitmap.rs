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

//! Fixed-length row bitmaps packed into 64-bit words.
//!
//! Every rule evaluation in the miner reduces to AND/OR over these vectors
//! followed by a popcount, so one machine word covers 64 table rows.

use std::fmt;

const WORD_BITS: usize = 64;

/// A bit per table row, padded to whole words. Padding bits are always zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Bitmap {
    words: Vec<u64>,
    len: usize,
}

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

impl Bitmap {
    /// All-zero bitmap over `len` rows.
    pub fn zeros(len: usize) -> Self {
        Bitmap {
            words: vec![0; words_for(len)],
            len,
        }
    }

    /// All-one bitmap over `len` rows (padding stays clear).
    pub fn ones(len: usize) -> Self {
        let mut bm = Bitmap {
            words: vec![u64::MAX; words_for(len)],
            len,
        };
        bm.clear_padding();
        bm
    }

    pub fn from_rows<I: IntoIterator<Item = usize>>(len: usize, rows: I) -> Self {
        let mut bm = Bitmap::zeros(len);
        for r in rows {
            bm.set(r);
        }
        bm
    }

    /// Number of rows covered.
    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, row: usize) -> bool {
        assert!(row < self.len, "row {row} out of range for {} rows", self.len);
        self.words[row / WORD_BITS] >> (row % WORD_BITS) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, row: usize) {
        assert!(row < self.len, "row {row} out of range for {} rows", self.len);
        self.words[row / WORD_BITS] |= 1 << (row % WORD_BITS);
    }

    /// Number of set bits.
    #[inline]
    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// `popcount(self AND other)` without materializing the intersection.
    #[inline]
    pub fn and_count(&self, other: &Bitmap) -> u64 {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| u64::from((a & b).count_ones()))
            .sum()
    }

    /// `popcount(self AND other AND third)`.
    #[inline]
    pub fn and3_count(&self, other: &Bitmap, third: &Bitmap) -> u64 {
        debug_assert_eq!(self.len, other.len);
        debug_assert_eq!(self.len, third.len);
        self.words
            .iter()
            .zip(&other.words)
            .zip(&third.words)
            .map(|((a, b), c)| u64::from((a & b & c).count_ones()))
            .sum()
    }

    pub fn and_assign(&mut self, other: &Bitmap) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn or_assign(&mut self, other: &Bitmap) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Overwrite `self` with `a AND b`, reusing the allocation.
    pub fn assign_and(&mut self, a: &Bitmap, b: &Bitmap) {
        debug_assert_eq!(a.len, b.len);
        self.len = a.len;
        self.words.clear();
        self.words
            .extend(a.words.iter().zip(&b.words).map(|(x, y)| x & y));
    }

    /// Overwrite `self` with a copy of `src`, reusing the allocation.
    pub fn assign(&mut self, src: &Bitmap) {
        self.len = src.len;
        self.words.clear();
        self.words.extend_from_slice(&src.words);
    }

    pub fn and(&self, other: &Bitmap) -> Bitmap {
        let mut out = self.clone();
        out.and_assign(other);
        out
    }

    pub fn or(&self, other: &Bitmap) -> Bitmap {
        let mut out = self.clone();
        out.or_assign(other);
        out
    }

    /// `self AND NOT other`.
    pub fn and_not(&self, other: &Bitmap) -> Bitmap {
        debug_assert_eq!(self.len, other.len);
        Bitmap {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & !b)
                .collect(),
            len: self.len,
        }
    }

    /// Complement within `len` rows.
    pub fn not(&self) -> Bitmap {
        let mut out = Bitmap {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        out.clear_padding();
        out
    }

    /// Indices of set rows, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(i * WORD_BITS + bit)
            })
        })
    }

    /// True when every bit past `len` is zero.
    pub fn padding_is_clear(&self) -> bool {
        let tail = self.len % WORD_BITS;
        match self.words.last() {
            Some(&last) if tail != 0 => last >> tail == 0,
            _ => true,
        }
    }

    fn clear_padding(&mut self) {
        let tail = self.len % WORD_BITS;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }
}

impl fmt::Debug for Bitmap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Bitmap")
            .field("len", &self.len)
            .field("ones", &self.iter_ones().collect::<Vec<_>>())
            .finish()
    }
}
