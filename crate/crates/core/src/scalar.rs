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

//! Scalar types that rule metrics can be computed in.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, ToPrimitive};

/// A number type for metric ratios.
///
/// `from_ratio` must return the value of `num / den` after a single rounding
/// step (or exactly, for rational types). That keeps every metric a monotone
/// function of its exact value, which the miner's bound tests rely on.
pub trait Scalar:
    Num + Copy + PartialOrd + Debug + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn from_ratio(num: i128, den: u128) -> Self;

    fn from_count(count: u64) -> Self {
        Self::from_ratio(i128::from(count), 1)
    }
}

impl Scalar for f64 {
    fn from_ratio(num: i128, den: u128) -> Self {
        // Exact for operands below 2^53, so the quotient is rounded once.
        num as f64 / den as f64
    }
}

impl Scalar for f32 {
    fn from_ratio(num: i128, den: u128) -> Self {
        (num as f64 / den as f64) as f32
    }
}

impl Scalar for Ratio<i64> {
    fn from_ratio(num: i128, den: u128) -> Self {
        let g = gcd(num.unsigned_abs(), den);
        let (num, den) = (num / g as i128, den / g);
        Ratio::new(
            i64::try_from(num).expect("metric numerator overflows i64"),
            i64::try_from(den).expect("metric denominator overflows i64"),
        )
    }
}

impl Scalar for Ratio<i128> {
    fn from_ratio(num: i128, den: u128) -> Self {
        Ratio::new(num, i128::try_from(den).expect("metric denominator overflows i128"))
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}
