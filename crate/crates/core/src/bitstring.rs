// Copyright 2026 The QuDot Developers
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::QuDotError;

/// A computational basis outcome, one bit per qubit.
///
/// Bit `i` (1-based) belongs to qubit `i`; renderings put qubit 1 leftmost,
/// so `"011"` means qubit 1 reads 0 and qubits 2 and 3 read 1. The derived
/// ordering is lexicographic, which for equal lengths is numeric order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Bitstring(Vec<bool>);

impl Bitstring {
    pub fn new(bits: Vec<bool>) -> Self {
        Bitstring(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Bitstring(vec![false; n])
    }

    /// Decode a dense-vector index where qubit 1 is the most significant bit.
    pub fn from_index(index: usize, n: usize) -> Self {
        Bitstring((0..n).map(|i| (index >> (n - 1 - i)) & 1 == 1).collect())
    }

    /// Inverse of [`Bitstring::from_index`]. Only meaningful for `len() < usize::BITS`.
    pub fn to_index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Bit of qubit `q` (1-based).
    pub fn bit(&self, q: usize) -> bool {
        self.0[q - 1]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn reversed(&self) -> Self {
        Bitstring(self.0.iter().rev().copied().collect())
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for Bitstring {
    type Err = QuDotError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(QuDotError::InvalidInput(format!(
                    "bitstring contains '{other}'"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Bitstring)
    }
}

impl From<Vec<bool>> for Bitstring {
    fn from(bits: Vec<bool>) -> Self {
        Bitstring(bits)
    }
}

impl Serialize for Bitstring {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bitstring {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
