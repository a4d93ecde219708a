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

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuDotError {
    #[error("invalid size: a net needs at least one qubit")]
    InvalidSize,
    #[error("qubit {qubit} out of range for a {n}-qubit net")]
    InvalidQubit { qubit: usize, n: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid circuit: {0}")]
    InvalidCircuit(String),
    #[error("corrupt net: {0}")]
    CorruptNet(String),
    #[error("{n} qubits exceeds the limit of {limit}")]
    SizeLimit { n: usize, limit: usize },
    #[error("measurement is unsupported on a net with {labels} active branch labels")]
    UnsupportedOnCoherentState { labels: usize },
    #[error("op {index}: {source}")]
    AtOp {
        index: usize,
        #[source]
        source: Box<QuDotError>,
    },
}

impl QuDotError {
    pub(crate) fn at_op(self, index: usize) -> Self {
        QuDotError::AtOp {
            index,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, QuDotError>;
