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

//! Reference QFT output distributions for the six two-Hadamard test states.

// Digits kept exactly as tabulated.
#![allow(clippy::excessive_precision)]

/// A test state: its name and the two qubits that receive a Hadamard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestState {
    pub name: &'static str,
    pub hadamards: (usize, usize),
    /// Nonzero QFT outcome probabilities, outcome strings with qubit 1 first.
    pub qft_distribution: &'static [(&'static str, f64)],
}

pub const QFT_TEST_STATES: [TestState; 6] = [
    TestState {
        name: "qft12",
        hadamards: (1, 2),
        qft_distribution: &[
            ("0000", 0.24999999999999972),
            ("0100", 0.24999999999999972),
            ("1000", 0.24999999999999972),
            ("1100", 0.24999999999999972),
        ],
    },
    TestState {
        name: "qft13",
        hadamards: (1, 3),
        qft_distribution: &[
            ("0000", 0.24999999999999972),
            ("0010", 0.12499999999999988),
            ("0110", 0.12499999999999985),
            ("1000", 0.24999999999999972),
            ("1010", 0.12499999999999988),
            ("1110", 0.12499999999999985),
        ],
    },
    TestState {
        name: "qft14",
        hadamards: (1, 4),
        qft_distribution: &[
            ("0000", 0.24999999999999972),
            ("0010", 0.21338834764831818),
            ("0100", 0.12499999999999988),
            ("0110", 0.03661165235168154),
            ("1010", 0.03661165235168150),
            ("1100", 0.12499999999999985),
            ("1110", 0.21338834764831816),
        ],
    },
    TestState {
        name: "qft23",
        hadamards: (2, 3),
        qft_distribution: &[
            ("0000", 0.24999999999999972),
            ("0001", 0.10669417382415913),
            ("0011", 0.01830582617584076),
            ("0101", 0.01830582617584075),
            ("0111", 0.10669417382415908),
            ("1000", 0.24999999999999972),
            ("1001", 0.10669417382415913),
            ("1011", 0.01830582617584076),
            ("1101", 0.01830582617584075),
            ("1111", 0.10669417382415908),
        ],
    },
    TestState {
        name: "qft24",
        hadamards: (2, 4),
        qft_distribution: &[
            ("0000", 0.24999999999999972),
            ("0001", 0.12024247078195528),
            ("0011", 0.08641771452281801),
            ("0100", 0.12499999999999988),
            ("0101", 0.03858228547718185),
            ("0111", 0.00475752921804457),
            ("1001", 0.00475752921804457),
            ("1011", 0.03858228547718183),
            ("1100", 0.12499999999999985),
            ("1101", 0.08641771452281801),
            ("1111", 0.12024247078195528),
        ],
    },
    TestState {
        name: "qft34",
        hadamards: (3, 4),
        qft_distribution: &[
            ("0000", 0.24999999999999972),
            ("0001", 0.20526673725850120),
            ("0010", 0.10669417382415913),
            ("0011", 0.02531116256909020),
            ("0101", 0.01130048978259131),
            ("0110", 0.01830582617584077),
            ("0111", 0.00812161038981702),
            ("1001", 0.00812161038981702),
            ("1010", 0.01830582617584075),
            ("1011", 0.01130048978259130),
            ("1101", 0.02531116256909020),
            ("1110", 0.10669417382415908),
            ("1111", 0.20526673725850114),
        ],
    },
];

pub fn test_state(name: &str) -> Option<&'static TestState> {
    QFT_TEST_STATES.iter().find(|s| s.name == name)
}
