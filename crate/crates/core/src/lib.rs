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

//! QuDot Nets: a path-weighted network representation of n-qubit states,
//! with gates, measurement, SWAP, controlled operations, a circuit layer
//! and a dense reference simulator for checking results.

pub mod bitstring;
pub mod circuit;
pub mod error;
pub mod gates;
pub mod net;
pub mod oracle;
pub mod reference;

pub use bitstring::Bitstring;
pub use circuit::{
    build_iqft, build_iqft_with, build_qft, ensemble_run, ensemble_run_with, execute, execute_on,
    prepare_test_state, shot_rng, Circuit, Distribution, Execution, GateOp, IqftPhases,
    MeasurementEvent, Sampler, Violation, RNG_ALGORITHM,
};
pub use error::{QuDotError, Result};
pub use gates::{MeasureRule, Measurement, PhaseK, SingleQubitGate};
pub use net::{
    Amplitude, BranchLabel, Edge, NodeRef, Orientation, QuDotNet, Side, EPS, EXACT_SAMPLER_BUDGET,
    MAX_ENUM_QUBITS, NORM_TOL,
};
