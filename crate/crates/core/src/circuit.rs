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

//! Circuits, terminal-discipline validation, QFT builders, execution and
//! shot ensembles.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitstring::Bitstring;
use crate::error::{QuDotError, Result};
use crate::gates::{PhaseK, SingleQubitGate};
use crate::net::QuDotNet;

/// Identifier of the pseudo-random generator behind every seeded run.
pub const RNG_ALGORITHM: &str = "chacha8-stream-per-shot";

/// One step of a circuit. Qubits are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateOp {
    Single {
        gate: SingleQubitGate,
        qubit: usize,
    },
    Measure {
        qubit: usize,
    },
    /// Whole-register bit reversal.
    SwapAll,
    /// Measure `control`, apply `gate` to `target` on a 1.
    SemiControl {
        gate: SingleQubitGate,
        control: usize,
        target: usize,
    },
    CoherentControl {
        gate: SingleQubitGate,
        control: usize,
        target: usize,
    },
    /// Semi-quantum QFT over the whole register, see [`build_qft`].
    Qft,
    /// Semi-quantum inverse QFT over the whole register, see [`build_iqft`].
    Iqft,
}

impl GateOp {
    pub fn x(qubit: usize) -> Self {
        GateOp::Single {
            gate: SingleQubitGate::X,
            qubit,
        }
    }

    pub fn h(qubit: usize) -> Self {
        GateOp::Single {
            gate: SingleQubitGate::H,
            qubit,
        }
    }

    pub fn rk(qubit: usize, k: u32) -> Self {
        GateOp::Single {
            gate: SingleQubitGate::R(PhaseK(k)),
            qubit,
        }
    }

    pub fn m(qubit: usize) -> Self {
        GateOp::Measure { qubit }
    }

    pub fn scu(gate: SingleQubitGate, control: usize, target: usize) -> Self {
        GateOp::SemiControl {
            gate,
            control,
            target,
        }
    }

    pub fn ccu(gate: SingleQubitGate, control: usize, target: usize) -> Self {
        GateOp::CoherentControl {
            gate,
            control,
            target,
        }
    }

    fn check(&self, n: usize) -> Result<()> {
        let in_range = |q: usize| {
            if q == 0 || q > n {
                Err(QuDotError::InvalidQubit { qubit: q, n })
            } else {
                Ok(())
            }
        };
        match *self {
            GateOp::Single { qubit, .. } | GateOp::Measure { qubit } => in_range(qubit),
            GateOp::SemiControl {
                control, target, ..
            }
            | GateOp::CoherentControl {
                control, target, ..
            } => {
                in_range(control)?;
                in_range(target)?;
                if control == target {
                    Err(QuDotError::InvalidCircuit(format!(
                        "control and target are both qubit {control}"
                    )))
                } else {
                    Ok(())
                }
            }
            GateOp::SwapAll | GateOp::Qft | GateOp::Iqft => Ok(()),
        }
    }

    /// Applies a non-macro op, returning the measured bit if there is one.
    pub fn apply<R: Rng + ?Sized>(&self, net: &mut QuDotNet, rng: &mut R) -> Result<Option<bool>> {
        match *self {
            GateOp::Single { gate, qubit } => net.apply_single(gate, qubit).map(|_| None),
            GateOp::Measure { qubit } => net.apply_m(qubit, rng).map(Some),
            GateOp::SwapAll => {
                net.apply_swap();
                Ok(None)
            }
            GateOp::SemiControl {
                gate,
                control,
                target,
            } => net.apply_semi_control(control, target, gate, rng).map(Some),
            GateOp::CoherentControl {
                gate,
                control,
                target,
            } => net.apply_coherent_control(control, target, gate).map(|_| None),
            GateOp::Qft | GateOp::Iqft => Err(QuDotError::InvalidCircuit(
                "QFT macros must be expanded before application".into(),
            )),
        }
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateOp::Single { gate, qubit } => match gate {
                SingleQubitGate::X => write!(f, "x {qubit}"),
                SingleQubitGate::H => write!(f, "h {qubit}"),
                SingleQubitGate::R(k) => write!(f, "rk {qubit} {}", k.0),
                SingleQubitGate::RInv(k) => write!(f, "rkdg {qubit} {}", k.0),
            },
            GateOp::Measure { qubit } => write!(f, "m {qubit}"),
            GateOp::SwapAll => f.write_str("swap"),
            GateOp::SemiControl {
                gate,
                control,
                target,
            } => write!(f, "scu {gate} {control} {target}"),
            GateOp::CoherentControl {
                gate,
                control,
                target,
            } => write!(f, "ccu {gate} {control} {target}"),
            GateOp::Qft => f.write_str("qft"),
            GateOp::Iqft => f.write_str("iqft"),
        }
    }
}

/// Phase sign used by the inverse QFT's controlled rotations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum IqftPhases {
    /// `R(k)` with conjugated phase; makes the IQFT the inverse of the QFT.
    #[default]
    Conjugate,
    /// Plain `R(k)` as drawn in the usual semi-quantum IQFT diagram.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Circuit {
    n: usize,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(QuDotError::InvalidSize);
        }
        Ok(Circuit { n, ops: Vec::new() })
    }

    pub fn from_ops(n: usize, ops: impl IntoIterator<Item = GateOp>) -> Result<Self> {
        let mut c = Circuit::new(n)?;
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    /// Appends `op` after checking operand ranges and `control != target`.
    pub fn push(&mut self, op: GateOp) -> Result<()> {
        op.check(self.n)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Ops with QFT macros inlined, each tagged with the 1-based index of the
    /// op it came from.
    pub fn expanded(&self) -> Vec<(usize, GateOp)> {
        let mut out = Vec::with_capacity(self.ops.len());
        for (i, op) in self.ops.iter().enumerate() {
            match op {
                GateOp::Qft => out.extend(qft_ops(self.n).map(|o| (i + 1, o))),
                GateOp::Iqft => {
                    out.extend(iqft_ops(self.n, IqftPhases::default()).map(|o| (i + 1, o)))
                }
                other => out.push((i + 1, *other)),
            }
        }
        out
    }

    /// Same circuit with every semi-quantum control made coherent and every
    /// measurement dropped. For a terminal circuit its final-state
    /// distribution equals the original's outcome distribution.
    pub fn deferred(&self) -> Circuit {
        let ops = self
            .expanded()
            .into_iter()
            .filter_map(|(_, op)| match op {
                GateOp::Measure { .. } => None,
                GateOp::SemiControl {
                    gate,
                    control,
                    target,
                } => Some(GateOp::ccu(gate, control, target)),
                other => Some(other),
            })
            .collect();
        Circuit { n: self.n, ops }
    }

    /// Collects every terminal-discipline violation. Once a qubit has been
    /// measured or used as a semi-quantum control it may only be measured
    /// again or serve as a semi-quantum control.
    pub fn validate(&self) -> Vec<Violation> {
        let mut classical = vec![false; self.n + 1];
        let mut violations = Vec::new();
        let mut flag = |index: usize, qubit: usize, op: &GateOp| {
            violations.push(Violation {
                op_index: index,
                qubit,
                op: op.to_string(),
            })
        };
        for (index, op) in self.expanded() {
            match op {
                GateOp::Single { qubit, .. } => {
                    if classical[qubit] {
                        flag(index, qubit, &op);
                    }
                }
                GateOp::Measure { qubit } => classical[qubit] = true,
                GateOp::SwapAll => classical[1..].reverse(),
                GateOp::SemiControl {
                    control, target, ..
                } => {
                    if classical[target] {
                        flag(index, target, &op);
                    }
                    classical[control] = true;
                }
                GateOp::CoherentControl {
                    control, target, ..
                } => {
                    for q in [control, target] {
                        if classical[q] {
                            flag(index, q, &op);
                        }
                    }
                }
                GateOp::Qft | GateOp::Iqft => unreachable!("expanded"),
            }
        }
        violations
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// 1-based index into [`Circuit::ops`].
    pub op_index: usize,
    pub qubit: usize,
    pub op: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "op {} ({}): qubit {} is classical after a measurement or semi-quantum control",
            self.op_index, self.op, self.qubit
        )
    }
}

fn qft_ops(n: usize) -> impl Iterator<Item = GateOp> {
    let body = (1..=n).flat_map(move |i| {
        std::iter::once(GateOp::h(i))
            .chain((i + 1..=n).map(move |j| GateOp::scu(SingleQubitGate::r((j - i + 1) as u32), i, j)))
    });
    body.chain(std::iter::once(GateOp::SwapAll))
        .chain((1..=n).map(GateOp::m))
}

fn iqft_ops(n: usize, phases: IqftPhases) -> impl Iterator<Item = GateOp> {
    let rotation = move |k: u32| match phases {
        IqftPhases::Conjugate => SingleQubitGate::RInv(PhaseK(k)),
        IqftPhases::Literal => SingleQubitGate::R(PhaseK(k)),
    };
    let body = (1..=n).rev().flat_map(move |i| {
        (i + 1..=n)
            .rev()
            .map(move |j| GateOp::scu(rotation((j - i + 1) as u32), j, i))
            .chain(std::iter::once(GateOp::h(i)))
    });
    std::iter::once(GateOp::SwapAll)
        .chain(body)
        .chain((1..=n).map(GateOp::m))
}

/// Semi-quantum QFT: for each qubit `i`, `H(i)` followed by `R(j - i + 1)`
/// on every later qubit `j` classically controlled by `i`; then the
/// register-wide SWAP and a measurement of every qubit.
pub fn build_qft(n: usize) -> Result<Circuit> {
    let mut c = Circuit::new(n)?;
    c.ops.extend(qft_ops(n));
    Ok(c)
}

pub fn build_iqft(n: usize) -> Result<Circuit> {
    build_iqft_with(n, IqftPhases::default())
}

/// Semi-quantum inverse QFT: the SWAP first, then the QFT's rotations in
/// mirrored order with controls on the later qubit, then measurements.
pub fn build_iqft_with(n: usize, phases: IqftPhases) -> Result<Circuit> {
    let mut c = Circuit::new(n)?;
    c.ops.extend(iqft_ops(n, phases));
    Ok(c)
}

/// Two Hadamards on a 4-qubit register, giving an equal superposition of
/// four basis states.
pub fn prepare_test_state(a: usize, b: usize) -> Result<Circuit> {
    if a == b {
        return Err(QuDotError::InvalidInput(format!("qubit {a} named twice")));
    }
    Circuit::from_ops(4, [GateOp::h(a), GateOp::h(b)])
        .map_err(|e| QuDotError::InvalidInput(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementEvent {
    pub op_index: usize,
    pub qubit: usize,
    pub bit: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub net: QuDotNet,
    pub record: Vec<MeasurementEvent>,
}

/// Runs `circuit` on a fresh ground-state net.
pub fn execute<R: Rng + ?Sized>(circuit: &Circuit, rng: &mut R) -> Result<Execution> {
    let mut net = QuDotNet::new_ground_state(circuit.qubits())?;
    let record = execute_on(&mut net, circuit, rng)?;
    Ok(Execution { net, record })
}

/// Validates `circuit` and applies it to an existing net.
pub fn execute_on<R: Rng + ?Sized>(
    net: &mut QuDotNet,
    circuit: &Circuit,
    rng: &mut R,
) -> Result<Vec<MeasurementEvent>> {
    if circuit.qubits() != net.qubits() {
        return Err(QuDotError::InvalidCircuit(format!(
            "{}-qubit circuit on a {}-qubit net",
            circuit.qubits(),
            net.qubits()
        )));
    }
    let violations = circuit.validate();
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(Violation::to_string).collect();
        return Err(QuDotError::InvalidCircuit(list.join("; ")));
    }
    let mut record = Vec::new();
    for (index, op) in circuit.expanded() {
        if let Some(bit) = op.apply(net, rng).map_err(|e| e.at_op(index))? {
            let qubit = match op {
                GateOp::Measure { qubit } => qubit,
                GateOp::SemiControl { control, .. } => control,
                _ => unreachable!("only measurements yield bits"),
            };
            record.push(MeasurementEvent {
                op_index: index,
                qubit,
                bit,
            });
        }
    }
    Ok(record)
}

/// Outcome counts of an ensemble.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Distribution {
    pub counts: BTreeMap<Bitstring, u64>,
    pub shots: u64,
}

impl Distribution {
    pub fn record(&mut self, outcome: Bitstring) {
        *self.counts.entry(outcome).or_insert(0) += 1;
        self.shots += 1;
    }

    pub fn merge(mut self, other: Distribution) -> Distribution {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
        self.shots += other.shots;
        self
    }

    pub fn frequency(&self, outcome: &Bitstring) -> f64 {
        self.counts.get(outcome).copied().unwrap_or(0) as f64 / self.shots as f64
    }

    pub fn frequencies(&self) -> BTreeMap<Bitstring, f64> {
        self.counts
            .iter()
            .map(|(k, &v)| (k.clone(), v as f64 / self.shots as f64))
            .collect()
    }
}

/// Generator for shot `shot` of a run seeded with `seed`: one ChaCha8
/// stream per shot, so results do not depend on how shots are scheduled.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// How an ensemble reads the final net of each shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Sampler {
    /// [`QuDotNet::traverse`]: pick a label by root mass, walk within it.
    #[default]
    Traverse,
    /// [`QuDotNet::sample_exact`]: Born rule on the summed amplitudes.
    Exact,
}

/// Runs `shots` independent prepare-execute-traverse rounds, each on a
/// fresh net, and tallies the traversed outcomes.
pub fn ensemble_run(
    prep: &Circuit,
    main: &Circuit,
    shots: u64,
    seed: u64,
    workers: usize,
) -> Result<Distribution> {
    ensemble_run_with(prep, main, shots, seed, workers, Sampler::Traverse)
}

/// [`ensemble_run`] with a choice of final sampler.
pub fn ensemble_run_with(
    prep: &Circuit,
    main: &Circuit,
    shots: u64,
    seed: u64,
    workers: usize,
    sampler: Sampler,
) -> Result<Distribution> {
    if shots == 0 {
        return Err(QuDotError::InvalidInput("shots must be at least 1".into()));
    }
    if prep.qubits() != main.qubits() {
        return Err(QuDotError::InvalidCircuit(format!(
            "preparation acts on {} qubits, main circuit on {}",
            prep.qubits(),
            main.qubits()
        )));
    }
    let run_shot = |shot: u64| -> Result<Bitstring> {
        let mut rng = shot_rng(seed, shot);
        let mut net = QuDotNet::new_ground_state(main.qubits())?;
        execute_on(&mut net, prep, &mut rng)?;
        execute_on(&mut net, main, &mut rng)?;
        match sampler {
            Sampler::Traverse => net.traverse(&mut rng),
            Sampler::Exact => net.sample_exact(&mut rng),
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| QuDotError::InvalidInput(format!("worker pool: {e}")))?;
    pool.install(|| {
        (0..shots)
            .into_par_iter()
            .try_fold(Distribution::default, |mut acc, shot| {
                acc.record(run_shot(shot)?);
                Ok(acc)
            })
            .try_reduce(Distribution::default, |a, b| Ok(a.merge(b)))
    })
}
