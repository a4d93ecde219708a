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

//! The net agrees with the dense simulator on random circuits.

use proptest::prelude::*;
use qudot_core::oracle::{fidelity, qudot_to_dense, random_circuit, DenseState, GateFamily};
use qudot_core::{execute, shot_rng, Circuit, GateOp, QuDotNet, SingleQubitGate, NORM_TOL};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dense_of(c: &Circuit) -> DenseState {
    let mut d = DenseState::ground(c.qubits()).unwrap();
    d.run(c, &mut shot_rng(0, 0)).unwrap();
    d
}

fn net_of(c: &Circuit) -> QuDotNet {
    execute(c, &mut shot_rng(0, 0)).unwrap().net
}

fn unitary_op(n: usize) -> impl Strategy<Value = GateOp> {
    let q = 1..=n;
    prop_oneof![
        q.clone().prop_map(GateOp::x),
        q.clone().prop_map(GateOp::h),
        (q, 0u32..6).prop_map(|(q, k)| GateOp::rk(q, k)),
    ]
}

fn gate() -> impl Strategy<Value = SingleQubitGate> {
    prop_oneof![
        Just(SingleQubitGate::X),
        Just(SingleQubitGate::H),
        (1u32..5).prop_map(SingleQubitGate::r),
    ]
}

fn circuit_with_controls(n: usize) -> impl Strategy<Value = Circuit> {
    let step = prop_oneof![
        4 => unitary_op(n),
        1 => (gate(), 1..=n, 1..n).prop_map(move |(g, c, off)| {
            GateOp::ccu(g, c, (c - 1 + off) % n + 1)
        }),
        1 => Just(GateOp::SwapAll),
    ];
    prop::collection::vec(step, 0..25).prop_map(move |ops| Circuit::from_ops(n, ops).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn unitary_circuits_match_dense(n in 1usize..8, len in 0usize..50, seed: u64) {
        let c = random_circuit(n, len, &GateFamily::ALL, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let net = net_of(&c);
        net.check_invariants().unwrap();
        prop_assert!(fidelity(&qudot_to_dense(&net).unwrap(), &dense_of(&c)).unwrap() >= 1.0 - 1e-9);
        prop_assert_eq!(net.label_count(), 1);
        prop_assert_eq!(net.edge_count(), 4 * n - 2);
    }

    #[test]
    fn coherent_controls_match_dense(c in (2usize..6).prop_flat_map(circuit_with_controls)) {
        let net = net_of(&c);
        net.check_invariants().unwrap();
        let controls = c.ops().iter().filter(|op| matches!(op, GateOp::CoherentControl { .. })).count();
        prop_assert!(net.label_count() <= 1 << controls);
        let mass: f64 = net.label_masses().iter().map(|(_, m)| m).sum();
        prop_assert!((mass - 1.0).abs() < NORM_TOL);
        prop_assert!(fidelity(&qudot_to_dense(&net).unwrap(), &dense_of(&c)).unwrap() >= 1.0 - 1e-9);
    }

    #[test]
    fn involutions(n in 1usize..7, len in 0usize..20, seed: u64, q in 1usize..7) {
        let q = q.min(n);
        let base = random_circuit(n, len, &GateFamily::ALL, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let before = qudot_to_dense(&net_of(&base)).unwrap();
        for pair in [[GateOp::x(q), GateOp::x(q)], [GateOp::h(q), GateOp::h(q)]] {
            let mut c = base.clone();
            for op in pair {
                c.push(op).unwrap();
            }
            prop_assert!(fidelity(&before, &qudot_to_dense(&net_of(&c)).unwrap()).unwrap() >= 1.0 - 1e-12);
        }
        let mut c = base.clone();
        c.push(GateOp::SwapAll).unwrap();
        c.push(GateOp::SwapAll).unwrap();
        prop_assert_eq!(net_of(&c), net_of(&base));
    }

    #[test]
    fn phase_power_is_identity(n in 1usize..5, len in 0usize..15, seed: u64, k in 0u32..5) {
        let base = random_circuit(n, len, &GateFamily::ALL, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let before = qudot_to_dense(&net_of(&base)).unwrap();
        let mut c = base.clone();
        for _ in 0..1u32 << k {
            c.push(GateOp::rk(1, k)).unwrap();
        }
        let after = qudot_to_dense(&net_of(&c)).unwrap();
        for (a, b) in before.amplitudes().iter().zip(after.amplitudes()) {
            prop_assert!((a - b).norm() < 1e-9);
        }
    }

    #[test]
    fn traversal_stays_on_support(n in 1usize..7, len in 0usize..30, seed: u64) {
        let c = random_circuit(n, len, &GateFamily::ALL, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let net = net_of(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let b = net.traverse(&mut rng).unwrap();
            prop_assert!(net.amplitude_of(&b).unwrap().norm_sqr() > 1e-20);
        }
    }
}

#[test]
fn swap_reverses_register() {
    let c = Circuit::from_ops(3, [GateOp::x(3), GateOp::SwapAll]).unwrap();
    let net = net_of(&c);
    let want = dense_of(&c);
    assert_eq!(want.probabilities().keys().next().unwrap().to_string(), "100");
    assert!(fidelity(&qudot_to_dense(&net).unwrap(), &want).unwrap() > 1.0 - 1e-12);
    assert_eq!(net.traverse(&mut shot_rng(0, 0)).unwrap().to_string(), "100");
}

proptest! {
    #[test]
    fn dense_unitaries_preserve_norm(n in 1usize..7, len in 0usize..40, seed: u64) {
        let c = random_circuit(n, len, &GateFamily::ALL, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!((dense_of(&c).norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_ignores_global_phase(n in 1usize..6, len in 0usize..30, seed: u64, theta in -3.2f64..3.2) {
        let c = random_circuit(n, len, &GateFamily::ALL, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let a = dense_of(&c);
        let phase = num_complex::Complex64::from_polar(1.0, theta);
        let b = DenseState::from_amplitudes(n, a.amplitudes().iter().map(|x| x * phase).collect()).unwrap();
        prop_assert!((fidelity(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        prop_assert!((fidelity(&a, &b).unwrap() - fidelity(&b, &a).unwrap()).abs() < 1e-15);
    }
}

#[test]
fn disjoint_labels_sample_exactly() {
    // H1; CX(1,2); H1 leaves two labels with disjoint supports.
    let c = Circuit::from_ops(
        2,
        [GateOp::h(1), GateOp::ccu(SingleQubitGate::X, 1, 2), GateOp::h(1)],
    )
    .unwrap();
    let net = net_of(&c);
    assert_eq!(net.label_count(), 2);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut counts = std::collections::BTreeMap::new();
    for _ in 0..40_000 {
        *counts.entry(net.traverse(&mut rng).unwrap().to_string()).or_insert(0u32) += 1;
    }
    assert_eq!(counts.len(), 4);
    for v in counts.values() {
        assert!((*v as f64 / 40_000.0 - 0.25).abs() < 0.01);
    }
}

#[test]
fn exact_sampler_handles_overlapping_labels() {
    // H1; CH(1,2); H1: both labels reach every outcome and interfere.
    let c = Circuit::from_ops(
        2,
        [GateOp::h(1), GateOp::ccu(SingleQubitGate::H, 1, 2), GateOp::h(1)],
    )
    .unwrap();
    let net = net_of(&c);
    assert_eq!(net.label_count(), 2);
    let expected: std::collections::BTreeMap<_, _> = dense_of(&c).probabilities();
    let mut exact = qudot_core::Distribution::default();
    let mut labelled = qudot_core::Distribution::default();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..50_000 {
        exact.record(net.sample_exact(&mut rng).unwrap());
        labelled.record(net.traverse(&mut rng).unwrap());
    }
    let fit = qudot_core::oracle::chi_square_gof(&expected, &exact).unwrap();
    assert!(fit.p_value > 1e-4, "{fit:?}");
    // Label-first traversal ignores the cross terms.
    let tv = qudot_core::oracle::distribution_metrics(&expected, &labelled).tv_distance;
    assert!(tv > 0.2, "{tv}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn exact_sampler_matches_dense(c in (2usize..5).prop_flat_map(circuit_with_controls), seed: u64) {
        let net = net_of(&c);
        let expected = dense_of(&c).probabilities();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut d = qudot_core::Distribution::default();
        for _ in 0..4_000 {
            let b = net.sample_exact(&mut rng).unwrap();
            prop_assert!(expected.contains_key(&b), "{} has zero probability", b);
            d.record(b);
        }
        prop_assert!(qudot_core::oracle::distribution_metrics(&expected, &d).tv_distance < 0.08);
    }
}
