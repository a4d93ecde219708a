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

//! Gates as edge-weight rewrites on a [`QuDotNet`].
//!
//! Every rule works on one qubit layer: the layer's incoming ("parent")
//! edges and, except on the last storage layer, its outgoing ("child")
//! edges. With several branch labels the rule runs once per label.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2, TAU};
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QuDotError, Result};
use crate::net::{is_zero, parent_rows, Amplitude, Branch, Orientation, QuDotNet, NORM_TOL};

/// Exponent `k` of the phase gate `R(k) = diag(1, exp(2πi / 2^k))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PhaseK(pub u32);

impl PhaseK {
    pub fn k(self) -> u32 {
        self.0
    }

    /// `exp(2πi / 2^k)`, exact for `k <= 2`.
    pub fn phase(self) -> Amplitude {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(-1.0, 0.0),
            2 => Complex64::new(0.0, 1.0),
            k => Complex64::from_polar(1.0, TAU * 0.5f64.powi(k.min(2048) as i32)),
        }
    }
}

/// Single-qubit unitaries that can also serve as the `U` of a controlled gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SingleQubitGate {
    X,
    H,
    R(PhaseK),
    /// `R(k)` with the conjugate phase.
    RInv(PhaseK),
}

impl SingleQubitGate {
    pub fn r(k: u32) -> Self {
        SingleQubitGate::R(PhaseK(k))
    }

    pub fn matrix(self) -> [[Amplitude; 2]; 2] {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
        match self {
            SingleQubitGate::X => [[zero, one], [one, zero]],
            SingleQubitGate::H => [[s, s], [s, -s]],
            SingleQubitGate::R(k) => [[one, zero], [zero, k.phase()]],
            SingleQubitGate::RInv(k) => [[one, zero], [zero, k.phase().conj()]],
        }
    }

    pub fn inverse(self) -> Self {
        match self {
            SingleQubitGate::R(k) => SingleQubitGate::RInv(k),
            SingleQubitGate::RInv(k) => SingleQubitGate::R(k),
            other => other,
        }
    }
}

impl fmt::Display for SingleQubitGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingleQubitGate::X => f.write_str("x"),
            SingleQubitGate::H => f.write_str("h"),
            SingleQubitGate::R(k) => write!(f, "rk {}", k.0),
            SingleQubitGate::RInv(k) => write!(f, "rkdg {}", k.0),
        }
    }
}

/// How a measurement rescales the surviving parent edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum MeasureRule {
    /// Each surviving parent edge is divided by the square root of its share
    /// of the parent's outgoing mass, so every row stays normalized.
    #[default]
    Renormalize,
    /// Multiply by `√2` when the winner has two nonzero parent edges and
    /// leave the weights alone otherwise. Exact only for equal-amplitude
    /// layers fed by two live parents.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Measurement {
    pub bit: bool,
    /// Probability of reading 0 used for the draw.
    pub p_zero: f64,
    /// True when only one sibling was reachable and no draw happened.
    pub forced: bool,
}

fn x_layer(branch: &mut Branch, p: usize, n: usize) {
    if p < n {
        branch.blocks[p].swap_rows();
    }
    let parents = &mut branch.blocks[p - 1];
    for a in parent_rows(p) {
        parents.swap_columns(a);
    }
}

fn h_layer(branch: &mut Branch, p: usize, n: usize) {
    let s = FRAC_1_SQRT_2;
    let parents = &mut branch.blocks[p - 1];
    for a in parent_rows(p) {
        let (u, v) = (parents.w[a][0], parents.w[a][1]);
        parents.set(a, 0, (u + v) * s);
        parents.set(a, 1, (u - v) * s);
    }
    if p < n {
        // A sibling that was unreachable may now be visited; give it the
        // live sibling's child edges.
        let children = &mut branch.blocks[p];
        for b in 0..2 {
            let (z0, z1) = (is_zero(children.w[0][b]), is_zero(children.w[1][b]));
            if z0 && !z1 {
                children.set(0, b, children.w[1][b]);
            } else if !z0 && z1 {
                children.set(1, b, children.w[0][b]);
            }
        }
    }
}

fn phase_layer(branch: &mut Branch, p: usize, phase: Amplitude) {
    let parents = &mut branch.blocks[p - 1];
    for a in parent_rows(p) {
        parents.w[a][1] *= phase;
    }
}

fn apply_to_branch(branch: &mut Branch, gate: SingleQubitGate, p: usize, n: usize) {
    match gate {
        SingleQubitGate::X => x_layer(branch, p, n),
        SingleQubitGate::H => h_layer(branch, p, n),
        SingleQubitGate::R(k) => phase_layer(branch, p, k.phase()),
        SingleQubitGate::RInv(k) => phase_layer(branch, p, k.phase().conj()),
    }
}

impl QuDotNet {
    /// Swaps the layer's sibling roles: child rows trade places and every
    /// parent's two edges into the layer trade weights.
    pub fn apply_x(&mut self, q: usize) -> Result<()> {
        self.apply_single(SingleQubitGate::X, q)
    }

    /// Interferes each parent's two edges into the layer, then copies child
    /// edges from a live sibling to one whose slot is zero.
    pub fn apply_h(&mut self, q: usize) -> Result<()> {
        self.apply_single(SingleQubitGate::H, q)
    }

    /// Multiplies every parent edge into the layer's 1-node by `φ(k)`.
    pub fn apply_rk(&mut self, q: usize, k: PhaseK) -> Result<()> {
        self.apply_single(SingleQubitGate::R(k), q)
    }

    pub fn apply_single(&mut self, gate: SingleQubitGate, q: usize) -> Result<()> {
        let p = self.storage_layer(q)?;
        let n = self.qubits();
        for branch in &mut self.branches {
            apply_to_branch(branch, gate, p, n);
        }
        Ok(())
    }

    pub fn apply_m<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> Result<bool> {
        self.apply_m_with(q, rng, MeasureRule::default()).map(|m| m.bit)
    }

    /// Measures qubit `q` in the computational basis and collapses the layer.
    ///
    /// If only one sibling has nonzero parent edges its bit is returned
    /// as-is. Otherwise `P(0) = |w1 + w2|^2 / c^2`, with `w1`, `w2` the
    /// 0-node's parent weights (the root edge alone on the root layer) and
    /// `c` the number of them that are nonzero. The loser's parent edges are
    /// zeroed and the winner's rescaled according to `rule`.
    pub fn apply_m_with<R: Rng + ?Sized>(
        &mut self,
        q: usize,
        rng: &mut R,
        rule: MeasureRule,
    ) -> Result<Measurement> {
        let p = self.storage_layer(q)?;
        self.single_branch()?;
        let block = self.branches[0].blocks[p - 1];
        let live = |b: usize| parent_rows(p).any(|a| !is_zero(block.w[a][b]));
        match (live(0), live(1)) {
            (true, false) => {
                return Ok(Measurement {
                    bit: false,
                    p_zero: 1.0,
                    forced: true,
                })
            }
            (false, true) => {
                return Ok(Measurement {
                    bit: true,
                    p_zero: 0.0,
                    forced: true,
                })
            }
            (false, false) => {
                return Err(QuDotError::CorruptNet(format!(
                    "qubit {q} has no nonzero parent edges"
                )))
            }
            (true, true) => {}
        }

        let parents: Vec<Amplitude> = parent_rows(p).map(|a| block.w[a][0]).collect();
        let count = parents.iter().filter(|w| !is_zero(**w)).count() as f64;
        let sum: Amplitude = parents.iter().sum();
        let p_zero = (sum.norm_sqr() / (count * count)).clamp(0.0, 1.0);

        if self.audit {
            let exact = self.marginal_zero(q)?;
            if (exact - p_zero).abs() > NORM_TOL {
                log::warn!("qubit {q}: local P(0) = {p_zero} but the exact marginal is {exact}");
                self.audit_mismatches += 1;
            }
        }

        let r: f64 = rng.random();
        let bit = !(p_zero > 0.0 && r <= p_zero);
        collapse(&mut self.branches[0], p, bit, rule);
        Ok(Measurement {
            bit,
            p_zero,
            forced: false,
        })
    }

    /// Whole-register bit reversal: qubit `i` afterwards reads what qubit
    /// `n + 1 - i` read before. Constant time; only the orientation flips.
    pub fn apply_swap(&mut self) {
        self.orientation = match self.orientation {
            Orientation::Forward => Orientation::Reversed,
            Orientation::Reversed => Orientation::Forward,
        };
    }

    /// Measures `control` and applies `u` to `target` iff it read 1.
    pub fn apply_semi_control<R: Rng + ?Sized>(
        &mut self,
        control: usize,
        target: usize,
        u: SingleQubitGate,
        rng: &mut R,
    ) -> Result<bool> {
        self.check_control_pair(control, target)?;
        let bit = self.apply_m(control, rng)?;
        if bit {
            self.apply_single(u, target)?;
        }
        Ok(bit)
    }

    /// Controlled-`u` without measuring the control.
    ///
    /// Each label is split: walks through the control's 1-node move to a
    /// fresh label (their ancestor and descendant edges duplicated), the
    /// rest stay. `u` then acts on the target under the fresh labels only.
    /// Labels left without mass are retired, so the count at most doubles.
    pub fn apply_coherent_control(
        &mut self,
        control: usize,
        target: usize,
        u: SingleQubitGate,
    ) -> Result<()> {
        self.check_control_pair(control, target)?;
        let c = self.storage_layer(control)?;
        let t = self.storage_layer(target)?;
        let n = self.qubits();
        for idx in self.split_branches(c) {
            apply_to_branch(&mut self.branches[idx], u, t, n);
        }
        self.retire_empty_branches();
        Ok(())
    }

    fn check_control_pair(&self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(QuDotError::InvalidCircuit(format!(
                "control and target are both qubit {control}"
            )));
        }
        Ok(())
    }
}

fn collapse(branch: &mut Branch, p: usize, bit: bool, rule: MeasureRule) {
    let (win, lose) = if bit { (1, 0) } else { (0, 1) };
    let block = &mut branch.blocks[p - 1];
    let live_parents = parent_rows(p).filter(|&a| !is_zero(block.w[a][win])).count();
    for a in parent_rows(p) {
        let mass = block.row_mass(a);
        block.clear(a, lose);
        let w = block.w[a][win];
        if is_zero(w) {
            continue;
        }
        block.w[a][win] = match rule {
            MeasureRule::Renormalize => w * (mass.sqrt() / w.norm()),
            MeasureRule::Literal if live_parents == 2 => w * SQRT_2,
            MeasureRule::Literal => w,
        };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitstring::Bitstring;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeMap;

    fn bs(s: &str) -> Bitstring {
        s.parse().unwrap()
    }

    fn assert_state(net: &QuDotNet, want: &[(&str, Amplitude)]) {
        let got = net.enumerate_paths().unwrap();
        let want: BTreeMap<Bitstring, Amplitude> =
            want.iter().map(|(b, a)| (bs(b), *a)).collect();
        assert_eq!(
            got.keys().collect::<Vec<_>>(),
            want.keys().collect::<Vec<_>>(),
            "support differs"
        );
        for (b, a) in &want {
            assert_abs_diff_eq!(got[b].re, a.re, epsilon = 1e-12);
            assert_abs_diff_eq!(got[b].im, a.im, epsilon = 1e-12);
        }
    }

    fn re(x: f64) -> Amplitude {
        Complex64::new(x, 0.0)
    }

    fn uniform(n: usize) -> QuDotNet {
        let mut net = QuDotNet::new_ground_state(n).unwrap();
        for q in 1..=n {
            net.apply_h(q).unwrap();
        }
        net
    }

    #[test]
    fn x_flips_a_basis_state() {
        let mut net = QuDotNet::new_ground_state(3).unwrap();
        net.apply_x(3).unwrap();
        assert_state(&net, &[("001", re(1.0))]);
    }

    #[test]
    fn walkthrough_matches_each_intermediate_net() {
        let s = FRAC_1_SQRT_2;
        let mut net = QuDotNet::new_ground_state(3).unwrap();
        net.apply_h(1).unwrap();
        assert_state(&net, &[("000", re(s)), ("100", re(s))]);
        net.apply_x(3).unwrap();
        assert_state(&net, &[("001", re(s)), ("101", re(s))]);
        net.apply_h(2).unwrap();
        assert_state(
            &net,
            &[("001", re(0.5)), ("011", re(0.5)), ("101", re(0.5)), ("111", re(0.5))],
        );
        net.check_invariants().unwrap();
    }

    #[test]
    fn uniform_net_has_every_weight_one_over_root_two() {
        let net = uniform(3);
        for e in net.edges() {
            assert_abs_diff_eq!(e.weight.re, FRAC_1_SQRT_2, epsilon = 1e-15);
        }
        let a = net.amplitude_of(&bs("011")).unwrap();
        assert_abs_diff_eq!(a.re, 1.0 / (2.0 * SQRT_2), epsilon = 1e-15);
    }

    #[test]
    fn phase_gates() {
        let mut net = QuDotNet::new_ground_state(1).unwrap();
        net.apply_h(1).unwrap();
        net.apply_rk(1, PhaseK(1)).unwrap();
        let a = net.amplitude_of(&bs("1")).unwrap();
        assert_abs_diff_eq!(a.re, -FRAC_1_SQRT_2, epsilon = 1e-15);

        let mut net = QuDotNet::new_ground_state(1).unwrap();
        net.apply_x(1).unwrap();
        net.apply_rk(1, PhaseK(2)).unwrap();
        assert_eq!(net.amplitude_of(&bs("1")).unwrap(), Complex64::new(0.0, 1.0));

        let mut net = QuDotNet::new_ground_state(3).unwrap();
        let before = net.enumerate_paths().unwrap();
        net.apply_rk(2, PhaseK(3)).unwrap();
        assert_eq!(net.enumerate_paths().unwrap(), before);
    }

    #[test]
    fn phase_values() {
        for k in 0..12 {
            let phi = PhaseK(k).phase();
            assert_abs_diff_eq!(phi.norm(), 1.0, epsilon = 1e-15);
            let want = Complex64::from_polar(1.0, TAU / 2f64.powi(k as i32));
            assert_abs_diff_eq!((phi - want).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn out_of_range_qubits_are_rejected() {
        let mut net = QuDotNet::new_ground_state(2).unwrap();
        let err = QuDotError::InvalidQubit { qubit: 3, n: 2 };
        assert_eq!(net.apply_x(3), Err(err.clone()));
        assert_eq!(net.apply_h(3), Err(err.clone()));
        assert_eq!(net.apply_rk(3, PhaseK(1)), Err(err.clone()));
        assert_eq!(net.apply_x(0), Err(QuDotError::InvalidQubit { qubit: 0, n: 2 }));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(net.apply_m(3, &mut rng), Err(err));
    }

    #[test]
    fn measuring_a_definite_qubit_does_not_touch_the_net() {
        let mut net = QuDotNet::new_ground_state(1).unwrap();
        let before = net.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            assert!(!net.apply_m(1, &mut rng).unwrap());
        }
        assert_eq!(net, before);
    }

    #[test]
    fn measurement_probability_of_uniform_middle_qubit() {
        let mut net = uniform(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = net.apply_m_with(2, &mut rng, MeasureRule::Renormalize).unwrap();
        assert_abs_diff_eq!(m.p_zero, 0.5, epsilon = 1e-15);
        assert!(!m.forced);
        net.check_invariants().unwrap();
    }

    #[test]
    fn literal_rule_matches_renormalization_on_uniform_layers() {
        for seed in 0..8 {
            let mut a = uniform(3);
            let mut b = uniform(3);
            let ma = a.apply_m_with(2, &mut ChaCha8Rng::seed_from_u64(seed), MeasureRule::Renormalize);
            let mb = b.apply_m_with(2, &mut ChaCha8Rng::seed_from_u64(seed), MeasureRule::Literal);
            assert_eq!(ma, mb);
            let (pa, pb) = (a.enumerate_paths().unwrap(), b.enumerate_paths().unwrap());
            assert_eq!(pa.keys().collect::<Vec<_>>(), pb.keys().collect::<Vec<_>>());
            for (k, v) in &pa {
                assert_abs_diff_eq!((pb[k] - v).norm(), 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn literal_rule_leaves_a_single_parent_edge_unscaled() {
        let mut net = uniform(2);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let m = net.apply_m_with(1, &mut rng, MeasureRule::Literal).unwrap();
        let mass: f64 = net.label_masses().iter().map(|(_, m)| m).sum();
        assert_abs_diff_eq!(mass, 0.5, epsilon = 1e-15);
        // Traversal still reads the measured bit.
        for _ in 0..50 {
            assert_eq!(net.traverse(&mut rng).unwrap().bit(1), m.bit);
        }
    }

    #[test]
    fn measurement_fixes_the_bit_for_later_traversals() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let mut net = uniform(4);
            let bit = net.apply_m(3, &mut rng).unwrap();
            net.check_invariants().unwrap();
            for _ in 0..20 {
                assert_eq!(net.traverse(&mut rng).unwrap().bit(3), bit);
            }
            assert_eq!(net.apply_m(3, &mut rng).unwrap(), bit);
        }
    }

    #[test]
    fn audit_agrees_on_product_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut net = uniform(5);
        net.apply_rk(2, PhaseK(3)).unwrap();
        net.apply_h(2).unwrap();
        net.set_audit(true);
        for q in 1..=5 {
            net.apply_m(q, &mut rng).unwrap();
        }
        assert_eq!(net.audit_mismatches(), 0);
    }

    #[test]
    fn swap_is_an_orientation_flip() {
        let mut net = QuDotNet::new_ground_state(3).unwrap();
        net.apply_x(3).unwrap();
        net.apply_swap();
        assert_eq!(net.orientation(), Orientation::Reversed);
        assert_state(&net, &[("100", re(1.0))]);
        // Root edges now feed qubit 3 and edges run upward.
        for e in net.edges() {
            if e.from.layer == 0 {
                assert_eq!(e.to.layer, 3);
            } else {
                assert_eq!(e.to.layer + 1, e.from.layer);
            }
        }
        net.apply_swap();
        assert_state(&net, &[("001", re(1.0))]);
    }

    #[test]
    fn gates_after_swap_address_logical_qubits() {
        let mut net = QuDotNet::new_ground_state(3).unwrap();
        net.apply_swap();
        net.apply_x(1).unwrap();
        assert_state(&net, &[("100", re(1.0))]);
    }

    #[test]
    fn semi_control_follows_the_measured_bit() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut net = QuDotNet::new_ground_state(2).unwrap();
        net.apply_x(1).unwrap();
        assert!(net.apply_semi_control(1, 2, SingleQubitGate::X, &mut rng).unwrap());
        assert_state(&net, &[("11", re(1.0))]);

        let mut net = QuDotNet::new_ground_state(2).unwrap();
        assert!(!net.apply_semi_control(1, 2, SingleQubitGate::X, &mut rng).unwrap());
        assert_state(&net, &[("00", re(1.0))]);

        assert!(matches!(
            net.apply_semi_control(2, 2, SingleQubitGate::X, &mut rng),
            Err(QuDotError::InvalidCircuit(_))
        ));
    }

    #[test]
    fn coherent_control_reproduces_the_two_label_net() {
        let mut net = QuDotNet::new_ground_state(2).unwrap();
        net.apply_h(1).unwrap();
        net.apply_coherent_control(1, 2, SingleQubitGate::X).unwrap();
        assert_eq!(net.label_count(), 2);
        net.check_invariants().unwrap();
        net.apply_h(1).unwrap();
        assert_state(
            &net,
            &[("00", re(0.5)), ("01", re(0.5)), ("10", re(0.5)), ("11", re(-0.5))],
        );
        let labels = net.labels();
        let (black, blue) = (labels[0], labels[1]);
        use crate::net::NodeRef;
        let w = |f, t, l| net.edge_weight(f, t, l).unwrap();
        let (root, a0, a1, b0, b1) = (
            NodeRef::ROOT,
            NodeRef::qubit(1, false),
            NodeRef::qubit(1, true),
            NodeRef::qubit(2, false),
            NodeRef::qubit(2, true),
        );
        assert_abs_diff_eq!(w(root, a0, black).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(w(root, a1, black).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(w(root, a0, blue).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(w(root, a1, blue).re, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(w(a0, b0, black).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w(a1, b0, black).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w(a0, b1, blue).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(w(a1, b1, blue).re, 1.0, epsilon = 1e-15);
        net.check_invariants().unwrap();
    }

    #[test]
    fn coherent_control_on_definite_zero_changes_nothing() {
        let mut net = uniform(3);
        net.apply_h(2).unwrap();
        let before = net.enumerate_paths().unwrap();
        net.apply_coherent_control(2, 3, SingleQubitGate::X).unwrap();
        assert_eq!(net.label_count(), 1);
        assert_eq!(net.edge_count(), 2 * 7 - 4);
        let after = net.enumerate_paths().unwrap();
        for (k, v) in &before {
            assert_abs_diff_eq!((after[k] - v).norm(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn coherent_control_rejects_measurement_afterwards() {
        let mut net = QuDotNet::new_ground_state(2).unwrap();
        net.apply_h(1).unwrap();
        net.apply_coherent_control(1, 2, SingleQubitGate::X).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(
            net.apply_m(1, &mut rng),
            Err(QuDotError::UnsupportedOnCoherentState { labels: 2 })
        );
    }
}
