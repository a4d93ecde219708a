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

//! Dense state-vector reference simulator and comparison metrics.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::bitstring::Bitstring;
use crate::circuit::{Circuit, Distribution, GateOp};
use crate::error::{QuDotError, Result};
use crate::gates::{PhaseK, SingleQubitGate};
use crate::net::{Amplitude, QuDotNet, MAX_ENUM_QUBITS, NORM_TOL};

/// A `2^n` amplitude vector; index bit `n - q` holds qubit `q`, so qubit 1
/// is the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseState {
    n: usize,
    amps: Vec<Amplitude>,
}

impl DenseState {
    pub fn ground(n: usize) -> Result<Self> {
        check_size(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(DenseState { n, amps })
    }

    pub fn from_amplitudes(n: usize, amps: Vec<Amplitude>) -> Result<Self> {
        check_size(n)?;
        if amps.len() != 1 << n {
            return Err(QuDotError::InvalidInput(format!(
                "{} amplitudes for {n} qubits",
                amps.len()
            )));
        }
        Ok(DenseState { n, amps })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Amplitude] {
        &self.amps
    }

    pub fn amplitude(&self, b: &Bitstring) -> Amplitude {
        self.amps[b.to_index()]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Outcome probabilities above `1e-24`.
    pub fn probabilities(&self) -> BTreeMap<Bitstring, f64> {
        self.amps
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 1e-24)
            .map(|(i, a)| (Bitstring::from_index(i, self.n), a.norm_sqr()))
            .collect()
    }

    /// Returns the state after `op`, leaving `self` untouched.
    pub fn apply<R: Rng + ?Sized>(&self, op: &GateOp, rng: &mut R) -> Result<DenseState> {
        let mut next = self.clone();
        next.apply_mut(op, rng)?;
        Ok(next)
    }

    pub fn apply_mut<R: Rng + ?Sized>(&mut self, op: &GateOp, rng: &mut R) -> Result<()> {
        match *op {
            GateOp::Single { gate, qubit } => {
                self.check(qubit)?;
                self.unitary(gate, qubit, None);
            }
            GateOp::Measure { qubit } => {
                self.check(qubit)?;
                self.measure(qubit, rng);
            }
            GateOp::SwapAll => self.reverse_bits(),
            GateOp::SemiControl {
                gate,
                control,
                target,
            } => {
                self.check_pair(control, target)?;
                if self.measure(control, rng) {
                    self.unitary(gate, target, None);
                }
            }
            GateOp::CoherentControl {
                gate,
                control,
                target,
            } => {
                self.check_pair(control, target)?;
                self.unitary(gate, target, Some(control));
            }
            GateOp::Qft | GateOp::Iqft => {
                let c = Circuit::from_ops(self.n, [*op])?;
                for (_, inner) in c.expanded() {
                    self.apply_mut(&inner, rng)?;
                }
            }
        }
        Ok(())
    }

    /// Runs every op of `circuit` in order.
    pub fn run<R: Rng + ?Sized>(&mut self, circuit: &Circuit, rng: &mut R) -> Result<()> {
        if circuit.qubits() != self.n {
            return Err(QuDotError::InvalidCircuit(format!(
                "{}-qubit circuit on a {}-qubit state",
                circuit.qubits(),
                self.n
            )));
        }
        for (index, op) in circuit.expanded() {
            self.apply_mut(&op, rng).map_err(|e| e.at_op(index))?;
        }
        Ok(())
    }

    fn check(&self, q: usize) -> Result<()> {
        if q == 0 || q > self.n {
            Err(QuDotError::InvalidQubit { qubit: q, n: self.n })
        } else {
            Ok(())
        }
    }

    fn check_pair(&self, c: usize, t: usize) -> Result<()> {
        self.check(c)?;
        self.check(t)?;
        if c == t {
            return Err(QuDotError::InvalidCircuit(format!(
                "control and target are both qubit {c}"
            )));
        }
        Ok(())
    }

    fn mask(&self, q: usize) -> usize {
        1 << (self.n - q)
    }

    fn unitary(&mut self, gate: SingleQubitGate, target: usize, control: Option<usize>) {
        let m = gate.matrix();
        let t = self.mask(target);
        let c = control.map_or(0, |c| self.mask(c));
        for i in 0..self.amps.len() {
            if i & t != 0 || i & c != c {
                continue;
            }
            let (a0, a1) = (self.amps[i], self.amps[i | t]);
            self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[i | t] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    /// Born-rule measurement; reads 0 when the uniform draw is at most P(0).
    fn measure<R: Rng + ?Sized>(&mut self, q: usize, rng: &mut R) -> bool {
        let mask = self.mask(q);
        let total = self.norm_sqr();
        let p0: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            / total;
        let bit = if p0 >= 1.0 {
            false
        } else if p0 <= 0.0 {
            true
        } else {
            rng.random::<f64>() > p0
        };
        let kept = if bit { 1.0 - p0 } else { p0 };
        let scale = 1.0 / (kept * total).sqrt();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & mask != 0) == bit {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        bit
    }

    fn reverse_bits(&mut self) {
        let n = self.n;
        let old = self.amps.clone();
        for (i, a) in old.into_iter().enumerate() {
            let j = i.reverse_bits() >> (usize::BITS as usize - n);
            self.amps[j] = a;
        }
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        Err(QuDotError::InvalidSize)
    } else if n > MAX_ENUM_QUBITS {
        Err(QuDotError::SizeLimit {
            n,
            limit: MAX_ENUM_QUBITS,
        })
    } else {
        Ok(())
    }
}

/// Expands a net into a dense vector, rejecting nets whose squared norm is
/// off by more than `NORM_TOL`.
pub fn qudot_to_dense(net: &QuDotNet) -> Result<DenseState> {
    let amps = net.dense_amplitudes(MAX_ENUM_QUBITS)?;
    let state = DenseState::from_amplitudes(net.qubits(), amps)?;
    let norm = state.norm_sqr();
    if (norm - 1.0).abs() > NORM_TOL {
        return Err(QuDotError::CorruptNet(format!("squared norm {norm}")));
    }
    Ok(state)
}

/// `|⟨a|b⟩|`, clamped to `[0, 1]`.
pub fn fidelity(a: &DenseState, b: &DenseState) -> Result<f64> {
    if a.n != b.n {
        return Err(QuDotError::InvalidInput(format!(
            "fidelity between {} and {} qubits",
            a.n, b.n
        )));
    }
    let overlap: Complex64 = a.amps.iter().zip(&b.amps).map(|(x, y)| x.conj() * y).sum();
    Ok(overlap.norm().clamp(0.0, 1.0))
}

/// Outcome distribution of `prep` followed by `main`, computed exactly by
/// deferring every measurement to the end.
pub fn exact_distribution(prep: &Circuit, main: &Circuit) -> Result<BTreeMap<Bitstring, f64>> {
    let mut state = DenseState::ground(main.qubits())?;
    // No measurements remain, so the generator is never drawn from.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    state.run(&prep.deferred(), &mut rng)?;
    state.run(&main.deferred(), &mut rng)?;
    Ok(state.probabilities())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistributionMetrics {
    /// Half the L1 distance between expected and observed frequencies.
    pub tv_distance: f64,
    /// Largest `|observed - expected| / expected` over the expected support.
    pub max_relative_error: f64,
}

pub fn distribution_metrics(
    expected: &BTreeMap<Bitstring, f64>,
    observed: &Distribution,
) -> DistributionMetrics {
    let freq = observed.frequencies();
    let mut l1 = 0.0;
    let mut max_rel: f64 = 0.0;
    for (k, &p) in expected {
        let q = freq.get(k).copied().unwrap_or(0.0);
        l1 += (q - p).abs();
        if p > 0.0 {
            max_rel = max_rel.max((q - p).abs() / p);
        }
    }
    for (k, &q) in &freq {
        if !expected.contains_key(k) {
            l1 += q;
        }
    }
    DistributionMetrics {
        tv_distance: l1 / 2.0,
        max_relative_error: max_rel,
    }
}

/// Standard deviation scale of the TV distance of a `shots`-sample estimate:
/// `½ Σ sqrt(p (1 - p) / shots)`.
pub fn tv_sampling_sigma(expected: &BTreeMap<Bitstring, f64>, shots: u64) -> f64 {
    let n = shots.max(1) as f64;
    0.5 * expected.values().map(|p| (p * (1.0 - p) / n).sqrt()).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness-of-fit of observed counts against `expected`. Any count
/// outside the expected support yields an infinite statistic and p = 0.
pub fn chi_square_gof(
    expected: &BTreeMap<Bitstring, f64>,
    observed: &Distribution,
) -> Result<ChiSquare> {
    let bins: Vec<(&Bitstring, f64)> = expected
        .iter()
        .filter(|(_, &p)| p > 0.0)
        .map(|(k, &p)| (k, p))
        .collect();
    if bins.len() < 2 {
        return Err(QuDotError::InvalidInput(
            "chi-square needs at least two outcomes with nonzero probability".into(),
        ));
    }
    let shots = observed.shots as f64;
    let stray = observed.counts.keys().any(|k| !expected.contains_key(k));
    let statistic = if stray {
        f64::INFINITY
    } else {
        bins.iter()
            .map(|(k, p)| {
                let e = p * shots;
                let o = observed.counts.get(*k).copied().unwrap_or(0) as f64;
                (o - e) * (o - e) / e
            })
            .sum()
    };
    let dof = bins.len() - 1;
    let dist = ChiSquared::new(dof as f64).map_err(|e| QuDotError::InvalidInput(e.to_string()))?;
    let p_value = if statistic.is_finite() {
        dist.sf(statistic)
    } else {
        0.0
    };
    Ok(ChiSquare {
        statistic,
        dof,
        p_value,
    })
}

/// A seed-deterministic random circuit of single-qubit gates drawn
/// uniformly from `gates`; `Rk` picks `k` uniformly in 1..=4.
pub fn random_circuit<R: Rng + ?Sized>(
    n: usize,
    len: usize,
    gates: &[GateFamily],
    rng: &mut R,
) -> Result<Circuit> {
    if gates.is_empty() && len > 0 {
        return Err(QuDotError::InvalidInput("empty gate set".into()));
    }
    let mut c = Circuit::new(n)?;
    for _ in 0..len {
        let q = rng.random_range(1..=n);
        let op = match gates[rng.random_range(0..gates.len())] {
            GateFamily::X => GateOp::x(q),
            GateFamily::H => GateOp::h(q),
            GateFamily::Rk => GateOp::rk(q, rng.random_range(1..=4)),
        };
        c.push(op)?;
    }
    Ok(c)
}

/// Gate family probed by [`fidelity_protocol`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateFamily {
    X,
    H,
    /// `R(k)` for k in {0, 1, 2, 3, 4, 8, 16}.
    Rk,
}

impl GateFamily {
    pub const ALL: [GateFamily; 3] = [GateFamily::X, GateFamily::H, GateFamily::Rk];

    pub fn gates(self) -> Vec<SingleQubitGate> {
        match self {
            GateFamily::X => vec![SingleQubitGate::X],
            GateFamily::H => vec![SingleQubitGate::H],
            GateFamily::Rk => [0, 1, 2, 3, 4, 8, 16]
                .into_iter()
                .map(|k| SingleQubitGate::R(PhaseK(k)))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityCase {
    pub gate: String,
    pub base: String,
    pub targets: Vec<usize>,
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityReport {
    pub cases: Vec<FidelityCase>,
}

impl FidelityReport {
    pub fn worst(&self) -> f64 {
        self.cases.iter().map(|c| c.fidelity).fold(1.0, f64::min)
    }
}

/// Target sets for the gate-fidelity sweep: every qubit, the even and odd
/// qubits, each proper prefix of the even and odd sets and every other
/// member of each.
pub fn protocol_target_sets(n: usize) -> Vec<Vec<usize>> {
    let mut sets = vec![(1..=n).collect::<Vec<_>>()];
    for parity in [0, 1] {
        let members: Vec<usize> = (1..=n).filter(|q| q % 2 == parity).collect();
        if members.is_empty() {
            continue;
        }
        sets.push(members.clone());
        for len in 1..members.len() {
            sets.push(members[..len].to_vec());
        }
        if members.len() > 2 {
            sets.push(members.iter().copied().step_by(2).collect());
        }
    }
    sets
}

/// Applies each gate of `family` to each target set, starting from both
/// the ground state and the uniform superposition, in the net and in the
/// dense simulator, and records the fidelity of every pair of results.
pub fn fidelity_protocol(family: GateFamily, n: usize) -> Result<FidelityReport> {
    // Unitary-only circuits: the generator is never drawn from.
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut cases = Vec::new();
    for (base, prep) in [("ground", Vec::new()), ("superposition", (1..=n).collect())] {
        for gate in family.gates() {
            for targets in protocol_target_sets(n) {
                let mut ops: Vec<GateOp> = prep.iter().map(|&q| GateOp::h(q)).collect();
                ops.extend(targets.iter().map(|&q| GateOp::Single { gate, qubit: q }));
                let c = Circuit::from_ops(n, ops)?;
                let mut net = QuDotNet::new_ground_state(n)?;
                crate::circuit::execute_on(&mut net, &c, &mut rng)?;
                let mut dense = DenseState::ground(n)?;
                dense.run(&c, &mut rng)?;
                cases.push(FidelityCase {
                    gate: gate.to_string(),
                    base: base.to_string(),
                    targets,
                    fidelity: fidelity(&qudot_to_dense(&net)?, &dense)?,
                });
            }
        }
    }
    Ok(FidelityReport { cases })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_gates() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = DenseState::ground(2).unwrap();
        let s = s.apply(&GateOp::x(2), &mut rng).unwrap();
        assert_eq!(s.amplitudes()[1], c(1.0, 0.0));
        let s = s.apply(&GateOp::h(1), &mut rng).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[1].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[3].re, FRAC_1_SQRT_2, epsilon = 1e-15);
        let s = s.apply(&GateOp::rk(1, 2), &mut rng).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[3].im, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitudes()[3].re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn swap_reverses_bits() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut s = DenseState::ground(3).unwrap();
        s.apply_mut(&GateOp::x(3), &mut rng).unwrap();
        s.apply_mut(&GateOp::SwapAll, &mut rng).unwrap();
        assert_eq!(s.amplitude(&"100".parse().unwrap()), c(1.0, 0.0));
    }

    #[test]
    fn controlled_gates() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut s = DenseState::ground(2).unwrap();
        s.apply_mut(&GateOp::h(1), &mut rng).unwrap();
        s.apply_mut(&GateOp::ccu(SingleQubitGate::X, 1, 2), &mut rng).unwrap();
        let p = s.probabilities();
        assert_eq!(p.len(), 2);
        assert_abs_diff_eq!(p[&"11".parse().unwrap()], 0.5, epsilon = 1e-15);
        // The semi-quantum version collapses the control.
        let mut s = DenseState::ground(2).unwrap();
        s.apply_mut(&GateOp::h(1), &mut rng).unwrap();
        s.apply_mut(&GateOp::scu(SingleQubitGate::X, 1, 2), &mut rng).unwrap();
        assert_eq!(s.probabilities().len(), 1);
    }

    #[test]
    fn measurement_renormalizes() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut s = DenseState::ground(2).unwrap();
        s.apply_mut(&GateOp::h(1), &mut rng).unwrap();
        s.apply_mut(&GateOp::h(2), &mut rng).unwrap();
        s.apply_mut(&GateOp::m(1), &mut rng).unwrap();
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-15);
        assert_eq!(s.probabilities().len(), 2);
    }

    #[test]
    fn fidelity_of_states() {
        let a = DenseState::ground(1).unwrap();
        let b = DenseState::from_amplitudes(1, vec![c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)]).unwrap();
        assert_abs_diff_eq!(fidelity(&a, &a).unwrap(), 1.0);
        assert_abs_diff_eq!(fidelity(&a, &b).unwrap(), FRAC_1_SQRT_2, epsilon = 1e-15);
        assert!(fidelity(&a, &DenseState::ground(2).unwrap()).is_err());
    }

    #[test]
    fn size_limits() {
        assert_eq!(DenseState::ground(0), Err(QuDotError::InvalidSize));
        assert!(matches!(DenseState::ground(21), Err(QuDotError::SizeLimit { .. })));
        assert!(DenseState::from_amplitudes(2, vec![c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn metrics() {
        let expected: BTreeMap<Bitstring, f64> =
            [("0".parse().unwrap(), 0.5), ("1".parse().unwrap(), 0.5)].into();
        let mut d = Distribution::default();
        for _ in 0..3 {
            d.record("0".parse().unwrap());
        }
        d.record("1".parse().unwrap());
        let m = distribution_metrics(&expected, &d);
        assert_abs_diff_eq!(m.tv_distance, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(m.max_relative_error, 0.5, epsilon = 1e-15);
        let chi = chi_square_gof(&expected, &d).unwrap();
        assert_abs_diff_eq!(chi.statistic, 1.0, epsilon = 1e-12);
        assert_eq!(chi.dof, 1);
        assert_abs_diff_eq!(chi.p_value, 0.31731050786291415, epsilon = 1e-9);
    }

    #[test]
    fn sampling_sigma() {
        let expected: BTreeMap<Bitstring, f64> =
            [("0".parse().unwrap(), 0.5), ("1".parse().unwrap(), 0.5)].into();
        assert_abs_diff_eq!(tv_sampling_sigma(&expected, 100), 0.05, epsilon = 1e-15);
    }

    #[test]
    fn stray_outcomes_fail_goodness_of_fit() {
        let expected: BTreeMap<Bitstring, f64> =
            [("00".parse().unwrap(), 0.5), ("01".parse().unwrap(), 0.5)].into();
        let mut d = Distribution::default();
        d.record("11".parse().unwrap());
        let chi = chi_square_gof(&expected, &d).unwrap();
        assert_eq!(chi.p_value, 0.0);
        let m = distribution_metrics(&expected, &d);
        assert_abs_diff_eq!(m.tv_distance, 1.0);
    }

    #[test]
    fn random_circuits_are_seeded() {
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        let ca = random_circuit(5, 40, &GateFamily::ALL, &mut a).unwrap();
        assert_eq!(ca, random_circuit(5, 40, &GateFamily::ALL, &mut b).unwrap());
        assert_eq!(ca.len(), 40);
        assert!(random_circuit(3, 0, &GateFamily::ALL, &mut a).unwrap().is_empty());
        let only_x = random_circuit(3, 20, &[GateFamily::X], &mut a).unwrap();
        assert!(only_x.ops().iter().all(|op| matches!(op, GateOp::Single { gate: SingleQubitGate::X, .. })));
        assert!(random_circuit(3, 1, &[], &mut a).is_err());
    }

    #[test]
    fn orthogonal_states_have_zero_fidelity() {
        let zero = DenseState::ground(1).unwrap();
        let one = zero.apply(&GateOp::x(1), &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
    }

    #[test]
    fn target_sets() {
        let sets = protocol_target_sets(4);
        assert_eq!(sets[0], vec![1, 2, 3, 4]);
        assert!(sets.contains(&vec![2, 4]));
        assert!(sets.contains(&vec![1, 3]));
        assert!(sets.contains(&vec![2]));
        assert!(protocol_target_sets(1).iter().all(|s| s == &vec![1]));
    }

    #[test]
    fn exact_distribution_of_semi_control() {
        let prep = Circuit::from_ops(2, [GateOp::h(1)]).unwrap();
        let main = Circuit::from_ops(2, [GateOp::scu(SingleQubitGate::X, 1, 2)]).unwrap();
        let d = exact_distribution(&prep, &main).unwrap();
        assert_eq!(d.len(), 2);
        assert_abs_diff_eq!(d[&"00".parse().unwrap()], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(d[&"11".parse().unwrap()], 0.5, epsilon = 1e-15);
    }
}
