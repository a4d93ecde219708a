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

//! The layered, labeled, weighted multi-digraph that encodes an n-qubit state.
//!
//! A net has a root node and one layer of two sibling nodes (`0` and `1`) per
//! qubit. Each directed edge carries a complex weight: the amplitude of
//! visiting the child given the parent. The amplitude of a basis outcome is
//! the product of the weights along the root-to-leaf walk that visits the
//! outcome's nodes, summed over branch labels.
//!
//! Storage is dense per label: for every storage layer `p` there is a 2x2
//! block of incoming edge slots (`block[a][b]` is the edge from node `a` of
//! layer `p - 1` to node `b` of layer `p`; layer 1's block only uses row 0,
//! which holds the two root edges). Slots carry a presence flag so that edges
//! added lazily by coherent control are distinguishable from the materialized
//! zero-weight edges of a single-label net.
//!
//! An n-qubit SWAP flips [`Orientation`]. Storage is never rewritten; qubit
//! `q` lives in storage layer `n + 1 - q` while the net is reversed.

// 2x2 blocks read closer to the matrix algebra with index loops; negated
// comparisons below deliberately treat NaN as failure.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitstring::Bitstring;
use crate::error::{QuDotError, Result};

pub type Amplitude = Complex64;

/// Magnitude at or below which an edge weight counts as zero.
pub const EPS: f64 = 1e-12;

/// Tolerance for every normalization check.
pub const NORM_TOL: f64 = 1e-9;

/// Default qubit cap for full path enumeration.
pub const MAX_ENUM_QUBITS: usize = 20;

/// Largest `labels^2 * 2n` table [`QuDotNet::sample_exact`] will build.
pub const EXACT_SAMPLER_BUDGET: usize = 1 << 22;

#[inline]
pub fn is_zero(w: Amplitude) -> bool {
    w.norm() <= EPS
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Root,
    Zero,
    One,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeRef {
    /// Qubit index, 0 for the root.
    pub layer: usize,
    pub side: Side,
}

impl NodeRef {
    pub const ROOT: NodeRef = NodeRef {
        layer: 0,
        side: Side::Root,
    };

    pub fn qubit(layer: usize, bit: bool) -> Self {
        NodeRef {
            layer,
            side: if bit { Side::One } else { Side::Zero },
        }
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.side {
            Side::Root => f.write_str("root"),
            Side::Zero => write!(f, "q{}:0", self.layer),
            Side::One => write!(f, "q{}:1", self.layer),
        }
    }
}

/// Identifies one coherent computational path family. Ids are never reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BranchLabel(u32);

impl BranchLabel {
    pub const DEFAULT: BranchLabel = BranchLabel(0);

    pub fn id(self) -> u32 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub from: NodeRef,
    pub to: NodeRef,
    pub label: BranchLabel,
    pub weight: Amplitude,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    Forward,
    Reversed,
}

/// Incoming edge slots of one storage layer.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Block {
    pub(crate) w: [[Amplitude; 2]; 2],
    pub(crate) present: [[bool; 2]; 2],
}

impl Block {
    /// Writes a weight; absent slots only materialize for nonzero weights.
    #[inline]
    pub(crate) fn set(&mut self, a: usize, b: usize, w: Amplitude) {
        self.w[a][b] = w;
        if !is_zero(w) {
            self.present[a][b] = true;
        }
    }

    #[inline]
    pub(crate) fn clear(&mut self, a: usize, b: usize) {
        self.w[a][b] = Complex64::new(0.0, 0.0);
    }

    #[inline]
    pub(crate) fn row_mass(&self, a: usize) -> f64 {
        self.w[a][0].norm_sqr() + self.w[a][1].norm_sqr()
    }

    pub(crate) fn swap_rows(&mut self) {
        self.w.swap(0, 1);
        self.present.swap(0, 1);
    }

    pub(crate) fn swap_columns(&mut self, a: usize) {
        self.w[a].swap(0, 1);
        self.present[a].swap(0, 1);
    }
}

/// Rows of the incoming block of storage layer `p` that correspond to real
/// parent nodes. Layer 1 has the root as its only parent.
#[inline]
pub(crate) fn parent_rows(p: usize) -> std::ops::Range<usize> {
    if p == 1 {
        0..1
    } else {
        0..2
    }
}

/// All edges of one branch label.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Branch {
    pub(crate) label: BranchLabel,
    /// `blocks[p - 1]` holds the incoming edges of storage layer `p`.
    pub(crate) blocks: Vec<Block>,
}

impl Branch {
    fn empty(label: BranchLabel, n: usize) -> Self {
        Branch {
            label,
            blocks: vec![Block::default(); n],
        }
    }

    fn ground(n: usize) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let mut branch = Branch::empty(BranchLabel::DEFAULT, n);
        branch.materialize();
        for block in &mut branch.blocks {
            block.w[0][0] = one;
        }
        branch
    }

    fn materialize(&mut self) {
        for (i, block) in self.blocks.iter_mut().enumerate() {
            block.present[0] = [true, true];
            block.present[1] = [i > 0, i > 0];
        }
    }

    pub(crate) fn root_mass(&self) -> f64 {
        self.blocks[0].row_mass(0)
    }

    /// Product of weights along a storage-order path.
    fn path_amplitude(&self, path: &[bool]) -> Amplitude {
        let mut amp = self.blocks[0].w[0][path[0] as usize];
        for p in 1..path.len() {
            if is_zero(amp) {
                return Complex64::new(0.0, 0.0);
            }
            amp *= self.blocks[p].w[path[p - 1] as usize][path[p] as usize];
        }
        amp
    }

    /// Rescales weights so every live node's outgoing row has unit mass and
    /// the root row carries the label's total probability. Path products
    /// are unchanged: each edge picks up `beta(child) / beta(parent)`, where
    /// `beta` is the norm of the sub-net below a node, and the ratios
    /// telescope along any root-to-leaf walk.
    pub(crate) fn normalize(&mut self) {
        let n = self.blocks.len();
        let mut beta_below = [1.0f64; 2];
        for p in (1..n).rev() {
            let block = &mut self.blocks[p];
            let mut beta = [0.0f64; 2];
            for (a, slot) in beta.iter_mut().enumerate() {
                *slot = (0..2)
                    .map(|b| block.w[a][b].norm_sqr() * beta_below[b] * beta_below[b])
                    .sum::<f64>()
                    .sqrt();
            }
            for a in 0..2 {
                for b in 0..2 {
                    if beta[a] > f64::MIN_POSITIVE {
                        block.w[a][b] *= beta_below[b] / beta[a];
                    } else {
                        block.clear(a, b);
                    }
                }
            }
            beta_below = beta;
        }
        for b in 0..2 {
            self.blocks[0].w[0][b] *= beta_below[b];
        }
    }

    /// Splits off the part of this branch that passes through the 1-node of
    /// storage layer `c`. Edges into and out of that node move to the new
    /// branch; nonzero ancestor and descendant edges on walks through it are
    /// duplicated. Zero-weight slots stay behind in `self`.
    pub(crate) fn split_at_one(&mut self, c: usize, label: BranchLabel) -> Branch {
        let n = self.blocks.len();
        let mut out = Branch::empty(label, n);

        let mut reach = [false; 2];
        for a in parent_rows(c) {
            let w = self.blocks[c - 1].w[a][1];
            if !is_zero(w) {
                out.blocks[c - 1].set(a, 1, w);
                self.blocks[c - 1].clear(a, 1);
                reach[a] = true;
            }
        }
        for p in (1..c).rev() {
            let mut up = [false; 2];
            for a in parent_rows(p) {
                for b in 0..2 {
                    let w = self.blocks[p - 1].w[a][b];
                    if reach[b] && !is_zero(w) {
                        out.blocks[p - 1].set(a, b, w);
                        up[a] = true;
                    }
                }
            }
            reach = up;
        }

        if c < n {
            let mut reach = [false; 2];
            for b in 0..2 {
                let w = self.blocks[c].w[1][b];
                if !is_zero(w) {
                    out.blocks[c].set(1, b, w);
                    self.blocks[c].clear(1, b);
                    reach[b] = true;
                }
            }
            for p in (c + 1)..n {
                let mut down = [false; 2];
                for a in 0..2 {
                    for b in 0..2 {
                        let w = self.blocks[p].w[a][b];
                        if reach[a] && !is_zero(w) {
                            out.blocks[p].set(a, b, w);
                            down[b] = true;
                        }
                    }
                }
                reach = down;
            }
        }
        out
    }
}

/// An n-qubit state as a QuDot net.
#[derive(Debug, Clone, PartialEq)]
pub struct QuDotNet {
    n: usize,
    pub(crate) branches: Vec<Branch>,
    pub(crate) orientation: Orientation,
    next_label: u32,
    pub(crate) audit: bool,
    pub(crate) audit_mismatches: usize,
}

impl QuDotNet {
    /// The ground state `|00…0⟩`: a weight-1 walk down the 0-nodes, every
    /// other slot materialized with weight 0, a single default label.
    pub fn new_ground_state(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(QuDotError::InvalidSize);
        }
        Ok(QuDotNet {
            n,
            branches: vec![Branch::ground(n)],
            orientation: Orientation::Forward,
            next_label: 1,
            audit: false,
            audit_mismatches: 0,
        })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn node_count(&self) -> usize {
        2 * self.n + 1
    }

    /// Number of edges including materialized zero-weight ones.
    pub fn edge_count(&self) -> usize {
        self.branches
            .iter()
            .flat_map(|br| br.blocks.iter())
            .map(|blk| blk.present.iter().flatten().filter(|&&p| p).count())
            .sum()
    }

    pub fn labels(&self) -> Vec<BranchLabel> {
        self.branches.iter().map(|b| b.label).collect()
    }

    pub fn label_count(&self) -> usize {
        self.branches.len()
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Squared-magnitude mass of each label's root edges.
    pub fn label_masses(&self) -> Vec<(BranchLabel, f64)> {
        self.branches
            .iter()
            .map(|b| (b.label, b.root_mass()))
            .collect()
    }

    /// When enabled, every measurement cross-checks its outcome probability
    /// against the exact marginal and logs a warning on disagreement.
    pub fn set_audit(&mut self, on: bool) {
        self.audit = on;
    }

    pub fn audit_mismatches(&self) -> usize {
        self.audit_mismatches
    }

    pub(crate) fn fresh_label(&mut self) -> BranchLabel {
        let label = BranchLabel(self.next_label);
        self.next_label += 1;
        label
    }

    pub(crate) fn check_qubit(&self, q: usize) -> Result<()> {
        if q == 0 || q > self.n {
            Err(QuDotError::InvalidQubit { qubit: q, n: self.n })
        } else {
            Ok(())
        }
    }

    /// Storage layer holding qubit `q`.
    pub(crate) fn storage_layer(&self, q: usize) -> Result<usize> {
        self.check_qubit(q)?;
        Ok(match self.orientation {
            Orientation::Forward => q,
            Orientation::Reversed => self.n + 1 - q,
        })
    }

    fn qubit_of_storage(&self, p: usize) -> usize {
        match self.orientation {
            Orientation::Forward => p,
            Orientation::Reversed => self.n + 1 - p,
        }
    }

    fn storage_path(&self, b: &Bitstring) -> Vec<bool> {
        match self.orientation {
            Orientation::Forward => b.bits().to_vec(),
            Orientation::Reversed => b.bits().iter().rev().copied().collect(),
        }
    }

    fn bitstring_of_path(&self, path: Vec<bool>) -> Bitstring {
        let b = Bitstring::new(path);
        match self.orientation {
            Orientation::Forward => b,
            Orientation::Reversed => b.reversed(),
        }
    }

    /// Edges in qubit coordinates. After a SWAP the root points at layer `n`
    /// and every edge runs from layer `q + 1` to layer `q`.
    pub fn edges(&self) -> Vec<Edge> {
        let mut edges = Vec::with_capacity(self.edge_count());
        for branch in &self.branches {
            for (i, block) in branch.blocks.iter().enumerate() {
                let p = i + 1;
                for a in parent_rows(p) {
                    for b in 0..2 {
                        if !block.present[a][b] {
                            continue;
                        }
                        let from = if p == 1 {
                            NodeRef::ROOT
                        } else {
                            NodeRef::qubit(self.qubit_of_storage(p - 1), a == 1)
                        };
                        edges.push(Edge {
                            from,
                            to: NodeRef::qubit(self.qubit_of_storage(p), b == 1),
                            label: branch.label,
                            weight: block.w[a][b],
                        });
                    }
                }
            }
        }
        edges
    }

    /// Weight of the edge `from -> to` under `label`, if that edge exists.
    pub fn edge_weight(&self, from: NodeRef, to: NodeRef, label: BranchLabel) -> Option<Amplitude> {
        self.edges()
            .into_iter()
            .find(|e| e.from == from && e.to == to && e.label == label)
            .map(|e| e.weight)
    }

    /// Samples one basis outcome by walking the net from the root.
    ///
    /// A label is chosen with probability equal to its root mass, then each
    /// step draws `r` in `[0, 1)` and follows the 0-child when `r` is at most
    /// the 0-edge's share of the current node's outgoing mass. The net is not
    /// modified. With several labels the result is exact only when the labels
    /// have disjoint supports.
    pub fn traverse<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Bitstring> {
        let branch = self.pick_branch(rng)?;
        let mut path = Vec::with_capacity(self.n);
        let mut node = 0usize;
        for p in 1..=self.n {
            let row = &branch.blocks[p - 1].w[node];
            let m0 = if is_zero(row[0]) { 0.0 } else { row[0].norm_sqr() };
            let m1 = if is_zero(row[1]) { 0.0 } else { row[1].norm_sqr() };
            if m0 + m1 == 0.0 {
                return Err(QuDotError::CorruptNet(format!(
                    "dead end below storage layer {} under label {}",
                    p - 1,
                    branch.label.id()
                )));
            }
            let r: f64 = rng.random();
            let bit = !(m0 > 0.0 && (m1 == 0.0 || r <= m0 / (m0 + m1)));
            path.push(bit);
            node = bit as usize;
        }
        Ok(self.bitstring_of_path(path))
    }

    /// Samples one basis outcome from the Born distribution of the summed
    /// amplitudes, so interference between labels is honored even when their
    /// supports overlap. A backward pass builds, for every label pair, the
    /// overlap of the sub-nets below each node; the walk then picks each bit
    /// with its exact conditional probability. Costs `O(L^2 n)` for `L`
    /// labels. The net is not modified.
    pub fn sample_exact<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Bitstring> {
        let n = self.n;
        let l = self.branches.len();
        let pairs = l * l;
        if pairs.saturating_mul(2 * n) > EXACT_SAMPLER_BUDGET {
            return Err(QuDotError::InvalidInput(format!(
                "{l} labels on {n} qubits exceed the exact sampler's budget"
            )));
        }
        let zero = Complex64::new(0.0, 0.0);
        // env[p - 1][c][i * l + j]: Σ over walks below node c of storage
        // layer p of conj(product under label i) * (product under label j).
        let mut env = vec![[vec![zero; pairs], vec![zero; pairs]]; n];
        env[n - 1] = [vec![Complex64::new(1.0, 0.0); pairs], vec![Complex64::new(1.0, 0.0); pairs]];
        for p in (1..n).rev() {
            let (upper, lower) = env.split_at_mut(p);
            let below = &lower[0];
            for c in 0..2 {
                let here = &mut upper[p - 1][c];
                for (i, bi) in self.branches.iter().enumerate() {
                    for (j, bj) in self.branches.iter().enumerate() {
                        let mut acc = zero;
                        for d in 0..2 {
                            let wi = bi.blocks[p].w[c][d];
                            let wj = bj.blocks[p].w[c][d];
                            if wi != zero && wj != zero {
                                acc += wi.conj() * wj * below[d][i * l + j];
                            }
                        }
                        here[i * l + j] = acc;
                    }
                }
            }
        }
        let mut alpha = vec![Complex64::new(1.0, 0.0); l];
        let mut node = 0usize;
        let mut path = Vec::with_capacity(n);
        for p in 1..=n {
            let mut mass = [0.0f64; 2];
            let mut next = [vec![zero; l], vec![zero; l]];
            for b in 0..2 {
                for (i, br) in self.branches.iter().enumerate() {
                    next[b][i] = alpha[i] * br.blocks[p - 1].w[node][b];
                }
                let e = &env[p - 1][b];
                let mut q = zero;
                for i in 0..l {
                    if next[b][i] == zero {
                        continue;
                    }
                    for j in 0..l {
                        q += next[b][i].conj() * next[b][j] * e[i * l + j];
                    }
                }
                mass[b] = q.re.max(0.0);
            }
            let total = mass[0] + mass[1];
            if !(total > 0.0) {
                return Err(QuDotError::CorruptNet(format!(
                    "no probability mass below storage layer {}",
                    p - 1
                )));
            }
            let r: f64 = rng.random();
            let bit = !(mass[0] > 0.0 && (mass[1] == 0.0 || r <= mass[0] / total));
            path.push(bit);
            node = bit as usize;
            alpha = std::mem::take(&mut next[node]);
        }
        Ok(self.bitstring_of_path(path))
    }

    fn pick_branch<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<&Branch> {
        if self.branches.len() == 1 {
            return Ok(&self.branches[0]);
        }
        let masses: Vec<f64> = self.branches.iter().map(Branch::root_mass).collect();
        let total: f64 = masses.iter().sum();
        if !(total > 0.0) {
            return Err(QuDotError::CorruptNet("no label carries root mass".into()));
        }
        let mut r = rng.random::<f64>() * total;
        for (branch, m) in self.branches.iter().zip(&masses) {
            if r < *m {
                return Ok(branch);
            }
            r -= m;
        }
        Ok(self
            .branches
            .iter()
            .zip(&masses)
            .rev()
            .find(|(_, m)| **m > 0.0)
            .map(|(b, _)| b)
            .expect("positive total mass"))
    }

    /// Sum over labels of the product of edge weights along `b`'s walk.
    pub fn amplitude_of(&self, b: &Bitstring) -> Result<Amplitude> {
        if b.len() != self.n {
            return Err(QuDotError::InvalidInput(format!(
                "bitstring of length {} for a {}-qubit net",
                b.len(),
                self.n
            )));
        }
        let path = self.storage_path(b);
        Ok(self.branches.iter().map(|br| br.path_amplitude(&path)).sum())
    }

    /// Every outcome with nonzero amplitude, using the default qubit cap.
    pub fn enumerate_paths(&self) -> Result<BTreeMap<Bitstring, Amplitude>> {
        self.enumerate_paths_with_limit(MAX_ENUM_QUBITS)
    }

    pub fn enumerate_paths_with_limit(&self, limit: usize) -> Result<BTreeMap<Bitstring, Amplitude>> {
        let amps = self.dense_amplitudes(limit)?;
        Ok(amps
            .into_iter()
            .enumerate()
            .filter(|(_, a)| !is_zero(*a))
            .map(|(i, a)| (Bitstring::from_index(i, self.n), a))
            .collect())
    }

    /// Amplitudes of all `2^n` outcomes, indexed with qubit 1 as the most
    /// significant bit.
    pub fn dense_amplitudes(&self, limit: usize) -> Result<Vec<Amplitude>> {
        if self.n > limit {
            return Err(QuDotError::SizeLimit { n: self.n, limit });
        }
        let mut out = vec![Complex64::new(0.0, 0.0); 1 << self.n];
        let shifts: Vec<usize> = (1..=self.n)
            .map(|p| self.n - self.qubit_of_storage(p))
            .collect();
        for branch in &self.branches {
            let root = &branch.blocks[0].w[0];
            for b in 0..2 {
                if !is_zero(root[b]) {
                    accumulate(branch, &shifts, 1, b, root[b], b << shifts[0], &mut out);
                }
            }
        }
        Ok(out)
    }

    /// Verifies finiteness, per-label unit row mass at every live non-root
    /// node, and unit total root mass across labels.
    pub fn check_invariants(&self) -> Result<()> {
        let mut total = 0.0;
        for branch in &self.branches {
            for (i, block) in branch.blocks.iter().enumerate() {
                if block.w.iter().flatten().any(|w| !w.re.is_finite() || !w.im.is_finite()) {
                    return Err(QuDotError::CorruptNet(format!(
                        "non-finite weight into storage layer {}",
                        i + 1
                    )));
                }
                if i == 0 {
                    continue;
                }
                for a in 0..2 {
                    let mass = block.row_mass(a);
                    if mass.sqrt() > EPS && (mass - 1.0).abs() > NORM_TOL {
                        return Err(QuDotError::CorruptNet(format!(
                            "node {} of storage layer {i} has outgoing mass {mass} under label {}",
                            a,
                            branch.label.id()
                        )));
                    }
                }
            }
            total += branch.root_mass();
        }
        if (total - 1.0).abs() > NORM_TOL {
            return Err(QuDotError::CorruptNet(format!("root mass sums to {total}")));
        }
        Ok(())
    }

    /// Exact probability that qubit `q` reads 0, by a forward pass over the
    /// layer-to-layer transition probabilities. Single-label nets only.
    pub fn marginal_zero(&self, q: usize) -> Result<f64> {
        let target = self.storage_layer(q)?;
        let branch = self.single_branch()?;
        let root_mass = branch.root_mass();
        if !(root_mass > 0.0) {
            return Err(QuDotError::CorruptNet("root carries no mass".into()));
        }
        let root = &branch.blocks[0].w[0];
        let mut prob = [root[0].norm_sqr() / root_mass, root[1].norm_sqr() / root_mass];
        for p in 2..=target {
            let block = &branch.blocks[p - 1];
            let mut next = [0.0; 2];
            for a in 0..2 {
                let mass = block.row_mass(a);
                if prob[a] == 0.0 || mass == 0.0 {
                    continue;
                }
                for b in 0..2 {
                    next[b] += prob[a] * block.w[a][b].norm_sqr() / mass;
                }
            }
            prob = next;
        }
        Ok(prob[0] / (prob[0] + prob[1]))
    }

    pub(crate) fn single_branch(&self) -> Result<&Branch> {
        match self.branches.as_slice() {
            [only] => Ok(only),
            many => Err(QuDotError::UnsupportedOnCoherentState { labels: many.len() }),
        }
    }

    /// Splits every label on the 1-node of storage layer `c`, returning the
    /// indices (into `branches`) of the newly created labels.
    pub(crate) fn split_branches(&mut self, c: usize) -> Vec<usize> {
        let old = std::mem::take(&mut self.branches);
        let mut created = Vec::new();
        for mut branch in old {
            let label = self.fresh_label();
            let mut split = branch.split_at_one(c, label);
            branch.normalize();
            split.normalize();
            self.branches.push(branch);
            created.push(self.branches.len());
            self.branches.push(split);
        }
        created
    }

    /// Drops labels without root mass and re-materializes a lone survivor.
    pub(crate) fn retire_empty_branches(&mut self) {
        self.branches.retain(|b| b.root_mass().sqrt() > EPS);
        if let [only] = self.branches.as_mut_slice() {
            only.materialize();
        }
    }
}

fn accumulate(
    branch: &Branch,
    shifts: &[usize],
    p: usize,
    node: usize,
    amp: Amplitude,
    index: usize,
    out: &mut [Amplitude],
) {
    if p == shifts.len() {
        out[index] += amp;
        return;
    }
    let row = &branch.blocks[p].w[node];
    for b in 0..2 {
        if !is_zero(row[b]) {
            accumulate(branch, shifts, p + 1, b, amp * row[b], index | (b << shifts[p]), out);
        }
    }
}
