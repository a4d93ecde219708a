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

//! Structured reports written by the commands.

use std::collections::BTreeMap;

use qudot_core::oracle::{chi_square_gof, distribution_metrics};
use qudot_core::{Bitstring, Distribution};
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub tv_distance: f64,
    pub max_relative_error: f64,
    /// Chi-square goodness-of-fit p-value; absent with fewer than two
    /// possible outcomes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chi_square_p: Option<f64>,
}

impl Metrics {
    pub fn compare(expected: &BTreeMap<Bitstring, f64>, observed: &Distribution) -> Self {
        let m = distribution_metrics(expected, observed);
        Metrics {
            tv_distance: m.tv_distance,
            max_relative_error: m.max_relative_error,
            chi_square_p: chi_square_gof(expected, observed).ok().map(|c| c.p_value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub qubits: usize,
    pub seed: u64,
    pub shots: u64,
    pub rng: &'static str,
    pub sampler: &'static str,
    pub counts: BTreeMap<String, u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Metrics>,
    /// Wall-clock milliseconds per phase.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<BTreeMap<&'static str, f64>>,
}

pub fn string_counts(d: &Distribution) -> BTreeMap<String, u64> {
    d.counts.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub fn string_probabilities(p: &BTreeMap<Bitstring, f64>) -> BTreeMap<String, f64> {
    p.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Pretty JSON with object keys in sorted order.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let v: Value = serde_json::to_value(value).expect("reports serialize");
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_are_sorted_and_optionals_skipped() {
        let mut counts = BTreeMap::new();
        counts.insert("1".to_string(), 3);
        counts.insert("0".to_string(), 1);
        let r = RunReport {
            command: "run",
            qubits: 1,
            seed: 7,
            shots: 4,
            rng: "r",
            sampler: "traverse",
            counts,
            metrics: None,
            timing_ms: None,
        };
        let s = to_json(&r);
        let keys: Vec<usize> = ["command", "counts", "qubits", "rng", "sampler", "seed", "shots"]
            .iter()
            .map(|k| s.find(&format!("\"{k}\"")).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        assert!(!s.contains("metrics") && !s.contains("timing"));
        assert!(s.find("\"0\"").unwrap() < s.find("\"1\"").unwrap());
    }
}
