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

//! Timing sweeps and polynomial fits of time against qubit count.

use std::fmt;
use std::hint::black_box;
use std::str::FromStr;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use qudot_core::{build_iqft, build_qft, execute, shot_rng, PhaseK, QuDotNet, SingleQubitGate};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BenchGate {
    Single(SingleQubitGate),
    Qft,
    Iqft,
}

impl BenchGate {
    /// Parses `x`, `h`, `rk`, `qft` or `iqft`; `rk` uses rotation `k`.
    pub fn parse(name: &str, k: u32) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "x" => Some(BenchGate::Single(SingleQubitGate::X)),
            "h" => Some(BenchGate::Single(SingleQubitGate::H)),
            "rk" => Some(BenchGate::Single(SingleQubitGate::R(PhaseK(k)))),
            "qft" => Some(BenchGate::Qft),
            "iqft" => Some(BenchGate::Iqft),
            _ => None,
        }
    }
}

impl FromStr for BenchGate {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BenchGate::parse(s, 2).ok_or_else(|| format!("unknown gate `{s}`; expected x, h, rk, qft or iqft"))
    }
}

impl fmt::Display for BenchGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchGate::Single(SingleQubitGate::R(k)) => write!(f, "rk{}", k.0),
            BenchGate::Single(g) => write!(f, "{g}"),
            BenchGate::Qft => f.write_str("qft"),
            BenchGate::Iqft => f.write_str("iqft"),
        }
    }
}

/// One CSV row. `mean_ns` holds the median of the timed repetitions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub qubits: usize,
    pub gate: String,
    pub mean_ns: f64,
    pub reps: usize,
}

pub const CSV_HEADER: &str = "qubits,gate,mean_ns,reps";

impl BenchRow {
    pub fn csv(&self) -> String {
        format!("{},{},{:.0},{}", self.qubits, self.gate, self.mean_ns, self.reps)
    }
}

/// Each timed repetition spans at least this long.
pub const MIN_SAMPLE: Duration = Duration::from_millis(1);

/// Total time of `iters` back-to-back sweeps. Single-qubit gates are applied
/// once to every layer of a ground-state net per sweep; QFT and IQFT run the
/// full circuit per sweep. Net and circuit construction are not timed.
pub fn time_sweeps(gate: BenchGate, n: usize, iters: u32) -> qudot_core::Result<Duration> {
    match gate {
        BenchGate::Single(g) => {
            let mut net = QuDotNet::new_ground_state(n)?;
            let start = Instant::now();
            for _ in 0..iters {
                for q in 1..=n {
                    net.apply_single(g, q)?;
                }
            }
            let t = start.elapsed();
            black_box(&net);
            Ok(t)
        }
        BenchGate::Qft | BenchGate::Iqft => {
            let c = if gate == BenchGate::Qft {
                build_qft(n)?
            } else {
                build_iqft(n)?
            };
            let mut rng = shot_rng(0, 0);
            let start = Instant::now();
            for _ in 0..iters {
                black_box(execute(&c, &mut rng)?);
            }
            Ok(start.elapsed())
        }
    }
}

/// Per-sweep time for each size: the median over `reps` repetitions, each
/// timing enough sweeps to span [`MIN_SAMPLE`], after a discarded warm-up.
/// Repetitions are interleaved across sizes so that slow drift in machine
/// speed affects every size alike instead of biasing the fit.
pub fn bench(gate: BenchGate, sizes: &[usize], reps: usize) -> qudot_core::Result<Vec<BenchRow>> {
    let reps = reps.max(1);
    let iters = sizes
        .iter()
        .map(|&n| {
            let warm = time_sweeps(gate, n, 1)?;
            Ok((MIN_SAMPLE.as_nanos() / warm.as_nanos().max(1)).clamp(1, 100_000) as u32)
        })
        .collect::<qudot_core::Result<Vec<u32>>>()?;
    let mut samples = vec![Vec::with_capacity(reps); sizes.len()];
    for _ in 0..reps {
        for (i, &n) in sizes.iter().enumerate() {
            let t = time_sweeps(gate, n, iters[i])?;
            samples[i].push(t.as_nanos() as f64 / iters[i] as f64);
        }
    }
    Ok(sizes
        .iter()
        .zip(samples)
        .map(|(&n, mut ns)| {
            ns.sort_by(f64::total_cmp);
            let median = if reps % 2 == 1 {
                ns[reps / 2]
            } else {
                (ns[reps / 2 - 1] + ns[reps / 2]) / 2.0
            };
            BenchRow {
                qubits: n,
                gate: gate.to_string(),
                mean_ns: median,
                reps,
            }
        })
        .collect())
}

/// Least-squares polynomial fit `y = c0 + c1 x + ... + cd x^d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Fit {
    pub coefficients: Vec<f64>,
    pub r_squared: f64,
    pub rss: f64,
    pub observations: usize,
}

pub fn polyfit(xs: &[f64], ys: &[f64], degree: usize) -> Option<Fit> {
    let m = xs.len();
    if m != ys.len() || m <= degree {
        return None;
    }
    // Scale x to [0, 1] for conditioning, then map coefficients back.
    let xmax = xs.iter().cloned().fold(0.0, f64::max);
    if xmax <= 0.0 {
        return None;
    }
    let a = DMatrix::from_fn(m, degree + 1, |i, j| (xs[i] / xmax).powi(j as i32));
    let b = DVector::from_column_slice(ys);
    let sol = a.clone().svd(true, true).solve(&b, 1e-14).ok()?;
    let resid = &a * &sol - &b;
    let rss = resid.norm_squared();
    let mean = ys.iter().sum::<f64>() / m as f64;
    let tss: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let coefficients = sol
        .iter()
        .enumerate()
        .map(|(j, c)| c / xmax.powi(j as i32))
        .collect();
    Some(Fit {
        coefficients,
        r_squared: if tss > 0.0 { 1.0 - rss / tss } else { 1.0 },
        rss,
        observations: m,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// Nested-model F-test of `full` against `reduced`.
pub fn f_test(reduced: &Fit, full: &Fit) -> Option<FTest> {
    let p1 = reduced.coefficients.len() as f64;
    let p2 = full.coefficients.len() as f64;
    let n = full.observations as f64;
    if p2 <= p1 || n <= p2 {
        return None;
    }
    let d1 = p2 - p1;
    let d2 = n - p2;
    let statistic = ((reduced.rss - full.rss) / d1) / (full.rss.max(f64::MIN_POSITIVE) / d2);
    let p_value = FisherSnedecor::new(d1, d2).ok()?.sf(statistic);
    Some(FTest { statistic, p_value })
}
