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

//! Command-line driver: run circuits, check them against the dense
//! simulator, benchmark gates and measure QFT sampling accuracy.

pub mod bench;
pub mod dsl;
pub mod report;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qudot_core::oracle::{
    exact_distribution, fidelity, fidelity_protocol, qudot_to_dense, tv_sampling_sigma, DenseState,
    GateFamily,
};
use qudot_core::reference::{test_state, QFT_TEST_STATES};
use qudot_core::{
    build_qft, ensemble_run_with, execute, prepare_test_state, shot_rng, Bitstring, Circuit, GateOp,
    Sampler, MAX_ENUM_QUBITS, RNG_ALGORITHM,
};
use rand::Rng;
use serde::Serialize;

use crate::bench::{BenchGate, CSV_HEADER};
use crate::report::{string_counts, string_probabilities, to_json, Metrics, RunReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "qudot", version, about = "QuDot Net quantum circuit simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Execute a circuit file over an ensemble of shots and report counts.
    Run(RunArgs),
    /// Compare the net against the dense simulator.
    Verify(VerifyArgs),
    /// Time gate sweeps or QFT execution over a list of qubit counts.
    Bench(BenchArgs),
    /// Sample the QFT of a 4-qubit test state over a ladder of shot counts.
    QftAccuracy(AccuracyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct SeedArgs {
    /// Master seed; falls back to QUDOT_SEED, else drawn and printed.
    #[arg(long, env = "QUDOT_SEED")]
    seed: Option<u64>,
    /// Worker threads for ensembles.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    workers: u64,
    /// Final read-out: label-first traversal, or exact Born sampling that
    /// also handles interfering branch labels.
    #[arg(long, value_enum, default_value_t = SamplerArg::Traverse)]
    sampler: SamplerArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SamplerArg {
    Traverse,
    Exact,
}

impl SeedArgs {
    fn sampler(&self) -> Sampler {
        match self.sampler {
            SamplerArg::Traverse => Sampler::Traverse,
            SamplerArg::Exact => Sampler::Exact,
        }
    }

    fn ensemble(&self, prep: &Circuit, main: &Circuit, shots: u64, seed: u64) -> qudot_core::Result<qudot_core::Distribution> {
        ensemble_run_with(prep, main, shots, seed, self.workers as usize, self.sampler())
    }
}

#[derive(Debug, Args)]
struct RunArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    shots: u64,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Largest register compared against the dense simulator.
    #[arg(long, default_value_t = 12)]
    oracle_cap: usize,
    /// Leave wall-clock timings out of the report.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Circuit file; omit when using --protocol.
    #[arg(required_unless_present = "protocol", conflicts_with = "protocol")]
    file: Option<PathBuf>,
    /// Run the gate fidelity sweep for one gate family instead of a file.
    #[arg(long, value_enum)]
    protocol: Option<ProtocolGate>,
    /// Register size for --protocol.
    #[arg(long, default_value_t = 10)]
    qubits: usize,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    shots: u64,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, default_value_t = MAX_ENUM_QUBITS)]
    oracle_cap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProtocolGate {
    X,
    H,
    Rk,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// x, h, rk, qft or iqft.
    gate: String,
    /// Ascending comma-separated qubit counts.
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// Rotation index for `rk`.
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Also print linear and quadratic fits to stderr.
    #[arg(long)]
    fit: bool,
}

#[derive(Debug, Args)]
struct AccuracyArgs {
    /// qft12, qft13, qft14, qft23, qft24 or qft34.
    state: String,
    #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000,500000")]
    ladder: Vec<u64>,
    #[command(flatten)]
    seed: SeedArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Parse(Vec<String>),
    Runtime(String),
}

impl From<qudot_core::QuDotError> for Failure {
    fn from(e: qudot_core::QuDotError) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome = Result<String, Failure>;

/// Runs the command line `args` (program name first), writing the report to
/// `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(a, err),
        Command::Verify(a) => cmd_verify(a, err),
        Command::Bench(a) => cmd_bench(a, err),
        Command::QftAccuracy(a) => cmd_qft_accuracy(a, err),
    };
    match result {
        Ok(text) => {
            let _ = out.write_all(text.as_bytes());
            EXIT_OK
        }
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Parse(lines)) => {
            for l in lines {
                let _ = writeln!(err, "error: {l}");
            }
            EXIT_PARSE
        }
        Err(Failure::Runtime(m)) => {
            let _ = writeln!(err, "error: {m}");
            EXIT_RUNTIME
        }
    }
}

fn resolve_seed(seed: Option<u64>, err: &mut dyn Write) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::rng().random();
        let _ = writeln!(err, "seed: {s}");
        s
    })
}

fn load(path: &PathBuf) -> Result<Circuit, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
    let circuit = dsl::parse(&text)
        .map_err(|errs| Failure::Parse(errs.iter().map(|e| e.to_string()).collect()))?;
    let violations = circuit.validate();
    if !violations.is_empty() {
        return Err(Failure::Parse(violations.iter().map(|v| v.to_string()).collect()));
    }
    Ok(circuit)
}

fn sampler_name(s: Sampler) -> &'static str {
    match s {
        Sampler::Traverse => "traverse",
        Sampler::Exact => "exact",
    }
}

fn millis(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn cmd_run(a: RunArgs, err: &mut dyn Write) -> Outcome {
    let t = Instant::now();
    let circuit = load(&a.file)?;
    let parse_ms = millis(t);
    let seed = resolve_seed(a.seed.seed, err);
    let t = Instant::now();
    let empty = Circuit::new(circuit.qubits())?;
    let dist = a.seed.ensemble(&empty, &circuit, a.shots, seed)?;
    let execute_ms = millis(t);
    if a.format == Format::Csv {
        let mut s = String::from("outcome,count\n");
        for (k, v) in &dist.counts {
            s.push_str(&format!("{k},{v}\n"));
        }
        return Ok(s);
    }
    let t = Instant::now();
    let metrics = if circuit.qubits() <= a.oracle_cap.min(MAX_ENUM_QUBITS) {
        Some(Metrics::compare(&exact_distribution(&empty, &circuit)?, &dist))
    } else {
        None
    };
    let oracle_ms = millis(t);
    let timing_ms = (!a.no_timing).then(|| {
        BTreeMap::from([("parse", parse_ms), ("execute", execute_ms), ("oracle", oracle_ms)])
    });
    Ok(to_json(&RunReport {
        command: "run",
        qubits: circuit.qubits(),
        seed,
        shots: a.shots,
        rng: RNG_ALGORITHM,
        sampler: sampler_name(a.seed.sampler()),
        counts: string_counts(&dist),
        metrics,
        timing_ms,
    }))
}

#[derive(Serialize)]
struct OutcomeDelta {
    expected: f64,
    observed: f64,
    delta: f64,
}

#[derive(Serialize)]
struct VerifyReport {
    command: &'static str,
    qubits: usize,
    /// Ops before the first measurement, compared state-to-state.
    unitary_ops: usize,
    fidelity: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampled: Option<SampledCheck>,
}

#[derive(Serialize)]
struct SampledCheck {
    seed: u64,
    shots: u64,
    rng: &'static str,
    sampler: &'static str,
    metrics: Metrics,
    outcomes: BTreeMap<String, OutcomeDelta>,
}

#[derive(Serialize)]
struct ProtocolReport {
    command: &'static str,
    gate: String,
    qubits: usize,
    cases: usize,
    worst_fidelity: f64,
    worst_case: qudot_core::oracle::FidelityCase,
}

fn cmd_verify(a: VerifyArgs, err: &mut dyn Write) -> Outcome {
    let cap = a.oracle_cap.min(MAX_ENUM_QUBITS);
    let refuse = |n: usize| {
        Failure::Runtime(format!("{n} qubits exceeds the dense-simulator cap of {cap}"))
    };
    if let Some(gate) = a.protocol {
        if a.qubits > cap {
            return Err(refuse(a.qubits));
        }
        let family = match gate {
            ProtocolGate::X => GateFamily::X,
            ProtocolGate::H => GateFamily::H,
            ProtocolGate::Rk => GateFamily::Rk,
        };
        let report = fidelity_protocol(family, a.qubits)?;
        if a.format == Format::Csv {
            let mut s = String::from("gate,base,targets,fidelity\n");
            for c in &report.cases {
                let targets: Vec<String> = c.targets.iter().map(|q| q.to_string()).collect();
                s.push_str(&format!("{},{},{},{:.17}\n", c.gate, c.base, targets.join(" "), c.fidelity));
            }
            return Ok(s);
        }
        let worst_case = report
            .cases
            .iter()
            .min_by(|x, y| x.fidelity.total_cmp(&y.fidelity))
            .cloned()
            .ok_or_else(|| Failure::Runtime("empty protocol".into()))?;
        return Ok(to_json(&ProtocolReport {
            command: "verify",
            gate: format!("{gate:?}").to_lowercase(),
            qubits: a.qubits,
            cases: report.cases.len(),
            worst_fidelity: report.worst(),
            worst_case,
        }));
    }

    let path = a.file.expect("clap requires a file without --protocol");
    let circuit = load(&path)?;
    let n = circuit.qubits();
    if n > cap {
        return Err(refuse(n));
    }
    let expanded: Vec<GateOp> = circuit.expanded().into_iter().map(|(_, op)| op).collect();
    let split = expanded
        .iter()
        .position(|op| matches!(op, GateOp::Measure { .. } | GateOp::SemiControl { .. }))
        .unwrap_or(expanded.len());
    let prefix = Circuit::from_ops(n, expanded[..split].iter().copied())?;
    let mut rng = shot_rng(0, 0);
    let net = execute(&prefix, &mut rng)?.net;
    let mut dense = DenseState::ground(n)?;
    dense.run(&prefix, &mut rng)?;
    let fid = fidelity(&qudot_to_dense(&net)?, &dense)?;

    let sampled = if split < expanded.len() {
        let seed = resolve_seed(a.seed.seed, err);
        let empty = Circuit::new(n)?;
        let dist = a.seed.ensemble(&empty, &circuit, a.shots, seed)?;
        let expected = exact_distribution(&empty, &circuit)?;
        let mut keys: Vec<&Bitstring> = expected.keys().collect();
        keys.extend(dist.counts.keys().filter(|k| !expected.contains_key(*k)));
        let outcomes = keys
            .into_iter()
            .map(|k| {
                let e = expected.get(k).copied().unwrap_or(0.0);
                let o = dist.frequency(k);
                (k.to_string(), OutcomeDelta { expected: e, observed: o, delta: o - e })
            })
            .collect();
        Some(SampledCheck {
            seed,
            shots: a.shots,
            rng: RNG_ALGORITHM,
            sampler: sampler_name(a.seed.sampler()),
            metrics: Metrics::compare(&expected, &dist),
            outcomes,
        })
    } else {
        None
    };
    if a.format == Format::Csv {
        let mut s = format!("fidelity,{fid:.17}\n");
        if let Some(c) = &sampled {
            s.push_str("outcome,expected,observed,delta\n");
            for (k, d) in &c.outcomes {
                s.push_str(&format!("{k},{},{},{}\n", d.expected, d.observed, d.delta));
            }
        }
        return Ok(s);
    }
    Ok(to_json(&VerifyReport {
        command: "verify",
        qubits: n,
        unitary_ops: split,
        fidelity: fid,
        sampled,
    }))
}

#[derive(Serialize)]
struct BenchReport {
    command: &'static str,
    methodology: &'static str,
    rows: Vec<bench::BenchRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    linear: Option<bench::Fit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quadratic: Option<bench::Fit>,
}

const BENCH_METHOD: &str = "per-sweep time, median of repetitions after one discarded warm-up; \
each repetition times enough back-to-back sweeps to span at least 1 ms and repetitions are \
interleaved across sizes; a sweep applies a \
single-qubit gate once to every qubit layer, or runs a full qft/iqft circuit";

fn cmd_bench(a: BenchArgs, err: &mut dyn Write) -> Outcome {
    let gate = BenchGate::parse(&a.gate, a.k).ok_or_else(|| {
        Failure::Usage(format!("unknown gate `{}`; expected x, h, rk, qft or iqft", a.gate))
    })?;
    if a.sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(Failure::Usage("--sizes must be ascending".into()));
    }
    if a.sizes.contains(&0) {
        return Err(Failure::Usage("--sizes must be positive".into()));
    }
    let rows = bench::bench(gate, &a.sizes, a.reps)?;
    let xs: Vec<f64> = rows.iter().map(|r| r.qubits as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mean_ns).collect();
    let linear = bench::polyfit(&xs, &ys, 1);
    let quadratic = bench::polyfit(&xs, &ys, 2);
    if a.fit {
        if let Some(l) = &linear {
            let _ = writeln!(err, "linear: coefficients {:?}, R^2 {:.6}", l.coefficients, l.r_squared);
        }
        if let Some(q) = &quadratic {
            let _ = writeln!(err, "quadratic: coefficients {:?}, R^2 {:.6}", q.coefficients, q.r_squared);
            if let Some(t) = linear.as_ref().and_then(|l| bench::f_test(l, q)) {
                let _ = writeln!(err, "F-test quadratic vs linear: F {:.3}, p {:.3e}", t.statistic, t.p_value);
            }
        }
    }
    match a.format {
        Format::Csv => {
            let mut s = format!("{CSV_HEADER}\n");
            for r in &rows {
                s.push_str(&r.csv());
                s.push('\n');
            }
            Ok(s)
        }
        Format::Json => Ok(to_json(&BenchReport {
            command: "bench",
            methodology: BENCH_METHOD,
            rows,
            linear,
            quadratic,
        })),
    }
}

#[derive(Serialize)]
struct Rung {
    shots: u64,
    tv_distance: f64,
    max_relative_error: f64,
    /// Binomial noise scale of the TV distance at this shot count.
    tv_sigma: f64,
    observed: BTreeMap<String, f64>,
}

#[derive(Serialize)]
struct AccuracyReport {
    command: &'static str,
    state: String,
    seed: u64,
    rng: &'static str,
    expected: BTreeMap<String, f64>,
    rungs: Vec<Rung>,
    /// Each rung's TV distance is at most the previous one plus twice the
    /// previous rung's noise scale.
    tv_non_increasing: bool,
}

/// True when TV distance does not rise by more than `2σ` of the preceding
/// rung's sampling noise.
pub fn tv_trend_holds(tv: &[f64], sigma: &[f64]) -> bool {
    tv.windows(2)
        .zip(sigma)
        .all(|(w, s)| w[1] <= w[0] + 2.0 * s)
}

fn cmd_qft_accuracy(a: AccuracyArgs, err: &mut dyn Write) -> Outcome {
    let state = test_state(&a.state.to_ascii_lowercase()).ok_or_else(|| {
        let names: Vec<&str> = QFT_TEST_STATES.iter().map(|s| s.name).collect();
        Failure::Usage(format!("unknown state `{}`; expected one of {}", a.state, names.join(", ")))
    })?;
    if a.ladder.is_empty() || a.ladder.contains(&0) {
        return Err(Failure::Usage("--ladder needs positive shot counts".into()));
    }
    let seed = resolve_seed(a.seed.seed, err);
    let expected: BTreeMap<Bitstring, f64> = state
        .qft_distribution
        .iter()
        .map(|(k, p)| (k.parse().expect("table outcomes are bitstrings"), *p))
        .collect();
    let prep = prepare_test_state(state.hadamards.0, state.hadamards.1)?;
    let qft = build_qft(4)?;
    let mut rungs = Vec::new();
    for &shots in &a.ladder {
        let dist = a.seed.ensemble(&prep, &qft, shots, seed)?;
        let m = Metrics::compare(&expected, &dist);
        rungs.push(Rung {
            shots,
            tv_distance: m.tv_distance,
            max_relative_error: m.max_relative_error,
            tv_sigma: tv_sampling_sigma(&expected, shots),
            observed: string_probabilities(&dist.frequencies()),
        });
    }
    let tv: Vec<f64> = rungs.iter().map(|r| r.tv_distance).collect();
    let sigma: Vec<f64> = rungs.iter().map(|r| r.tv_sigma).collect();
    let trend = tv_trend_holds(&tv, &sigma);
    if a.format == Format::Csv {
        let mut s = String::from("shots,tv_distance,max_relative_error,tv_sigma\n");
        for r in &rungs {
            s.push_str(&format!("{},{},{},{}\n", r.shots, r.tv_distance, r.max_relative_error, r.tv_sigma));
        }
        return Ok(s);
    }
    Ok(to_json(&AccuracyReport {
        command: "qft-accuracy",
        state: state.name.to_string(),
        seed,
        rng: RNG_ALGORITHM,
        expected: string_probabilities(&expected),
        rungs,
        tv_non_increasing: trend,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trend_rule() {
        assert!(tv_trend_holds(&[0.1, 0.05, 0.01], &[0.01, 0.005, 0.001]));
        assert!(tv_trend_holds(&[0.05, 0.06], &[0.01, 0.001]));
        assert!(!tv_trend_holds(&[0.05, 0.08], &[0.01, 0.001]));
        assert!(tv_trend_holds(&[0.05], &[0.01]));
    }
}
