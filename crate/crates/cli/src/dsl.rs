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

//! Line-oriented circuit language.
//!
//! ```text
//! qubits 3        # header, required first
//! h 1
//! rk 2 3          # R(3) on qubit 2
//! rkdg 2 3        # conjugate phase
//! scu rk 2 1 3    # semi-quantum R(2), control 1, target 3
//! ccu x 1 2       # coherent CNOT
//! swap
//! m 1
//! qft
//! ```

use std::fmt;
use std::fmt::Write as _;

use qudot_core::{Circuit, GateOp, PhaseK, SingleQubitGate};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

fn number<T: std::str::FromStr>(tok: &str, what: &str) -> Result<T, String> {
    tok.parse()
        .map_err(|_| format!("expected {what}, found `{tok}`"))
}

fn expect_len(toks: &[&str], n: usize, usage: &str) -> Result<(), String> {
    if toks.len() == n {
        Ok(())
    } else {
        Err(format!("usage: {usage}"))
    }
}

/// Reads a gate name (and its `K` for rotations) from the front of `toks`.
fn gate<'a>(toks: &'a [&'a str]) -> Result<(SingleQubitGate, &'a [&'a str]), String> {
    let name = toks.first().ok_or("missing gate name")?.to_ascii_lowercase();
    match name.as_str() {
        "x" => Ok((SingleQubitGate::X, &toks[1..])),
        "h" => Ok((SingleQubitGate::H, &toks[1..])),
        "rk" | "rkdg" => {
            let k = PhaseK(number(toks.get(1).ok_or("missing K")?, "rotation K")?);
            let g = if name == "rk" {
                SingleQubitGate::R(k)
            } else {
                SingleQubitGate::RInv(k)
            };
            Ok((g, &toks[2..]))
        }
        other => Err(format!("`{other}` cannot be controlled; use x, h, rk or rkdg")),
    }
}

fn op(toks: &[&str]) -> Result<GateOp, String> {
    let kw = toks[0].to_ascii_lowercase();
    let args = &toks[1..];
    match kw.as_str() {
        "x" | "h" | "m" => {
            expect_len(toks, 2, &format!("{kw} Q"))?;
            let q = number(args[0], "qubit index")?;
            Ok(match kw.as_str() {
                "x" => GateOp::x(q),
                "h" => GateOp::h(q),
                _ => GateOp::m(q),
            })
        }
        "rk" | "rkdg" => {
            expect_len(toks, 3, &format!("{kw} Q K"))?;
            let qubit = number(args[0], "qubit index")?;
            let k = PhaseK(number(args[1], "rotation K")?);
            let gate = if kw == "rk" {
                SingleQubitGate::R(k)
            } else {
                SingleQubitGate::RInv(k)
            };
            Ok(GateOp::Single { gate, qubit })
        }
        "swap" | "qft" | "iqft" => {
            expect_len(toks, 1, &kw)?;
            Ok(match kw.as_str() {
                "swap" => GateOp::SwapAll,
                "qft" => GateOp::Qft,
                _ => GateOp::Iqft,
            })
        }
        "scu" | "ccu" => {
            let usage = format!("{kw} (x|h|rk K|rkdg K) C T");
            let (g, rest) = gate(args).map_err(|e| format!("{e}; usage: {usage}"))?;
            if rest.len() != 2 {
                return Err(format!("usage: {usage}"));
            }
            let c = number(rest[0], "control index")?;
            let t = number(rest[1], "target index")?;
            Ok(if kw == "scu" {
                GateOp::scu(g, c, t)
            } else {
                GateOp::ccu(g, c, t)
            })
        }
        "qubits" => Err("duplicate qubits header".into()),
        other => Err(format!("unknown keyword `{other}`")),
    }
}

/// Parses program text, returning every error found.
pub fn parse(text: &str) -> Result<Circuit, Vec<ParseError>> {
    let mut errors = Vec::new();
    let mut circuit: Option<Circuit> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let code = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = code.split_whitespace().collect();
        if toks.is_empty() {
            continue;
        }
        let mut fail = |message: String| errors.push(ParseError { line, message });
        match circuit.as_mut() {
            None => {
                if !toks[0].eq_ignore_ascii_case("qubits") || toks.len() != 2 {
                    fail("expected `qubits N` header".into());
                    return Err(errors);
                }
                match number::<usize>(toks[1], "qubit count")
                    .and_then(|n| Circuit::new(n).map_err(|e| e.to_string()))
                {
                    Ok(c) => circuit = Some(c),
                    Err(e) => {
                        fail(e);
                        return Err(errors);
                    }
                }
            }
            Some(c) => match op(&toks) {
                Ok(o) => {
                    if let Err(e) = c.push(o) {
                        fail(e.to_string());
                    }
                }
                Err(e) => fail(e),
            },
        }
    }
    match circuit {
        None => Err(vec![ParseError {
            line: text.lines().count().max(1),
            message: "missing `qubits N` header".into(),
        }]),
        Some(c) if errors.is_empty() => Ok(c),
        Some(_) => Err(errors),
    }
}

/// Program text that parses back to `circuit`.
pub fn print(circuit: &Circuit) -> String {
    let mut out = format!("qubits {}\n", circuit.qubits());
    for op in circuit.ops() {
        writeln!(out, "{op}").unwrap();
    }
    out
}
