//! Line-oriented text format for circuits.
//!
//! ```text
//! qubits 6
//! reg alpha 0 1
//! reg beta 2 3 4 5
//! check exit beta below 15
//! cknot :2
//! cknot 1 !0:5
//! rot hat 0
//! cphase 0 1 1/2
//! relabel beta gamma
//! ```
//!
//! `!` marks a negative-polarity control. Blank lines and lines starting with
//! `#` are ignored. Op order is execution order.

use super::*;
use std::fmt::Write as _;

/// Renders a circuit in the text format.
pub fn serialize(c: &Circuit) -> String {
    let mut out = String::with_capacity(16 * c.ops().len() + 64);
    let _ = writeln!(out, "qubits {}", c.qubit_count());
    for r in c.registers() {
        out.push_str("reg ");
        out.push_str(&r.name);
        for q in &r.qubits {
            let _ = write!(out, " {q}");
        }
        out.push('\n');
    }
    for k in c.contracts() {
        let point = match k.point {
            ContractPoint::Entry => "entry",
            ContractPoint::Exit => "exit",
        };
        let _ = match k.predicate {
            Predicate::Zero => writeln!(out, "check {point} {} zero", k.register),
            Predicate::Below(n) => writeln!(out, "check {point} {} below {n}", k.register),
        };
    }
    for op in c.ops() {
        match op {
            Instruction::Gate(g) => {
                out.push_str("cknot");
                for (i, ctl) in g.controls().iter().enumerate() {
                    out.push(' ');
                    if ctl.polarity == Polarity::Negative {
                        out.push('!');
                    }
                    let _ = write!(out, "{}", ctl.qubit);
                    if i + 1 == g.arity() {
                        let _ = write!(out, ":{}", g.target());
                    }
                }
                if g.arity() == 0 {
                    let _ = write!(out, " :{}", g.target());
                }
                out.push('\n');
            }
            Instruction::Phase(PhaseGate::Rotation { qubit, kind }) => {
                let kind = match kind {
                    RotationKind::Hat => "hat",
                    RotationKind::Tilde => "tilde",
                    RotationKind::TildeInverse => "tilde-inv",
                };
                let _ = writeln!(out, "rot {kind} {qubit}");
            }
            Instruction::Phase(PhaseGate::ConditionalPhase { a, b, theta }) => {
                let _ = writeln!(out, "cphase {a} {b} {}/{}", theta.numerator(), theta.denominator());
            }
            Instruction::Relabel(a, b) => {
                let _ = writeln!(out, "relabel {a} {b}");
            }
        }
    }
    out
}

struct Cursor<'a> {
    line: usize,
    fields: Vec<&'a str>,
}

impl<'a> Cursor<'a> {
    fn err(&self, field: usize, message: impl Into<String>) -> IrError {
        IrError::Parse { line: self.line, field, message: message.into() }
    }

    fn get(&self, field: usize) -> Result<&'a str, IrError> {
        self.fields.get(field).copied().ok_or_else(|| self.err(field, "missing field"))
    }

    fn expect_len(&self, n: usize) -> Result<(), IrError> {
        if self.fields.len() > n {
            return Err(self.err(n, "unexpected trailing field"));
        }
        Ok(())
    }

    fn qubit(&self, field: usize, text: &str, qubit_count: u32) -> Result<QubitId, IrError> {
        let v: u32 = text.parse().map_err(|_| self.err(field, format!("bad qubit index {text:?}")))?;
        if v >= qubit_count {
            return Err(self.err(field, format!("qubit {v} out of range (qubit count {qubit_count})")));
        }
        Ok(QubitId(v))
    }
}

/// Parses the text format; errors carry the 1-based line and 0-based field.
pub fn parse(doc: &str) -> Result<Circuit, IrError> {
    let mut qubit_count: Option<u32> = None;
    let mut registers: Vec<Register> = Vec::new();
    let mut contracts = Vec::new();
    let mut ops = Vec::new();
    let mut last_line = 0;
    for (idx, raw) in doc.lines().enumerate() {
        let line = idx + 1;
        last_line = line;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let cur = Cursor { line, fields: trimmed.split_whitespace().collect() };
        let kind = cur.get(0)?;
        let Some(n) = qubit_count else {
            if kind != "qubits" {
                return Err(cur.err(0, "expected `qubits` header"));
            }
            cur.expect_len(2)?;
            let v = cur.get(1)?;
            qubit_count = Some(v.parse().map_err(|_| cur.err(1, format!("bad qubit count {v:?}")))?);
            continue;
        };
        match kind {
            "qubits" => return Err(cur.err(0, "repeated `qubits` header")),
            "reg" => {
                if !ops.is_empty() {
                    return Err(cur.err(0, "register declared after ops"));
                }
                let name = cur.get(1)?.to_string();
                if registers.iter().any(|r| r.name == name) {
                    return Err(cur.err(1, format!("duplicate register {name:?}")));
                }
                let qubits = (2..cur.fields.len())
                    .map(|f| cur.qubit(f, cur.fields[f], n))
                    .collect::<Result<Vec<_>, _>>()?;
                for (f, q) in qubits.iter().enumerate() {
                    if registers.iter().any(|r| r.qubits.contains(q)) || qubits[..f].contains(q) {
                        return Err(cur.err(f + 2, format!("qubit {q} already assigned to a register")));
                    }
                }
                registers.push(Register { name, qubits });
            }
            "check" => {
                let point = match cur.get(1)? {
                    "entry" => ContractPoint::Entry,
                    "exit" => ContractPoint::Exit,
                    other => return Err(cur.err(1, format!("unknown check point {other:?}"))),
                };
                let register = cur.get(2)?.to_string();
                if !registers.iter().any(|r| r.name == register) {
                    return Err(cur.err(2, format!("unknown register {register:?}")));
                }
                let predicate = match cur.get(3)? {
                    "zero" => {
                        cur.expect_len(4)?;
                        Predicate::Zero
                    }
                    "below" => {
                        cur.expect_len(5)?;
                        let v = cur.get(4)?;
                        Predicate::Below(v.parse().map_err(|_| cur.err(4, format!("bad bound {v:?}")))?)
                    }
                    other => return Err(cur.err(3, format!("unknown predicate {other:?}"))),
                };
                contracts.push(Contract { point, register, predicate });
            }
            "cknot" => ops.push(Instruction::Gate(parse_cknot(&cur, n)?)),
            "rot" => {
                cur.expect_len(3)?;
                let kind = match cur.get(1)? {
                    "hat" => RotationKind::Hat,
                    "tilde" => RotationKind::Tilde,
                    "tilde-inv" => RotationKind::TildeInverse,
                    other => return Err(cur.err(1, format!("unknown rotation {other:?}"))),
                };
                let qubit = cur.qubit(2, cur.get(2)?, n)?;
                ops.push(Instruction::Phase(PhaseGate::Rotation { qubit, kind }));
            }
            "cphase" => {
                cur.expect_len(4)?;
                let a = cur.qubit(1, cur.get(1)?, n)?;
                let b = cur.qubit(2, cur.get(2)?, n)?;
                if a == b {
                    return Err(cur.err(2, "conditional phase needs two distinct qubits"));
                }
                let text = cur.get(3)?;
                let bad = || cur.err(3, format!("bad angle {text:?}"));
                let (num, den) = text.split_once('/').ok_or_else(bad)?;
                let num: i64 = num.parse().map_err(|_| bad())?;
                let den: u64 = den.parse().map_err(|_| bad())?;
                let theta = PhaseAngle::new(num, den).map_err(|_| bad())?;
                ops.push(Instruction::Phase(PhaseGate::ConditionalPhase { a, b, theta }));
            }
            "relabel" => {
                cur.expect_len(3)?;
                let (a, b) = (cur.get(1)?, cur.get(2)?);
                for (f, name) in [(1, a), (2, b)] {
                    if !registers.iter().any(|r| r.name == name) {
                        return Err(cur.err(f, format!("unknown register {name:?}")));
                    }
                }
                ops.push(Instruction::Relabel(a.to_string(), b.to_string()));
            }
            other => return Err(cur.err(0, format!("unknown op kind {other:?}"))),
        }
    }
    let Some(n) = qubit_count else {
        return Err(IrError::Parse { line: last_line.max(1), field: 0, message: "missing `qubits` header".into() });
    };
    Circuit::new(n, registers, ops)?.with_contracts(contracts)
}

fn parse_cknot(cur: &Cursor<'_>, n: u32) -> Result<Gate, IrError> {
    // Fields after the keyword: control tokens, with the final one carrying
    // `:target` (or a lone `:target` for an uncontrolled NOT).
    let mut controls = Controls::new();
    let mut target = None;
    for f in 1..cur.fields.len() {
        if target.is_some() {
            return Err(cur.err(f, "unexpected field after target"));
        }
        let tok = cur.fields[f];
        let (ctl, tgt) = match tok.split_once(':') {
            Some((c, t)) => (c, Some(t)),
            None => (tok, None),
        };
        if !ctl.is_empty() {
            let (polarity, digits) = match ctl.strip_prefix('!') {
                Some(rest) => (Polarity::Negative, rest),
                None => (Polarity::Positive, ctl),
            };
            let qubit = cur.qubit(f, digits, n)?;
            if controls.iter().any(|c| c.qubit == qubit) {
                return Err(cur.err(f, format!("duplicate control {qubit}")));
            }
            controls.push(ControlSpec { qubit, polarity });
        }
        if let Some(t) = tgt {
            let t = cur.qubit(f, t, n)?;
            if controls.iter().any(|c| c.qubit == t) {
                return Err(cur.err(f, format!("target {t} is also a control")));
            }
            target = Some(t);
        }
    }
    let target = target.ok_or_else(|| cur.err(cur.fields.len(), "missing `:target`"))?;
    Ok(Gate::new_unchecked(controls, target))
}
