//! Exact classical simulation of gate-only circuits on basis states.

use super::SimError;
use crate::ir::{Circuit, ContractPoint, Instruction, QubitId, Register};
use smallvec::SmallVec;

/// One bit per qubit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisState {
    width: u32,
    words: Vec<u64>,
}

impl BasisState {
    pub fn zeros(width: u32) -> Self {
        BasisState { width, words: vec![0; (width as usize).div_ceil(64).max(1)] }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn get(&self, q: QubitId) -> bool {
        (self.words[q.index() / 64] >> (q.index() % 64)) & 1 == 1
    }

    pub fn set(&mut self, q: QubitId, bit: bool) {
        let w = &mut self.words[q.index() / 64];
        let m = 1u64 << (q.index() % 64);
        if bit {
            *w |= m;
        } else {
            *w &= !m;
        }
    }

    pub fn flip(&mut self, q: QubitId) {
        self.words[q.index() / 64] ^= 1u64 << (q.index() % 64);
    }

    /// Value of a register, qubit `i` of the list being bit `i` (at most 64 qubits).
    pub fn read(&self, qubits: &[QubitId]) -> u64 {
        debug_assert!(qubits.len() <= 64);
        qubits.iter().enumerate().fold(0, |acc, (i, &q)| acc | (u64::from(self.get(q)) << i))
    }

    /// Writes `value` into the listed qubits, bit `i` to qubit `i`.
    pub fn write(&mut self, qubits: &[QubitId], value: u64) {
        for (i, &q) in qubits.iter().enumerate() {
            self.set(q, i < 64 && (value >> i) & 1 == 1);
        }
    }

    /// Bit string, qubit 0 first.
    pub fn to_bit_string(&self) -> String {
        (0..self.width).map(|q| if self.get(QubitId(q)) { '1' } else { '0' }).collect()
    }

    /// Parses a bit string written qubit 0 first.
    pub fn from_bit_string(s: &str) -> Option<Self> {
        let mut st = BasisState::zeros(s.len() as u32);
        for (i, ch) in s.chars().enumerate() {
            match ch {
                '0' => {}
                '1' => st.set(QubitId(i as u32), true),
                _ => return None,
            }
        }
        Some(st)
    }

    /// Low 64 qubits as an integer.
    pub fn as_u64(&self) -> u64 {
        self.words[0]
    }
}

/// Reads the register `name` of `layout` from `s`.
pub fn read_register(layout: &[Register], name: &str, s: &BasisState) -> Option<u64> {
    layout.iter().find(|r| r.name == name).map(|r| s.read(&r.qubits))
}

#[derive(Clone, Debug)]
enum Program {
    /// All qubits in one word: `if x & mask == want { x ^= flip }`.
    Narrow(Vec<(u64, u64, u64)>),
    Wide(Vec<WideGate>),
}

#[derive(Clone, Debug)]
struct WideGate {
    /// `(word, mask, want)` per word touched by the controls.
    controls: Vec<(usize, u64, u64)>,
    target: (usize, u64),
}

/// Gate list compiled to bit masks for repeated simulation.
#[derive(Clone, Debug)]
pub struct BasisProgram {
    width: u32,
    program: Program,
}

impl BasisProgram {
    /// Compiles the gates of `c`; relabels are dropped and phase gates rejected.
    pub fn compile(c: &Circuit) -> Result<Self, SimError> {
        let width = c.qubit_count();
        let mut narrow = Vec::new();
        let mut wide = Vec::new();
        for (i, op) in c.ops().iter().enumerate() {
            let g = match op {
                Instruction::Gate(g) => g,
                Instruction::Phase(_) => return Err(SimError::PhaseGate { op: i }),
                Instruction::Relabel(..) => continue,
            };
            if width <= 64 {
                let (mut mask, mut want) = (0u64, 0u64);
                for ctl in g.controls() {
                    let b = 1u64 << ctl.qubit.index();
                    mask |= b;
                    if ctl.fires_on(true) {
                        want |= b;
                    }
                }
                narrow.push((mask, want, 1u64 << g.target().index()));
            } else {
                let mut controls: Vec<(usize, u64, u64)> = Vec::new();
                for ctl in g.controls() {
                    let (w, b) = (ctl.qubit.index() / 64, 1u64 << (ctl.qubit.index() % 64));
                    let want = if ctl.fires_on(true) { b } else { 0 };
                    match controls.iter_mut().find(|e| e.0 == w) {
                        Some(e) => {
                            e.1 |= b;
                            e.2 |= want;
                        }
                        None => controls.push((w, b, want)),
                    }
                }
                let t = g.target().index();
                wide.push(WideGate { controls, target: (t / 64, 1u64 << (t % 64)) });
            }
        }
        let program = if width <= 64 { Program::Narrow(narrow) } else { Program::Wide(wide) };
        Ok(BasisProgram { width, program })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Applies the gates to `s` in place.
    pub fn apply(&self, s: &mut BasisState) -> Result<(), SimError> {
        if s.width != self.width {
            return Err(SimError::WidthMismatch { circuit: self.width, state: s.width });
        }
        match &self.program {
            Program::Narrow(gates) => {
                let mut x = s.words[0];
                for &(mask, want, flip) in gates {
                    if x & mask == want {
                        x ^= flip;
                    }
                }
                s.words[0] = x;
            }
            Program::Wide(gates) => {
                for g in gates {
                    if g.controls.iter().all(|&(w, m, v)| s.words[w] & m == v) {
                        s.words[g.target.0] ^= g.target.1;
                    }
                }
            }
        }
        Ok(())
    }

    /// Runs the gates on a narrow state given as an integer (qubit `i` = bit `i`).
    pub fn apply_u64(&self, x: u64) -> u64 {
        match &self.program {
            Program::Narrow(gates) => gates.iter().fold(x, |x, &(m, w, f)| if x & m == w { x ^ f } else { x }),
            Program::Wide(_) => panic!("apply_u64 needs a circuit of at most 64 qubits"),
        }
    }
}

/// Gate list compiled for bit-sliced simulation: each qubit holds one word
/// whose bit `j` belongs to input lane `j`, so 64 basis states run at once.
#[derive(Clone, Debug)]
pub struct LaneProgram {
    width: u32,
    gates: Vec<LaneGate>,
}

/// `(controls as (qubit, xor), target)`; a control fires where `lane ^ xor` is set.
type LaneGate = (SmallVec<[(u32, u64); 4]>, u32);

impl LaneProgram {
    /// Compiles the gates of `c`; relabels are dropped and phase gates rejected.
    pub fn compile(c: &Circuit) -> Result<Self, SimError> {
        let mut gates = Vec::new();
        for (i, op) in c.ops().iter().enumerate() {
            match op {
                Instruction::Gate(g) => {
                    let controls =
                        g.controls().iter().map(|ctl| (ctl.qubit.0, if ctl.fires_on(true) { 0 } else { !0 })).collect();
                    gates.push((controls, g.target().0));
                }
                Instruction::Phase(_) => return Err(SimError::PhaseGate { op: i }),
                Instruction::Relabel(..) => {}
            }
        }
        Ok(LaneProgram { width: c.qubit_count(), gates })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    /// Applies the gates to one word per qubit.
    pub fn apply(&self, lanes: &mut [u64]) -> Result<(), SimError> {
        if lanes.len() != self.width as usize {
            return Err(SimError::WidthMismatch { circuit: self.width, state: lanes.len() as u32 });
        }
        for (controls, target) in &self.gates {
            let fire = controls.iter().fold(!0u64, |acc, &(q, xor)| acc & (lanes[q as usize] ^ xor));
            lanes[*target as usize] ^= fire;
        }
        Ok(())
    }
}

/// Spreads up to 64 register values into lane words, value `j` in lane `j`.
pub fn lanes_write(lanes: &mut [u64], qubits: &[QubitId], values: &[u64]) {
    debug_assert!(values.len() <= 64);
    for (i, q) in qubits.iter().enumerate() {
        lanes[q.index()] = values.iter().enumerate().fold(0, |w, (j, v)| w | (((v >> i) & 1) << j));
    }
}

/// Reads the register on `qubits` back out of the first `count` lanes.
pub fn lanes_read(lanes: &[u64], qubits: &[QubitId], count: usize) -> Vec<u64> {
    (0..count)
        .map(|j| qubits.iter().enumerate().fold(0, |v, (i, q)| v | (((lanes[q.index()] >> j) & 1) << i)))
        .collect()
}

/// Checks the contracts of `c` at `point` against `s`.
pub fn check_contracts(c: &Circuit, s: &BasisState, point: ContractPoint) -> Result<(), SimError> {
    let layout = match point {
        ContractPoint::Entry => c.registers().to_vec(),
        ContractPoint::Exit => c.final_layout(),
    };
    for k in c.contracts().iter().filter(|k| k.point == point) {
        let value = read_register(&layout, &k.register, s).expect("contracts name validated registers");
        if !k.predicate.holds(value) {
            return Err(SimError::ContractViolation {
                point,
                register: k.register.clone(),
                predicate: k.predicate,
                value,
            });
        }
    }
    Ok(())
}

/// Runs a gate-only circuit on a basis state, optionally checking the
/// circuit's entry and exit contracts.
pub fn run_basis(c: &Circuit, s: &BasisState, contract_checks: bool) -> Result<BasisState, SimError> {
    let prog = BasisProgram::compile(c)?;
    run_compiled(c, &prog, s, contract_checks)
}

/// As [`run_basis`] with a precompiled program for `c`.
pub fn run_compiled(
    c: &Circuit,
    prog: &BasisProgram,
    s: &BasisState,
    contract_checks: bool,
) -> Result<BasisState, SimError> {
    if contract_checks {
        check_contracts(c, s, ContractPoint::Entry)?;
    }
    let mut out = s.clone();
    prog.apply(&mut out)?;
    if contract_checks {
        check_contracts(c, &out, ContractPoint::Exit)?;
    }
    Ok(out)
}
