//! Gate-stream emitter shared by all builders.
//!
//! Builders address physical qubits. Register swaps are recorded as physical
//! swaps and resolved into named relabels when the circuit is finished. A
//! counting emitter tallies gates by arity without storing them, which keeps
//! large resource counts cheap.

use crate::ir::{Circuit, ControlSpec, Controls, Gate, Instruction, IrError, QubitId, Register};
use crate::machine::{tally_to_vector, CostVector};

#[derive(Clone, Debug)]
pub(crate) enum RawOp {
    Gate(Gate),
    Swap(Vec<QubitId>, Vec<QubitId>),
}

pub(crate) struct Emitter {
    ops: Option<Vec<RawOp>>,
    tally: Vec<u64>,
    relabels: bool,
}

impl Emitter {
    pub fn recording() -> Self {
        Emitter { ops: Some(Vec::new()), tally: Vec::new(), relabels: true }
    }

    pub fn counting() -> Self {
        Emitter { ops: None, tally: Vec::new(), relabels: true }
    }

    fn push(&mut self, op: RawOp) {
        if let RawOp::Gate(g) = &op {
            let k = g.arity();
            if self.tally.len() <= k {
                self.tally.resize(k + 1, 0);
            }
            self.tally[k] += 1;
        }
        if let Some(ops) = &mut self.ops {
            ops.push(op);
        }
    }

    /// Controlled-NOT with explicit control polarities.
    pub fn gate(&mut self, controls: &[ControlSpec], target: QubitId) {
        self.push(RawOp::Gate(Gate::new_unchecked(Controls::from_slice(controls), target)));
    }

    /// Controlled-NOT with positive controls.
    pub fn cx(&mut self, controls: &[QubitId], target: QubitId) {
        let controls: Controls = controls.iter().map(|&q| ControlSpec::pos(q)).collect();
        self.push(RawOp::Gate(Gate::new_unchecked(controls, target)));
    }

    pub fn not(&mut self, target: QubitId) {
        self.cx(&[], target);
    }

    /// Exchanges the roles of two equal-width physical registers.
    pub fn swap(&mut self, a: &[QubitId], b: &[QubitId]) {
        if self.ops.is_some() && self.relabels {
            self.push(RawOp::Swap(a.to_vec(), b.to_vec()));
        }
    }

    /// Runs `f` with register swaps suppressed; the caller tracks roles
    /// itself and settles names with [`Emitter::relabel_to`].
    pub fn without_relabels(&mut self, f: impl FnOnce(&mut Emitter)) {
        let saved = std::mem::replace(&mut self.relabels, false);
        f(self);
        self.relabels = saved;
    }

    /// Emits swaps so that the names bound to `from[i]` end up bound to `to[i]`.
    /// `to` must be a permutation of `from`.
    pub fn relabel_to(&mut self, from: &[Vec<QubitId>], to: &[Vec<QubitId>]) {
        let mut cur = from.to_vec();
        for i in 0..cur.len() {
            if cur[i] != to[i] {
                let j = cur.iter().position(|q| *q == to[i]).expect("relabel target is not a permutation");
                self.swap(&cur[i].clone(), &cur[j].clone());
                cur.swap(i, j);
            }
        }
    }

    /// Emits the inverse of whatever `f` emits.
    pub fn inverted(&mut self, f: impl FnOnce(&mut Emitter)) {
        if self.ops.is_none() {
            // Inversion does not change gate counts.
            f(self);
            return;
        }
        let mut sub = Emitter { relabels: self.relabels, ..Emitter::recording() };
        f(&mut sub);
        for op in sub.ops.expect("recording").into_iter().rev() {
            self.push(op);
        }
    }

    /// Gate counts so far.
    pub fn tally(&self) -> CostVector {
        tally_to_vector(&self.tally)
    }

    /// Finishes a recording, turning physical swaps into named relabels
    /// against the given entry layout.
    pub fn finish(self, qubit_count: u32, registers: Vec<Register>) -> Result<Circuit, IrError> {
        let raw = self.ops.expect("finish requires a recording emitter");
        let mut bindings: Vec<(String, Vec<QubitId>)> =
            registers.iter().map(|r| (r.name.clone(), r.qubits.clone())).collect();
        let mut ops = Vec::with_capacity(raw.len());
        for op in raw {
            match op {
                RawOp::Gate(g) => ops.push(Instruction::Gate(g)),
                RawOp::Swap(a, b) => {
                    let ia = bindings.iter().position(|(_, q)| *q == a).ok_or(IrError::UnresolvedSwap)?;
                    let ib = bindings.iter().position(|(_, q)| *q == b).ok_or(IrError::UnresolvedSwap)?;
                    ops.push(Instruction::Relabel(bindings[ia].0.clone(), bindings[ib].0.clone()));
                    let tmp = std::mem::take(&mut bindings[ia].1);
                    bindings[ia].1 = std::mem::replace(&mut bindings[ib].1, tmp);
                }
            }
        }
        Circuit::new(qubit_count, registers, ops)
    }
}

/// Emits a controlled-NOT, splitting it until every piece has at most
/// `max_arity` controls (`max_arity ≥ 2`).
///
/// Each split uses `C[c1..ck]→t = C[e,ck]→t · C[c1..ck-1]→e · C[e,ck]→t · C[c1..ck-1]→e`
/// (right factor first), where `e` is a borrowed qubit in an arbitrary state.
/// The borrowed qubit is the first entry of `borrow` not used by the gate.
pub(crate) fn emit_lowered(
    e: &mut Emitter,
    controls: &[ControlSpec],
    target: QubitId,
    max_arity: usize,
    borrow: &[QubitId],
) {
    if controls.len() <= max_arity {
        e.gate(controls, target);
        return;
    }
    assert!(max_arity >= 2, "lowering needs controlled^2-NOT");
    let spare = *borrow
        .iter()
        .find(|&&q| q != target && controls.iter().all(|c| c.qubit != q))
        .expect("no borrowable qubit available");
    let (head, last) = controls.split_at(controls.len() - 1);
    let pair = [ControlSpec::pos(spare), last[0]];
    let mut inner_borrow = vec![target, last[0].qubit];
    inner_borrow.extend_from_slice(borrow);
    for _ in 0..2 {
        emit_lowered(e, head, spare, max_arity, &inner_borrow);
        e.gate(&pair, target);
    }
}
