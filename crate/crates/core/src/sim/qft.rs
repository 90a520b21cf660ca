//! Fourier-transform network and input-state preparation.

use super::SimError;
use crate::ir::{Circuit, Instruction, PhaseAngle, PhaseGate, QubitId, Register, RotationKind};

/// One-qubit rotation used by the transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QftKind {
    /// Hadamard-type rotations: the transform is exactly the DFT with
    /// bit-reversed output.
    Hat,
    /// Determinant-one rotations: same distribution, output amplitudes
    /// differ by signs.
    Tilde,
}

impl QftKind {
    fn rotation(self) -> RotationKind {
        match self {
            QftKind::Hat => RotationKind::Hat,
            QftKind::Tilde => RotationKind::Tilde,
        }
    }
}

/// Transform gates on `qubits` (qubit `i` = bit `i` of the input). The output
/// appears bit-reversed: bit `i` of the result sits on qubit `L−1−i`.
///
/// With `prune = Some(m)` the conditional phases with angle below `π/2^m` are
/// omitted.
pub fn qft_instructions(qubits: &[QubitId], kind: QftKind, prune: Option<u32>) -> Vec<PhaseGate> {
    let l = qubits.len();
    let rot = |q: QubitId| PhaseGate::Rotation { qubit: q, kind: kind.rotation() };
    let mut out = Vec::with_capacity(l * (l + 1) / 2);
    if l == 0 {
        return out;
    }
    out.push(rot(qubits[l - 1]));
    for j in (0..l - 1).rev() {
        for k in (j + 1..l).rev() {
            let m = (k - j) as u32;
            if prune.is_some_and(|p| m > p) {
                continue;
            }
            out.push(PhaseGate::ConditionalPhase { a: qubits[j], b: qubits[k], theta: PhaseAngle::pi_over_pow2(m) });
        }
        out.push(rot(qubits[j]));
    }
    out
}

/// Fourier transform on an `l`-qubit register `alpha`.
pub fn build_qft(l: u32, kind: QftKind, prune: Option<u32>) -> Result<Circuit, SimError> {
    if l == 0 {
        return Err(SimError::EmptyRegister);
    }
    let qubits: Vec<QubitId> = (0..l).map(QubitId).collect();
    let ops = qft_instructions(&qubits, kind, prune).into_iter().map(Instruction::Phase).collect();
    Ok(Circuit::new(l, vec![Register::new("alpha", qubits)], ops)?)
}

/// One Hat rotation per qubit of an `l`-qubit register `alpha`: takes `|0⟩`
/// to the uniform superposition.
pub fn prepare_uniform(l: u32) -> Result<Circuit, SimError> {
    if l == 0 {
        return Err(SimError::EmptyRegister);
    }
    let qubits: Vec<QubitId> = (0..l).map(QubitId).collect();
    let ops = qubits
        .iter()
        .map(|&q| Instruction::Phase(PhaseGate::Rotation { qubit: q, kind: RotationKind::Hat }))
        .collect();
    Ok(Circuit::new(l, vec![Register::new("alpha", qubits)], ops)?)
}

/// Reverses the low `l` bits of `y`.
pub fn bit_reverse(y: u64, l: u32) -> u64 {
    if l == 0 {
        0
    } else {
        y.reverse_bits() >> (64 - l)
    }
}
