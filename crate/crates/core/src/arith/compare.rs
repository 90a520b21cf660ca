//! Comparison with a classical number.

use super::{check_operand_width, bit, qubits, ArithError, Style};
use crate::emit::{emit_lowered, Emitter};
use crate::ir::{Circuit, Contract, ContractPoint, ControlSpec, Controls, Predicate, QubitId, Register};

/// Which gates of the comparator to emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum LtPart {
    Full,
    /// Everything except the gates that write the result line. The result
    /// line is never read by the comparator, so this part alone restores the
    /// source and scratch when run backwards.
    JunkOnly,
}

/// Bits of the source register complemented by [`build_lt`] with addend `a` at width `k`.
///
/// Every bit is flipped except bit 0, which is flipped only when `a` is odd.
pub fn lt_mask(a: u64, k: u32) -> u64 {
    let all = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    if a & 1 == 1 {
        all
    } else {
        all & !1
    }
}

/// Comparator scanning from the most significant bit: `line ^= res ∧ (b < a)`
/// where `res` are extra controls on the result gates. `sw` (K−1 qubits,
/// zero on entry) tracks "equal so far"; `beta` is left complemented per
/// [`lt_mask`].
#[allow(clippy::too_many_arguments)]
pub(crate) fn emit_lt(
    e: &mut Emitter,
    a: u64,
    beta: &[QubitId],
    line: QubitId,
    sw: &[QubitId],
    res: &[QubitId],
    part: LtPart,
) {
    let k = beta.len();
    assert_eq!(sw.len(), k - 1);
    let result = |e: &mut Emitter, ctl: &[QubitId]| {
        if part == LtPart::Full {
            let all: Vec<QubitId> = res.iter().chain(ctl).copied().collect();
            e.cx(&all, line);
        }
    };
    if k == 1 {
        if bit(a, 0) {
            e.not(beta[0]);
            result(e, &[beta[0]]);
        }
        return;
    }
    let top = k - 1;
    if bit(a, top) {
        e.cx(&[beta[top]], sw[top - 1]);
        e.not(beta[top]);
        result(e, &[beta[top]]);
    } else {
        e.not(beta[top]);
        e.cx(&[beta[top]], sw[top - 1]);
    }
    for i in (1..top).rev() {
        if bit(a, i) {
            e.cx(&[sw[i], beta[i]], sw[i - 1]);
            e.not(beta[i]);
            result(e, &[sw[i], beta[i]]);
        } else {
            e.not(beta[i]);
            e.cx(&[sw[i], beta[i]], sw[i - 1]);
        }
    }
    if bit(a, 0) {
        e.not(beta[0]);
        result(e, &[sw[0], beta[0]]);
    }
}

/// `target ^= en ∧ (b < a)`, restoring `beta`, `copy` and `sw`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn emit_xlt(
    e: &mut Emitter,
    st: &Style,
    a: u64,
    en: &[QubitId],
    beta: &[QubitId],
    target: QubitId,
    copy: QubitId,
    sw: &[QubitId],
) {
    emit_lt(e, a, beta, copy, sw, &[], LtPart::Full);
    let ctl: Controls = en.iter().chain([&copy]).map(|&q| ControlSpec::pos(q)).collect();
    emit_lowered(e, &ctl, target, st.max_arity, beta);
    e.inverted(|e| emit_lt(e, a, beta, copy, sw, &[], LtPart::Full));
}

/// Comparator `result ← (b < a)`.
///
/// Layout: `beta` (K), `result`, `switch` (K−1). `beta` is left complemented
/// per [`lt_mask`] and `switch` holds junk.
pub fn build_lt(a: u64, k: u32) -> Result<Circuit, ArithError> {
    check_operand_width(a, k)?;
    let beta = qubits(0, k);
    let line = QubitId(k);
    let sw = qubits(k + 1, k - 1);
    let mut e = Emitter::recording();
    emit_lt(&mut e, a, &beta, line, &sw, &[], LtPart::Full);
    let regs =
        vec![Register::new("beta", beta), Register::new("result", vec![line]), Register::new("switch", sw)];
    let c = e.finish(2 * k, regs)?;
    Ok(c.with_contracts(vec![
        Contract::new(ContractPoint::Entry, "result", Predicate::Zero),
        Contract::new(ContractPoint::Entry, "switch", Predicate::Zero),
    ])?)
}

/// Comparator that flips `target` when `en ∧ (b < a)` and cleans up after itself.
///
/// Layout: `beta` (K), `target`, `copy`, `switch` (K−1), `enable`.
pub fn build_xlt(a: u64, k: u32, enables: usize) -> Result<Circuit, ArithError> {
    check_operand_width(a, k)?;
    let beta = qubits(0, k);
    let target = QubitId(k);
    let copy = QubitId(k + 1);
    let sw = qubits(k + 2, k - 1);
    let en = qubits(2 * k + 1, enables as u32);
    let mut e = Emitter::recording();
    emit_xlt(&mut e, &Style::UNRESTRICTED, a, &en, &beta, target, copy, &sw);
    let regs = vec![
        Register::new("beta", beta),
        Register::new("target", vec![target]),
        Register::new("copy", vec![copy]),
        Register::new("switch", sw),
        Register::new("enable", en),
    ];
    let c = e.finish(2 * k + 1 + enables as u32, regs)?;
    let mut contracts = Vec::new();
    for name in ["copy", "switch"] {
        contracts.push(Contract::new(ContractPoint::Entry, name, Predicate::Zero));
        contracts.push(Contract::new(ContractPoint::Exit, name, Predicate::Zero));
    }
    Ok(c.with_contracts(contracts)?)
}
