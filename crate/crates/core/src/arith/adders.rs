//! Full adders, multiplexed adders and the multiplexed K-bit adder.

use super::{bit, qubits, ArithError, MuxForm, Style};
use crate::emit::{emit_lowered, Emitter};
use crate::ir::{Circuit, Contract, ContractPoint, ControlSpec, Controls, Predicate, QubitId, Register};
use crate::machine::MachineModel;

fn with_enables(en: &[QubitId], extra: &[ControlSpec]) -> Controls {
    en.iter().map(|&q| ControlSpec::pos(q)).chain(extra.iter().copied()).collect()
}

/// Full adder with classical addend `a` on `(b, c, carry)`: `c ← a⊕b⊕c`,
/// `carry ← maj(a, b, c)` (carry starts at 0).
pub(crate) fn emit_fa(e: &mut Emitter, a: bool, b: QubitId, c: QubitId, carry: QubitId) {
    if a {
        e.cx(&[c], carry);
        e.not(c);
        e.cx(&[b, c], carry);
        e.cx(&[b], c);
    } else {
        e.cx(&[b, c], carry);
        e.cx(&[b], c);
    }
}

/// Multiplexed full adder: adds `en ∧ (ℓ ? a1 : a0)` plus `b` into `(c, carry)`.
///
/// `b` may carry a negative polarity, in which case the bit read is its
/// complement. `aux` is the scratch line of the scratch-line form.
#[allow(clippy::too_many_arguments)]
pub(crate) fn emit_muxfa(
    e: &mut Emitter,
    st: &Style,
    a0: bool,
    a1: bool,
    en: &[QubitId],
    sel: QubitId,
    b: ControlSpec,
    c: QubitId,
    carry: QubitId,
    aux: Option<QubitId>,
) {
    let borrow = [b.qubit, carry, c];
    let g = |e: &mut Emitter, ctl: &[ControlSpec], t: QubitId| emit_lowered(e, ctl, t, st.max_arity, &borrow);
    let pc = ControlSpec::pos(c);
    let ps = ControlSpec::pos(sel);
    match (a0, a1) {
        (false, false) => {}
        (true, true) => {
            g(e, &with_enables(en, &[pc]), carry);
            g(e, &with_enables(en, &[]), c);
        }
        _ => {
            let invert_select = a0;
            if invert_select {
                e.not(sel);
            }
            if st.double_prime {
                let x = aux.expect("scratch-line adder needs an aux qubit");
                let px = ControlSpec::pos(x);
                g(e, &with_enables(en, &[ps]), x);
                g(e, &[px, pc], carry);
                g(e, &[px], c);
                g(e, &[b, pc], carry);
                g(e, &[b], c);
                g(e, &with_enables(en, &[ps]), x);
                if invert_select {
                    e.not(sel);
                }
                return;
            }
            g(e, &with_enables(en, &[ps, pc]), carry);
            g(e, &with_enables(en, &[ps]), c);
            g(e, &[b, pc], carry);
            g(e, &[b], c);
            if invert_select {
                e.not(sel);
            }
            return;
        }
    }
    g(e, &[b, pc], carry);
    g(e, &[b], c);
}

/// Multiplexed half adder: `c ← c ⊕ b ⊕ (en ∧ (ℓ ? a1 : a0))`, no carry out.
#[allow(clippy::too_many_arguments)]
pub(crate) fn emit_muxha(
    e: &mut Emitter,
    st: &Style,
    a0: bool,
    a1: bool,
    en: &[QubitId],
    sel: QubitId,
    b: ControlSpec,
    c: QubitId,
) {
    let borrow = [b.qubit];
    let g = |e: &mut Emitter, ctl: &[ControlSpec], t: QubitId| emit_lowered(e, ctl, t, st.max_arity, &borrow);
    match (a0, a1) {
        (false, false) => g(e, &[b], c),
        (true, true) => {
            g(e, &with_enables(en, &[]), c);
            g(e, &[b], c);
        }
        _ => {
            if a0 {
                e.not(sel);
            }
            g(e, &with_enables(en, &[ControlSpec::pos(sel)]), c);
            g(e, &[b], c);
            if a0 {
                e.not(sel);
            }
        }
    }
}

/// Multiplexed K-bit adder: `γ ← (b + en ∧ (ℓ ? a1 : a0)) mod 2^K` with `γ = 0`
/// on entry; `beta` gives the source bits with their read polarity.
#[allow(clippy::too_many_arguments)]
pub(crate) fn emit_madd(
    e: &mut Emitter,
    st: &Style,
    a0: u64,
    a1: u64,
    en: &[QubitId],
    sel: QubitId,
    beta: &[ControlSpec],
    gamma: &[QubitId],
    aux: Option<QubitId>,
) {
    let k = gamma.len();
    assert_eq!(beta.len(), k);
    for i in 0..k - 1 {
        emit_muxfa(e, st, bit(a0, i), bit(a1, i), en, sel, beta[i], gamma[i], gamma[i + 1], aux);
    }
    emit_muxha(e, st, bit(a0, k - 1), bit(a1, k - 1), en, sel, beta[k - 1], gamma[k - 1]);
}

fn zero_contracts(names: &[&str]) -> Vec<Contract> {
    names
        .iter()
        .flat_map(|n| {
            [
                Contract::new(ContractPoint::Entry, *n, Predicate::Zero),
                Contract::new(ContractPoint::Exit, *n, Predicate::Zero),
            ]
        })
        .collect()
}

/// Full adder on registers `b` (qubit 0), `c` (qubit 1), `carry` (qubit 2).
pub fn build_fa(a: bool) -> Circuit {
    let mut e = Emitter::recording();
    emit_fa(&mut e, a, QubitId(0), QubitId(1), QubitId(2));
    let regs = vec![
        Register::new("b", vec![QubitId(0)]),
        Register::new("c", vec![QubitId(1)]),
        Register::new("carry", vec![QubitId(2)]),
    ];
    e.finish(3, regs).expect("fixed layout")
}

/// Multiplexed full adder in the chosen form.
///
/// Layout: `select` 0, `b` 1, `c` 2, `carry` 3, then `enable` (one qubit per
/// enable bit) and, for [`MuxForm::DoublePrime`], an `aux` line.
pub fn build_muxfa(form: MuxForm, a0: bool, a1: bool, enables: usize) -> Result<Circuit, ArithError> {
    let basic = MachineModel::BASIC.max_control_arity();
    let st = match form {
        MuxForm::Prime if enables == 0 => Style::UNRESTRICTED,
        MuxForm::Plain if enables <= 2 => Style::UNRESTRICTED,
        MuxForm::DoublePrime if enables <= 1 => Style { max_arity: basic, double_prime: true, ..Style::UNRESTRICTED },
        MuxForm::TriplePrime if enables <= 1 => Style { max_arity: basic, ..Style::UNRESTRICTED },
        MuxForm::QuadPrime if enables <= 2 => Style { max_arity: basic, ..Style::UNRESTRICTED },
        _ => {
            return Err(ArithError::FormMismatch(format!("{form:?} adder does not support {enables} enable bits")))
        }
    };
    let en = qubits(4, enables as u32);
    let aux = st.double_prime.then_some(QubitId(4 + enables as u32));
    let mut e = Emitter::recording();
    emit_muxfa(&mut e, &st, a0, a1, &en, QubitId(0), ControlSpec::pos(QubitId(1)), QubitId(2), QubitId(3), aux);
    let mut regs = vec![
        Register::new("select", vec![QubitId(0)]),
        Register::new("b", vec![QubitId(1)]),
        Register::new("c", vec![QubitId(2)]),
        Register::new("carry", vec![QubitId(3)]),
        Register::new("enable", en),
    ];
    let mut zero = vec!["carry"];
    if let Some(x) = aux {
        regs.push(Register::new("aux", vec![x]));
        zero.push("aux");
    }
    let total = 4 + enables as u32 + u32::from(aux.is_some());
    let c = e.finish(total, regs)?;
    let mut contracts = zero_contracts(&zero);
    contracts.retain(|k| !(k.register == "carry" && k.point == ContractPoint::Exit));
    Ok(c.with_contracts(contracts)?)
}

/// Multiplexed half adder. Layout: `select` 0, `b` 1, `c` 2, `enable`.
/// On the basic machine wide gates are split using `b` as the borrowed bit.
pub fn build_muxha(a0: bool, a1: bool, enables: usize, machine: MachineModel) -> Result<Circuit, ArithError> {
    if enables > 2 {
        return Err(ArithError::FormMismatch(format!("half adder does not support {enables} enable bits")));
    }
    let st = Style { max_arity: machine.max_control_arity(), ..Style::UNRESTRICTED };
    let en = qubits(3, enables as u32);
    let mut e = Emitter::recording();
    emit_muxha(&mut e, &st, a0, a1, &en, QubitId(0), ControlSpec::pos(QubitId(1)), QubitId(2));
    let regs = vec![
        Register::new("select", vec![QubitId(0)]),
        Register::new("b", vec![QubitId(1)]),
        Register::new("c", vec![QubitId(2)]),
        Register::new("enable", en),
    ];
    Ok(e.finish(3 + enables as u32, regs)?)
}

/// Multiplexed K-bit adder `γ ← b + en∧(ℓ ? a1 : a0) mod 2^K`.
///
/// Layout: `beta` (K), `gamma` (K), `select`, `enable`.
pub fn build_madd(a0: u64, a1: u64, k: u32, enables: usize) -> Result<Circuit, ArithError> {
    if !(1..=62).contains(&k) {
        return Err(ArithError::BadWidth(k));
    }
    for v in [a0, a1] {
        if v >> k != 0 {
            return Err(ArithError::OperandOutOfRange { value: v, bound: 1 << k });
        }
    }
    if enables > 2 {
        return Err(ArithError::FormMismatch(format!("adder does not support {enables} enable bits")));
    }
    let beta = qubits(0, k);
    let gamma = qubits(k, k);
    let sel = QubitId(2 * k);
    let en = qubits(2 * k + 1, enables as u32);
    let mut e = Emitter::recording();
    let bctl: Vec<ControlSpec> = beta.iter().map(|&q| ControlSpec::pos(q)).collect();
    emit_madd(&mut e, &Style::UNRESTRICTED, a0, a1, &en, sel, &bctl, &gamma, None);
    let regs = vec![
        Register::new("beta", beta),
        Register::new("gamma", gamma),
        Register::new("select", vec![sel]),
        Register::new("enable", en),
    ];
    let c = e.finish(2 * k + 1 + enables as u32, regs)?;
    Ok(c.with_contracts(vec![Contract::new(ContractPoint::Entry, "gamma", Predicate::Zero)])?)
}
