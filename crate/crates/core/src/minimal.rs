//! Minimal-space networks: K+1 scratch qubits, adders that work from the
//! most significant bit down so no carry register is needed.
//!
//! The adders use controlled^K-NOT gates and so target the unrestricted
//! machine.

use crate::arith::{classical_precompute, doubling_table, mod_inverse, ArithError, ModulusContext};
use crate::arith::{emit_emul, emit_xor};
use crate::emit::Emitter;
use crate::ir::{Circuit, Contract, ContractPoint, ControlSpec, Predicate, QubitId, Register};
use crate::machine::CostVector;

fn qubits(start: u32, len: u32) -> Vec<QubitId> {
    (start..start + len).map(QubitId).collect()
}

/// Adds `2^i` (controlled by `ctl`) to the register `reg`, dropping the carry
/// out of its top bit: bits are flipped from the top down, each controlled on
/// all the lower bits from `i` being one.
fn emit_add_pow2(e: &mut Emitter, ctl: &[ControlSpec], i: usize, reg: &[QubitId]) {
    for j in (i..reg.len()).rev() {
        let controls: Vec<ControlSpec> =
            ctl.iter().copied().chain(reg[i..j].iter().map(|&q| ControlSpec::pos(q))).collect();
        e.gate(&controls, reg[j]);
    }
}

fn enables(en: &[QubitId]) -> Vec<ControlSpec> {
    en.iter().map(|&q| ControlSpec::pos(q)).collect()
}

/// `(ovf, beta) ← (ovf, beta) + en∧a mod 2^(K+1)`.
pub(crate) fn emit_add_ltr(e: &mut Emitter, a: u64, en: &[QubitId], beta: &[QubitId], ovf: QubitId) {
    let reg: Vec<QubitId> = beta.iter().copied().chain([ovf]).collect();
    let ctl = enables(en);
    for i in 0..beta.len() {
        if (a >> i) & 1 == 1 {
            emit_add_pow2(e, &ctl, i, &reg);
        }
    }
}

/// `beta ← beta + en∧(sel ? v : u) mod 2^K`; `sel` is only read.
pub(crate) fn emit_madd_prime(e: &mut Emitter, u: u64, v: u64, en: &[QubitId], sel: QubitId, beta: &[QubitId]) {
    let base = enables(en);
    let with_sel: Vec<ControlSpec> = base.iter().copied().chain([ControlSpec::pos(sel)]).collect();
    for i in 0..beta.len() {
        match ((u >> i) & 1 == 1, (v >> i) & 1 == 1) {
            (false, false) => {}
            (true, true) => emit_add_pow2(e, &base, i, beta),
            (false, true) => emit_add_pow2(e, &with_sel, i, beta),
            (true, false) => {
                e.not(sel);
                emit_add_pow2(e, &with_sel, i, beta);
                e.not(sel);
            }
        }
    }
}

/// Overwriting `beta ← beta + en∧a mod N` for `beta < N`, with one scratch
/// qubit `ovf` that starts and ends at zero.
pub(crate) fn emit_oaddn_min(e: &mut Emitter, a: u64, ctx: ModulusContext, en: &[QubitId], beta: &[QubitId], ovf: QubitId) {
    let (n, p) = (ctx.n(), ctx.pow2k());
    emit_add_ltr(e, p - n + a, en, beta, ovf);
    emit_madd_prime(e, n - a, (p - a) & (p - 1), en, ovf, beta);
    emit_add_ltr(e, a, en, beta, ovf);
}

/// `acc ← acc + en·(a·src mod N)`, `acc` zero on entry.
#[allow(clippy::too_many_arguments)]
fn emit_muln_min(
    e: &mut Emitter,
    a: u64,
    ctx: ModulusContext,
    en: &[QubitId],
    src: &[QubitId],
    acc: &[QubitId],
    ovf: QubitId,
) {
    let table = doubling_table(a, ctx.n(), ctx.k());
    let ctl = |j: usize| -> Vec<QubitId> { en.iter().copied().chain([src[j]]).collect() };
    emit_emul(e, table[0], &ctl(0), acc);
    for (j, &d) in table.iter().enumerate().skip(1) {
        emit_oaddn_min(e, d, ctx, &ctl(j), acc, ovf);
    }
}

#[allow(clippy::too_many_arguments)]
fn emit_omuln_min(
    e: &mut Emitter,
    a: u64,
    a_inv: u64,
    ctx: ModulusContext,
    en: &[QubitId],
    beta: &[QubitId],
    gamma: &[QubitId],
    ovf: QubitId,
) {
    emit_muln_min(e, a, ctx, en, beta, gamma, ovf);
    e.inverted(|e| emit_muln_min(e, a_inv, ctx, en, gamma, beta, ovf));
    emit_xor(e, en, gamma, beta);
    emit_xor(e, en, beta, gamma);
}

fn emit_expn_min(e: &mut Emitter, x: u64, ctx: ModulusContext, l: u32, first_opt: bool) -> Result<(), ArithError> {
    let k = ctx.k();
    let pre = classical_precompute(x, ctx, l)?;
    let alpha = qubits(0, l);
    let beta = qubits(l, k);
    let gamma = qubits(l + k, k);
    let ovf = QubitId(l + 2 * k);
    let first = if first_opt {
        emit_emul(e, pre.powers[0], &[alpha[0]], &beta);
        e.not(alpha[0]);
        e.cx(&[alpha[0]], beta[0]);
        e.not(alpha[0]);
        1
    } else {
        e.not(beta[0]);
        0
    };
    for (i, &bit) in alpha.iter().enumerate().take(l as usize).skip(first) {
        emit_omuln_min(e, pre.powers[i], pre.inverses[i], ctx, &[bit], &beta, &gamma, ovf);
    }
    Ok(())
}

fn zero_both(names: &[&str]) -> Vec<Contract> {
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

/// Left-to-right adder `(overflow, beta) ← b + en∧a` as a (K+1)-bit sum.
///
/// Layout: `beta` (K), `overflow`, `enable`.
pub fn build_add_ltr(a: u64, k: u32, enables: usize) -> Result<Circuit, ArithError> {
    if !(1..=62).contains(&k) {
        return Err(ArithError::BadWidth(k));
    }
    if a >> k != 0 {
        return Err(ArithError::OperandOutOfRange { value: a, bound: 1 << k });
    }
    let beta = qubits(0, k);
    let ovf = QubitId(k);
    let en = qubits(k + 1, enables as u32);
    let mut e = Emitter::recording();
    emit_add_ltr(&mut e, a, &en, &beta, ovf);
    let regs =
        vec![Register::new("beta", beta), Register::new("overflow", vec![ovf]), Register::new("enable", en)];
    let c = e.finish(k + 1 + enables as u32, regs)?;
    Ok(c.with_contracts(vec![Contract::new(ContractPoint::Entry, "overflow", Predicate::Zero)])?)
}

/// Multiplexed K-bit adder `beta ← b + en∧(select ? v : u) mod 2^K`.
///
/// Layout: `beta` (K), `select`, `enable`.
pub fn build_madd_prime(u: u64, v: u64, k: u32, enables: usize) -> Result<Circuit, ArithError> {
    if !(1..=62).contains(&k) {
        return Err(ArithError::BadWidth(k));
    }
    for x in [u, v] {
        if x >> k != 0 {
            return Err(ArithError::OperandOutOfRange { value: x, bound: 1 << k });
        }
    }
    let beta = qubits(0, k);
    let sel = QubitId(k);
    let en = qubits(k + 1, enables as u32);
    let mut e = Emitter::recording();
    emit_madd_prime(&mut e, u, v, &en, sel, &beta);
    let regs = vec![Register::new("beta", beta), Register::new("select", vec![sel]), Register::new("enable", en)];
    Ok(e.finish(k + 1 + enables as u32, regs)?)
}

/// Overwriting modular adder `beta ← b + en∧a mod N` with one scratch qubit.
///
/// Layout: `beta` (K), `overflow`, `enable`.
pub fn build_oaddn_min(a: u64, ctx: ModulusContext, enables: usize) -> Result<Circuit, ArithError> {
    if a >= ctx.n() {
        return Err(ArithError::OperandOutOfRange { value: a, bound: ctx.n() });
    }
    let k = ctx.k();
    let beta = qubits(0, k);
    let ovf = QubitId(k);
    let en = qubits(k + 1, enables as u32);
    let mut e = Emitter::recording();
    emit_oaddn_min(&mut e, a, ctx, &en, &beta, ovf);
    let regs =
        vec![Register::new("beta", beta), Register::new("overflow", vec![ovf]), Register::new("enable", en)];
    let mut contracts = zero_both(&["overflow"]);
    contracts.push(Contract::new(ContractPoint::Entry, "beta", Predicate::Below(ctx.n())));
    contracts.push(Contract::new(ContractPoint::Exit, "beta", Predicate::Below(ctx.n())));
    Ok(e.finish(k + 1 + enables as u32, regs)?.with_contracts(contracts)?)
}

/// Minimal-space modular exponentiation `beta ← x^a mod N`.
///
/// Layout: `alpha` (L), `beta` (K), `gamma` (K), `overflow`.
pub fn build_expn_min(x: u64, ctx: ModulusContext, l: u32) -> Result<Circuit, ArithError> {
    build_expn_min_with(x, ctx, l, true)
}

pub(crate) fn build_expn_min_with(x: u64, ctx: ModulusContext, l: u32, first_opt: bool) -> Result<Circuit, ArithError> {
    if l == 0 {
        return Err(ArithError::EmptyInput);
    }
    mod_inverse(x, ctx.n())?;
    let k = ctx.k();
    let mut e = Emitter::recording();
    emit_expn_min(&mut e, x, ctx, l, first_opt)?;
    let regs = vec![
        Register::new("alpha", qubits(0, l)),
        Register::new("beta", qubits(l, k)),
        Register::new("gamma", qubits(l + k, k)),
        Register::new("overflow", vec![QubitId(l + 2 * k)]),
    ];
    let mut contracts = zero_both(&["gamma", "overflow"]);
    contracts.push(Contract::new(ContractPoint::Entry, "beta", Predicate::Zero));
    contracts.push(Contract::new(ContractPoint::Exit, "beta", Predicate::Below(ctx.n())));
    Ok(e.finish(l + 2 * k + 1, regs)?.with_contracts(contracts)?)
}

pub(crate) fn count_expn_min(x: u64, ctx: ModulusContext, l: u32, first_opt: bool) -> Result<CostVector, ArithError> {
    if l == 0 {
        return Err(ArithError::EmptyInput);
    }
    let mut e = Emitter::counting();
    emit_expn_min(&mut e, x, ctx, l, first_opt)?;
    Ok(e.tally())
}

/// Gate counts of the left-to-right adder with `enables` enable bits.
pub fn count_add_ltr(a: u64, k: u32, enables: usize) -> CostVector {
    let mut e = Emitter::counting();
    emit_add_ltr(&mut e, a, &qubits(k + 1, enables as u32), &qubits(0, k), QubitId(k));
    e.tally()
}

/// Gate counts of the multiplexed adder with `enables` enable bits.
pub fn count_madd_prime(u: u64, v: u64, k: u32, enables: usize) -> CostVector {
    let mut e = Emitter::counting();
    emit_madd_prime(&mut e, u, v, &qubits(k + 1, enables as u32), QubitId(k), &qubits(0, k));
    e.tally()
}
