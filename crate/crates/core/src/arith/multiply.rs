//! Multiplication by a classical number.

use super::classical::{doubling_table, mod_inverse};
use super::modular::emit_oaddn;
use super::{qubits, ArithError, Lines, ModulusContext, NetworkConfig, Style, Variant};
use crate::emit::Emitter;
use crate::ir::{Circuit, Contract, ContractPoint, Predicate, QubitId, Register};

/// `gamma ^= (∧controls)·a`.
pub(crate) fn emit_emul(e: &mut Emitter, a: u64, controls: &[QubitId], gamma: &[QubitId]) {
    for (j, &g) in gamma.iter().enumerate() {
        if (a >> j) & 1 == 1 {
            e.cx(controls, g);
        }
    }
}

/// `beta ^= (∧en)·alpha`, bitwise.
pub(crate) fn emit_xor(e: &mut Emitter, en: &[QubitId], alpha: &[QubitId], beta: &[QubitId]) {
    for (&x, &y) in alpha.iter().zip(beta) {
        let ctl: Vec<QubitId> = en.iter().copied().chain([x]).collect();
        e.cx(&ctl, y);
    }
}

/// Runs `f` with the enable string `en ∧ extra`, folded into the AND line
/// when the style has one.
fn with_enable(
    e: &mut Emitter,
    st: &Style,
    lines: &Lines,
    en: &[QubitId],
    extra: QubitId,
    f: impl FnOnce(&mut Emitter, &[QubitId]),
) {
    let full: Vec<QubitId> = en.iter().copied().chain([extra]).collect();
    match (st.and_line, lines.and) {
        (true, Some(and)) => {
            e.cx(&full, and);
            f(e, &[and]);
            e.cx(&full, and);
        }
        _ => f(e, &full),
    }
}

/// `acc ← en·(a·src mod N)` with `acc`, `scr` zero on entry. Returns the
/// physical registers holding `(acc, scr)` on exit; no relabels are emitted.
#[allow(clippy::too_many_arguments)]
pub(crate) fn emit_muln(
    e: &mut Emitter,
    st: &Style,
    a: u64,
    ctx: ModulusContext,
    en: &[QubitId],
    src: &[QubitId],
    acc: &[QubitId],
    scr: &[QubitId],
    lines: &Lines,
) -> (Vec<QubitId>, Vec<QubitId>) {
    let table = doubling_table(a, ctx.n(), ctx.k());
    let (mut acc, mut scr) = (acc.to_vec(), scr.to_vec());
    with_enable(e, st, lines, en, src[0], |e, ctl| emit_emul(e, table[0], ctl, &acc));
    for (j, &d) in table.iter().enumerate().skip(1) {
        with_enable(e, st, lines, en, src[j], |e, ctl| {
            e.without_relabels(|e| emit_oaddn(e, st, d, ctx, ctl, &acc, &scr, lines))
        });
        std::mem::swap(&mut acc, &mut scr);
    }
    (acc, scr)
}

/// Physical placement of the three K-bit registers of a multiplier.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Roles {
    /// Holds the value.
    pub beta: Vec<QubitId>,
    pub gamma: Vec<QubitId>,
    pub delta: Vec<QubitId>,
}

/// `beta ← en ? a·b mod N : b` for `b < N`, `gamma`, `delta` zero on entry
/// and exit. Returns the new roles; no relabels are emitted.
#[allow(clippy::too_many_arguments)]
pub(crate) fn emit_omuln(
    e: &mut Emitter,
    st: &Style,
    a: u64,
    a_inv: u64,
    ctx: ModulusContext,
    en: &[QubitId],
    roles: &Roles,
    lines: &Lines,
) -> Roles {
    let (acc, scr) = emit_muln(e, st, a, ctx, en, &roles.beta, &roles.gamma, &roles.delta, lines);
    let (p0, q0) = if (ctx.k() - 1) % 2 == 0 {
        (roles.beta.clone(), scr)
    } else {
        (scr, roles.beta.clone())
    };
    e.inverted(|e| {
        emit_muln(e, st, a_inv, ctx, en, &acc, &p0, &q0, lines);
    });
    emit_xor(e, en, &acc, &p0);
    emit_xor(e, en, &p0, &acc);
    Roles { beta: p0, gamma: acc, delta: q0 }
}

/// Controlled multiply-into: `gamma ^= (∧enable)·a`.
///
/// Layout: `gamma` (K), `enable`.
pub fn build_emul(a: u64, k: u32, enables: usize) -> Result<Circuit, ArithError> {
    super::check_operand_width(a, k)?;
    let gamma = qubits(0, k);
    let en = qubits(k, enables as u32);
    let mut e = Emitter::recording();
    emit_emul(&mut e, a, &en, &gamma);
    let regs = vec![Register::new("gamma", gamma), Register::new("enable", en)];
    Ok(e.finish(k + enables as u32, regs)?)
}

/// Controlled copy `beta ^= (∧enable)·alpha`.
///
/// Layout: `alpha` (K), `beta` (K), `enable`.
pub fn build_xor(k: u32, enables: usize) -> Result<Circuit, ArithError> {
    if k == 0 {
        return Err(ArithError::BadWidth(k));
    }
    let alpha = qubits(0, k);
    let beta = qubits(k, k);
    let en = qubits(2 * k, enables as u32);
    let mut e = Emitter::recording();
    emit_xor(&mut e, &en, &alpha, &beta);
    let regs = vec![Register::new("alpha", alpha), Register::new("beta", beta), Register::new("enable", en)];
    Ok(e.finish(2 * k + enables as u32, regs)?)
}

/// Register layout shared by the multiplier builders.
pub(crate) struct MulLayout {
    pub roles: Roles,
    pub lines: Lines,
    pub regs: Vec<Register>,
    pub total: u32,
}

/// Allocates `beta`, `gamma`, `select`, `delta` and the variant's extra
/// lines from qubit `start`; `pre` are registers already placed below it.
pub(crate) fn mul_layout(k: u32, start: u32, st: &Style, mut pre: Vec<Register>, post: &[(&str, u32)]) -> MulLayout {
    let mut next = start;
    let mut take = |len: u32| {
        let q = qubits(next, len);
        next += len;
        q
    };
    let beta = take(k);
    let gamma = take(k);
    let select = take(1)[0];
    let delta = take(k);
    pre.push(Register::new("beta", beta.clone()));
    pre.push(Register::new("gamma", gamma.clone()));
    pre.push(Register::new("select", vec![select]));
    pre.push(Register::new("delta", delta.clone()));
    for &(name, len) in post {
        pre.push(Register::new(name, take(len)));
    }
    let mut lines = Lines { select, and: None, aux: None, switch: Vec::new() };
    if st.and_line {
        let q = take(1)[0];
        lines.and = Some(q);
        pre.push(Register::new("and", vec![q]));
    }
    if st.double_prime {
        let q = take(1)[0];
        lines.aux = Some(q);
        pre.push(Register::new("aux", vec![q]));
    }
    if st.deferred {
        lines.switch = take(k - 1);
        pre.push(Register::new("switch", lines.switch.clone()));
    }
    MulLayout { roles: Roles { beta, gamma, delta }, lines, regs: pre, total: next }
}

pub(crate) fn scratch_names() -> [&'static str; 6] {
    ["select", "delta", "and", "aux", "switch", "gamma"]
}

fn scratch_contracts(regs: &[Register], entry_only: &[&str]) -> Vec<Contract> {
    let mut out = Vec::new();
    for r in regs {
        let name = r.name.as_str();
        if scratch_names().contains(&name) && !r.qubits.is_empty() {
            out.push(Contract::new(ContractPoint::Entry, name, Predicate::Zero));
            if !entry_only.contains(&name) {
                out.push(Contract::new(ContractPoint::Exit, name, Predicate::Zero));
            }
        }
    }
    out
}

fn check_mul_config(ctx: ModulusContext, a: u64, cfg: &NetworkConfig) -> Result<Style, ArithError> {
    cfg.validate()?;
    ctx.check_operand(a)?;
    if cfg.variant == Variant::MinSpace {
        return Err(ArithError::FormMismatch("use the minimal-space builders for min-k1".into()));
    }
    Ok(Style::for_variant(cfg.variant))
}

/// Controlled multiplier `gamma ← enable·(a·b mod N)`, `beta` unchanged.
///
/// Layout: `beta` (K), `gamma` (K), `select`, `delta` (K), `enable`, then the
/// variant's extra lines. The product is read from `gamma` in the final
/// layout.
pub fn build_muln(a: u64, ctx: ModulusContext, cfg: &NetworkConfig) -> Result<Circuit, ArithError> {
    let st = check_mul_config(ctx, a, cfg)?;
    let l = mul_layout(ctx.k(), 0, &st, Vec::new(), &[("enable", 1)]);
    let en = l.regs.iter().find(|r| r.name == "enable").expect("enable").qubits.clone();
    let mut e = Emitter::recording();
    let (acc, scr) = emit_muln(&mut e, &st, a, ctx, &en, &l.roles.beta, &l.roles.gamma, &l.roles.delta, &l.lines);
    e.relabel_to(&[l.roles.gamma.clone(), l.roles.delta.clone()], &[acc, scr]);
    let mut contracts = scratch_contracts(&l.regs, &["gamma"]);
    contracts.push(Contract::new(ContractPoint::Exit, "gamma", Predicate::Below(ctx.n())));
    Ok(e.finish(l.total, l.regs)?.with_contracts(contracts)?)
}

/// Controlled overwriting multiplier `beta ← enable ? a·b mod N : b`.
///
/// Same layout as [`build_muln`]; requires `gcd(a, N) = 1`.
pub fn build_omuln(a: u64, ctx: ModulusContext, cfg: &NetworkConfig) -> Result<Circuit, ArithError> {
    let st = check_mul_config(ctx, a, cfg)?;
    let a_inv = mod_inverse(a, ctx.n())?;
    let l = mul_layout(ctx.k(), 0, &st, Vec::new(), &[("enable", 1)]);
    let en = l.regs.iter().find(|r| r.name == "enable").expect("enable").qubits.clone();
    let mut e = Emitter::recording();
    let out = emit_omuln(&mut e, &st, a, a_inv, ctx, &en, &l.roles, &l.lines);
    e.relabel_to(
        &[l.roles.beta.clone(), l.roles.gamma.clone(), l.roles.delta.clone()],
        &[out.beta, out.gamma, out.delta],
    );
    let mut contracts = scratch_contracts(&l.regs, &[]);
    contracts.push(Contract::new(ContractPoint::Entry, "beta", Predicate::Below(ctx.n())));
    contracts.push(Contract::new(ContractPoint::Exit, "beta", Predicate::Below(ctx.n())));
    Ok(e.finish(l.total, l.regs)?.with_contracts(contracts)?)
}
