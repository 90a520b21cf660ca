//! Modular addition of a classical number.

use super::compare::emit_xlt;
use super::{emit_lt, emit_madd, lt_mask, qubits, ArithError, Lines, LtPart, ModulusContext, NetworkConfig, Style};
use crate::emit::Emitter;
use crate::ir::{Circuit, Contract, ContractPoint, ControlSpec, Polarity, Predicate, QubitId, Register};

fn positive(qs: &[QubitId]) -> Vec<ControlSpec> {
    qs.iter().map(|&q| ControlSpec::pos(q)).collect()
}

/// `γ ← b + en∧a mod N` and `select ← en ∧ (a + b < N)`, for `b < N`, with
/// `select` and `γ` zero on entry. `a` may equal `N` (adds zero).
#[allow(clippy::too_many_arguments)]
pub(crate) fn emit_addn(
    e: &mut Emitter,
    st: &Style,
    a: u64,
    ctx: ModulusContext,
    en: &[QubitId],
    beta: &[QubitId],
    gamma: &[QubitId],
    lines: &Lines,
) {
    let k = ctx.k() as usize;
    let n = ctx.n();
    let wrap = (ctx.pow2k() + a - n) & (ctx.pow2k() - 1);
    emit_xlt(e, st, n - a, en, beta, lines.select, gamma[k - 1], &gamma[..k - 1]);
    emit_madd(e, st, wrap, a, en, lines.select, &positive(beta), gamma, lines.aux);
}

/// Overwriting modular addition: the value `b` in `beta` becomes
/// `b + en∧a mod N`, now held by the physical qubits of `gamma`. The roles of
/// the two registers are exchanged by a relabel.
#[allow(clippy::too_many_arguments)]
pub(crate) fn emit_oaddn(
    e: &mut Emitter,
    st: &Style,
    a: u64,
    ctx: ModulusContext,
    en: &[QubitId],
    beta: &[QubitId],
    gamma: &[QubitId],
    lines: &Lines,
) {
    if st.deferred {
        emit_oaddn_deferred(e, st, a, ctx, en, beta, gamma, lines);
        return;
    }
    emit_addn(e, st, a, ctx, en, beta, gamma, lines);
    e.cx(en, lines.select);
    e.inverted(|e| emit_addn(e, st, ctx.n() - a, ctx, en, gamma, beta, lines));
    e.swap(beta, gamma);
}

/// Overwriting modular addition with K−1 dedicated comparator lines, so the
/// comparator's scratch is cleared after the adder instead of before it.
///
/// The comparator writes `select` directly (its result gates carry the
/// enables) and its junk is removed by running only its non-result gates
/// backwards. While the junk is live the source register is complemented per
/// [`lt_mask`], which the adder compensates with negative-polarity reads.
#[allow(clippy::too_many_arguments)]
fn emit_oaddn_deferred(
    e: &mut Emitter,
    st: &Style,
    a: u64,
    ctx: ModulusContext,
    en: &[QubitId],
    src: &[QubitId],
    dst: &[QubitId],
    lines: &Lines,
) {
    let (n, k, p) = (ctx.n(), ctx.k(), ctx.pow2k());
    let sel = lines.select;
    let sw = &lines.switch;
    assert_eq!(sw.len(), k as usize - 1);

    let mask = lt_mask(n - a, k);
    let masked: Vec<ControlSpec> = src
        .iter()
        .enumerate()
        .map(|(i, &q)| ControlSpec {
            qubit: q,
            polarity: if (mask >> i) & 1 == 1 { Polarity::Negative } else { Polarity::Positive },
        })
        .collect();
    emit_lt(e, n - a, src, sel, sw, en, LtPart::Full);
    emit_madd(e, st, (p + a - n) & (p - 1), a, en, sel, &masked, dst, None);
    e.inverted(|e| emit_lt(e, n - a, src, sel, sw, en, LtPart::JunkOnly));

    e.cx(en, sel);

    e.inverted(|e| emit_madd(e, st, (p - a) & (p - 1), n - a, en, sel, &positive(dst), src, None));
    emit_lt(e, a, dst, sel, sw, en, LtPart::Full);
    e.inverted(|e| emit_lt(e, a, dst, sel, sw, en, LtPart::JunkOnly));
    e.swap(src, dst);
}

struct ModLayout {
    beta: Vec<QubitId>,
    gamma: Vec<QubitId>,
    lines: Lines,
    en: Vec<QubitId>,
    regs: Vec<Register>,
    total: u32,
}

fn mod_layout(ctx: ModulusContext, enables: usize, st: &Style) -> ModLayout {
    let k = ctx.k();
    let beta = qubits(0, k);
    let select = QubitId(k);
    let gamma = qubits(k + 1, k);
    let mut next = 2 * k + 1;
    let mut take = |len: u32| {
        let q = qubits(next, len);
        next += len;
        q
    };
    let en = take(enables as u32);
    let aux = if st.double_prime { Some(take(1)[0]) } else { None };
    let switch = if st.deferred { take(k - 1) } else { Vec::new() };
    let mut regs = vec![
        Register::new("beta", beta.clone()),
        Register::new("select", vec![select]),
        Register::new("gamma", gamma.clone()),
        Register::new("enable", en.clone()),
    ];
    if let Some(x) = aux {
        regs.push(Register::new("aux", vec![x]));
    }
    if st.deferred {
        regs.push(Register::new("switch", switch.clone()));
    }
    ModLayout { beta, gamma, lines: Lines { select, and: None, aux, switch }, en, regs, total: next }
}

fn check_enables(cfg: &NetworkConfig, enables: usize) -> Result<Style, ArithError> {
    cfg.validate()?;
    let st = Style::for_variant(cfg.variant);
    if enables > 2 || (st.double_prime && enables > 1) {
        return Err(ArithError::FormMismatch(format!(
            "variant {} does not support {enables} enable bits here",
            cfg.variant
        )));
    }
    if cfg.variant == super::Variant::MinSpace {
        return Err(ArithError::FormMismatch("use the left-to-right adders for the minimal-space variant".into()));
    }
    Ok(st)
}

fn scratch_contracts(regs: &[Register], zero_at_exit: &[&str]) -> Vec<Contract> {
    let mut out = vec![Contract::new(ContractPoint::Entry, "select", Predicate::Zero)];
    for r in regs {
        if matches!(r.name.as_str(), "gamma" | "aux" | "switch") {
            out.push(Contract::new(ContractPoint::Entry, r.name.clone(), Predicate::Zero));
        }
        if zero_at_exit.contains(&r.name.as_str()) {
            out.push(Contract::new(ContractPoint::Exit, r.name.clone(), Predicate::Zero));
        }
    }
    out
}

/// Modular adder `γ ← b + en∧a mod N`, `select ← en ∧ (a + b < N)`.
///
/// Layout: `beta` (K), `select`, `gamma` (K), `enable`, then `aux` for the
/// scratch-line variant. The gate forms follow `cfg.variant`.
pub fn build_addn(a: u64, ctx: ModulusContext, enables: usize, cfg: &NetworkConfig) -> Result<Circuit, ArithError> {
    ctx.check_operand(a)?;
    let st = check_enables(cfg, enables)?;
    let st = Style { deferred: false, ..st };
    let l = mod_layout(ctx, enables, &st);
    let mut e = Emitter::recording();
    emit_addn(&mut e, &st, a, ctx, &l.en, &l.beta, &l.gamma, &l.lines);
    let mut contracts = scratch_contracts(&l.regs, &["aux"]);
    contracts.push(Contract::new(ContractPoint::Entry, "beta", Predicate::Below(ctx.n())));
    Ok(e.finish(l.total, l.regs)?.with_contracts(contracts)?)
}

/// Overwriting modular adder `β ← b + en∧a mod N`.
///
/// Layout as [`build_addn`] (plus `switch` for the 3K+1 variant); the result
/// is read from `beta` in the final layout.
pub fn build_oaddn(a: u64, ctx: ModulusContext, enables: usize, cfg: &NetworkConfig) -> Result<Circuit, ArithError> {
    ctx.check_operand(a)?;
    let st = check_enables(cfg, enables)?;
    let l = mod_layout(ctx, enables, &st);
    let mut e = Emitter::recording();
    emit_oaddn(&mut e, &st, a, ctx, &l.en, &l.beta, &l.gamma, &l.lines);
    let mut contracts = scratch_contracts(&l.regs, &["select", "gamma", "aux", "switch"]);
    contracts.push(Contract::new(ContractPoint::Entry, "beta", Predicate::Below(ctx.n())));
    contracts.push(Contract::new(ContractPoint::Exit, "beta", Predicate::Below(ctx.n())));
    Ok(e.finish(l.total, l.regs)?.with_contracts(contracts)?)
}
