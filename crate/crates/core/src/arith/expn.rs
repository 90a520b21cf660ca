//! Modular exponentiation by repeated squaring.

use super::classical::classical_precompute;
use super::multiply::{emit_emul, emit_omuln, mul_layout, scratch_names, MulLayout, Roles};
use super::{qubits, ArithError, ModulusContext, NetworkConfig, Style, Variant};
use crate::emit::Emitter;
use crate::ir::{Circuit, Contract, ContractPoint, Predicate, Register};
use crate::machine::CostVector;

/// Register budget of an exponentiation network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegisterPlan {
    pub variant: Variant,
    pub k: u32,
    pub l: u32,
    /// `(name, width)` in qubit order.
    pub registers: Vec<(String, u32)>,
}

impl RegisterPlan {
    pub fn total_qubits(&self) -> u32 {
        self.registers.iter().map(|(_, w)| w).sum()
    }

    /// Qubits other than the exponent and result registers.
    pub fn scratch_qubits(&self) -> u32 {
        self.registers.iter().filter(|(n, _)| n != "alpha" && n != "beta").map(|(_, w)| w).sum()
    }
}

/// The layout [`build_expn`] uses for width `k` and exponent width `l`.
pub fn register_plan(k: u32, l: u32, variant: Variant) -> RegisterPlan {
    let regs: Vec<(String, u32)> = if variant == Variant::MinSpace {
        vec![("alpha".into(), l), ("beta".into(), k), ("gamma".into(), k), ("overflow".into(), 1)]
    } else {
        let st = Style::for_variant(variant);
        let layout = mul_layout(k, l, &st, vec![Register::new("alpha", qubits(0, l))], &[]);
        layout.regs.iter().map(|r| (r.name.clone(), r.width() as u32)).collect()
    };
    RegisterPlan { variant, k, l, registers: regs }
}

fn check(l: u32, cfg: &NetworkConfig) -> Result<(), ArithError> {
    cfg.validate()?;
    if l == 0 {
        return Err(ArithError::EmptyInput);
    }
    if l > 4096 {
        return Err(ArithError::BadWidth(l));
    }
    Ok(())
}

fn emit_expn(e: &mut Emitter, x: u64, ctx: ModulusContext, l: u32, cfg: &NetworkConfig, layout: &MulLayout) -> Result<Roles, ArithError> {
    let st = Style::for_variant(cfg.variant);
    let pre = classical_precompute(x, ctx, l)?;
    let alpha = qubits(0, l);
    let mut roles = layout.roles.clone();
    let first = if cfg.first_mul_optimized {
        emit_emul(e, pre.powers[0], &[alpha[0]], &roles.beta);
        e.not(alpha[0]);
        e.cx(&[alpha[0]], roles.beta[0]);
        e.not(alpha[0]);
        1
    } else {
        e.not(roles.beta[0]);
        0
    };
    for (i, &bit) in alpha.iter().enumerate().take(l as usize).skip(first) {
        roles = emit_omuln(e, &st, pre.powers[i], pre.inverses[i], ctx, &[bit], &roles, &layout.lines);
    }
    Ok(roles)
}

/// Modular exponentiation `beta ← x^a mod N` for the `l`-bit exponent `a`
/// held in `alpha`; `beta` and all scratch start and end at zero.
///
/// Layout per [`register_plan`]. Requires `gcd(x, N) = 1`.
pub fn build_expn(x: u64, ctx: ModulusContext, l: u32, cfg: &NetworkConfig) -> Result<Circuit, ArithError> {
    check(l, cfg)?;
    if cfg.variant == Variant::MinSpace {
        return crate::minimal::build_expn_min_with(x, ctx, l, cfg.first_mul_optimized);
    }
    let st = Style::for_variant(cfg.variant);
    let layout = mul_layout(ctx.k(), l, &st, vec![Register::new("alpha", qubits(0, l))], &[]);
    let mut e = Emitter::recording();
    let roles = emit_expn(&mut e, x, ctx, l, cfg, &layout)?;
    let start = &layout.roles;
    e.relabel_to(
        &[start.beta.clone(), start.gamma.clone(), start.delta.clone()],
        &[roles.beta, roles.gamma, roles.delta],
    );
    let total = layout.total;
    let mut contracts = vec![Contract::new(ContractPoint::Entry, "beta", Predicate::Zero)];
    for r in &layout.regs {
        if scratch_names().contains(&r.name.as_str()) && r.width() > 0 {
            contracts.push(Contract::new(ContractPoint::Entry, r.name.clone(), Predicate::Zero));
            contracts.push(Contract::new(ContractPoint::Exit, r.name.clone(), Predicate::Zero));
        }
    }
    contracts.push(Contract::new(ContractPoint::Exit, "beta", Predicate::Below(ctx.n())));
    Ok(e.finish(total, layout.regs)?.with_contracts(contracts)?)
}

/// Gate counts of [`build_expn`] without materialising the circuit.
pub fn count_expn(x: u64, ctx: ModulusContext, l: u32, cfg: &NetworkConfig) -> Result<CostVector, ArithError> {
    check(l, cfg)?;
    if cfg.variant == Variant::MinSpace {
        return crate::minimal::count_expn_min(x, ctx, l, cfg.first_mul_optimized);
    }
    let st = Style::for_variant(cfg.variant);
    let layout = mul_layout(ctx.k(), l, &st, vec![Register::new("alpha", qubits(0, l))], &[]);
    let mut e = Emitter::counting();
    emit_expn(&mut e, x, ctx, l, cfg, &layout)?;
    Ok(e.tally())
}
