use crate::{CliError, Context};
use clap::Args;
use qfn_core::arith::{NetworkConfig, Variant};
use qfn_core::shor::{build_expn15, run_factoring_experiment, ExpnSource, LookupStyle};
use qfn_core::machine::total_pulses;
use serde::Serialize;
use serde_json::json;
use std::collections::BTreeMap;

#[derive(Args, Debug, Serialize)]
pub struct FactorArgs {
    /// Number to factor.
    #[arg(long = "N")]
    pub n: u64,
    /// Base.
    #[arg(long)]
    pub x: u64,
    /// Exponent width.
    #[arg(long = "L")]
    pub l: u32,
    /// Transform width (default L).
    #[arg(long)]
    pub ft_width: Option<u32>,
    /// Sampled measurements.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Exponentiation network: lookup-standard, lookup-drop-final-not,
    /// lookup-custom (N = 15, L = 2 only) or a variant name.
    #[arg(long)]
    pub source: Option<String>,
}

fn parse_source(s: &str) -> Result<ExpnSource, CliError> {
    if let Some(style) = s.strip_prefix("lookup-") {
        let style: LookupStyle = style.parse().map_err(CliError::usage)?;
        return Ok(ExpnSource::Lookup(style));
    }
    let v: Variant = s.parse().map_err(CliError::usage)?;
    Ok(ExpnSource::General(NetworkConfig::new(v)))
}

pub fn run(a: &FactorArgs, ctx: &mut Context) -> Result<(), CliError> {
    let ft_width = a.ft_width.unwrap_or(a.l);
    let default = if a.n == 15 && a.l == 2 { "lookup-custom" } else { "e2k1" };
    let source_name = a.source.as_deref().unwrap_or(default);
    let source = parse_source(source_name)?;
    if a.trials == 0 {
        return Err(CliError::usage("--trials must be positive"));
    }
    let seed = ctx.global.seed;
    let rep = run_factoring_experiment(a.n, a.x, a.l, ft_width, source, seed, a.trials).map_err(CliError::usage)?;

    let mut counts = vec![0usize; 1 << ft_width];
    let mut orders: BTreeMap<u64, usize> = BTreeMap::new();
    let mut factors: BTreeMap<(u64, u64), usize> = BTreeMap::new();
    for t in &rep.trials {
        counts[t.y as usize] += 1;
        if t.verified {
            *orders.entry(t.order.candidate_r).or_default() += 1;
        }
        if let Some(f) = t.factors {
            *factors.entry(f).or_default() += 1;
        }
    }
    let rate = rep.success_rate();
    ctx.out.line(format!(
        "N={} x={} L={} transform width {ft_width}, source {source_name}, {} pulses, seed {seed}",
        a.n, a.x, a.l, rep.pulses
    ));
    ctx.out.line(format!("{:>6} {:>12} {:>8}", "y", "probability", "observed"));
    for (y, &p) in rep.distribution.probabilities().iter().enumerate() {
        if p > 1e-12 || counts[y] > 0 {
            ctx.out.line(format!("{y:>6} {p:>12.6} {:>8}", counts[y]));
        }
    }
    for (r, c) in &orders {
        ctx.out.line(format!("order {r}: {c} trials"));
    }
    for ((p, q), c) in &factors {
        ctx.out.line(format!("factors {p} x {q}: {c} trials"));
    }
    ctx.out.line(format!("success rate {rate:.4} over {} trials", a.trials));
    ctx.out.record(json!({
        "record": "factor", "N": a.n, "x": a.x, "L": a.l, "ft_width": ft_width, "source": source_name,
        "seed": seed, "trials": a.trials, "pulses": rep.pulses, "success_rate": rate,
        "distribution": rep.distribution.probabilities(), "observed": counts,
        "orders": orders.iter().map(|(r, c)| json!({"r": r, "count": c})).collect::<Vec<_>>(),
        "factors": factors.iter().map(|((p, q), c)| json!({"p": p, "q": q, "count": c})).collect::<Vec<_>>(),
    }));

    if a.n == 15 && a.x == 7 && a.l == 2 && ft_width == 2 {
        if a.trials >= 10_000 {
            ctx.checks.expect("success rate 1/2", (rate - 0.5).abs() <= 0.02, format!("{rate:.4} within 0.02 of 0.5"));
        }
        if matches!(source, ExpnSource::Lookup(LookupStyle::CustomGates)) {
            ctx.checks.expect_eq("full demo pulses", rep.pulses, 38);
        }
        if matches!(source, ExpnSource::Lookup(LookupStyle::Standard)) {
            let expn = total_pulses(&build_expn15(7, LookupStyle::Standard).map_err(CliError::failed)?);
            ctx.checks.expect_eq("lookup exponentiation pulses", expn, 34);
        }
    }
    Ok(())
}
