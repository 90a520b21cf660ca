use crate::build::KindArg;
use crate::{CliError, Context};
use clap::Args;
use qfn_core::machine::total_pulses;
use qfn_core::shor::mod2k_test_circuit;
use qfn_core::sim::{distribution, ft_reference_mixture, run_statevector, sample, StateVector};
use serde::Serialize;
use serde_json::json;

#[derive(Args, Debug, Serialize)]
pub struct QftTestArgs {
    /// Transform width.
    #[arg(long = "L")]
    pub l: u32,
    /// Bits copied by the `a mod 2^K` stage.
    #[arg(long = "K")]
    pub k: u32,
    #[arg(long, value_enum, default_value_t = KindArg::Hat)]
    pub kind: KindArg,
    /// Sampled measurements to report.
    #[arg(long, default_value_t = 0)]
    pub shots: usize,
}

pub fn run(a: &QftTestArgs, ctx: &mut Context) -> Result<(), CliError> {
    let c = mod2k_test_circuit(a.l, a.k, a.kind.into()).map_err(CliError::usage)?;
    let psi = run_statevector(&c, &StateVector::basis(c.qubit_count(), 0).map_err(CliError::usage)?)
        .map_err(CliError::failed)?;
    let law = distribution(&psi, c.register("alpha").expect("exponent register"))
        .map_err(CliError::failed)?
        .bit_reversed();
    let reference = ft_reference_mixture(a.l, 1 << a.k).map_err(CliError::failed)?;
    let deviation = law
        .probabilities()
        .iter()
        .zip(reference.probabilities())
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);
    let y0_zero: f64 = law.probabilities().iter().step_by(2).sum();
    let pulses = total_pulses(&c);

    ctx.out.line(format!("L={} K={}: {} qubits, {pulses} pulses", a.l, a.k, c.qubit_count()));
    for (y, p) in law.support(1e-12) {
        ctx.out.line(format!("y={y:<6} p={p:.12}"));
    }
    ctx.out.line(format!("P(y0=0) = {y0_zero:.12}"));
    ctx.out.line(format!("max deviation from the periodic-state law: {deviation:.3e}"));
    let shots = sample(&law, ctx.global.seed, a.shots);
    if !shots.is_empty() {
        let text: Vec<String> = shots.iter().map(u64::to_string).collect();
        ctx.out.line(format!("samples (seed {}): {}", ctx.global.seed, text.join(" ")));
    }
    ctx.out.record(json!({
        "record": "qft-test", "L": a.l, "K": a.k, "qubits": c.qubit_count(), "pulses": pulses,
        "distribution": law.probabilities(), "p_y0_zero": y0_zero, "max_deviation": deviation,
        "seed": ctx.global.seed, "samples": shots,
    }));

    let step = 1usize << (a.l - a.k);
    let mass = 1.0 / f64::from(1u32 << a.k);
    let on_grid = law.probabilities().iter().enumerate().all(|(y, &p)| {
        let want = if y % step == 0 { mass } else { 0.0 };
        (p - want).abs() < 1e-10
    });
    ctx.checks.expect("support on multiples of 2^(L-K)", on_grid, format!("mass {mass} each"));
    ctx.checks.expect("matches periodic-state law", deviation < 1e-10, format!("max deviation {deviation:.1e}"));
    if a.k < a.l {
        ctx.checks.expect("P(y0=0) = 1", (y0_zero - 1.0).abs() < 1e-10, format!("{y0_zero:.12}"));
    }
    if a.l == 2 && a.k == 1 {
        ctx.checks.expect_eq("L=2, K=1 pulses", pulses, 13);
    }
    Ok(())
}
