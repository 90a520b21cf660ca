use crate::{CliError, Context};
use clap::Args;
use num_rational::Rational64;
use qfn_core::arith::Variant;
use qfn_core::cost::{
    formula_gate_vector, formula_pulses, instance_counts, leading_coefficients, primitive_count_table, summarize,
    CountCase,
};
use qfn_core::machine::to_f64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

#[derive(Args, Debug, Serialize)]
pub struct CountArgs {
    /// Variants to tabulate (repeatable; default all).
    #[arg(long)]
    pub variant: Vec<String>,
    /// Tabulate every variant.
    #[arg(long)]
    pub all: bool,
    /// Average or worst case.
    #[arg(long, default_value = "average")]
    pub case: String,
    /// Register width for totals.
    #[arg(long = "K")]
    pub k: Option<u32>,
    /// Exponent width for totals (default 2K).
    #[arg(long = "L")]
    pub l: Option<u32>,
    /// Random instances to construct and count (needs --K).
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    /// Print the primitive worst/average table at width --K.
    #[arg(long)]
    pub primitives: bool,
}

/// Leading pulse coefficients of the summary table.
const TABLE: [(Variant, CountCase, i64); 8] = [
    (Variant::E2K1, CountCase::Average, 198),
    (Variant::E2K2, CountCase::Average, 186),
    (Variant::B2K3, CountCase::Average, 206),
    (Variant::B2K2, CountCase::Average, 224),
    (Variant::B2K1, CountCase::Average, 373),
    (Variant::S3K1, CountCase::Average, 140),
    (Variant::B2K3, CountCase::Worst, 280),
    (Variant::B2K1, CountCase::Worst, 568),
];

/// Exact pulse totals quoted for small instances.
const TOTALS: [(Variant, u32, u32, i64); 3] =
    [(Variant::E2K1, 4, 8, 15284), (Variant::E2K2, 4, 8, 14878), (Variant::MinSpace, 4, 2, 1406)];

fn rational_list(v: &[Rational64]) -> Vec<serde_json::Value> {
    v.iter().map(|r| if r.is_integer() { json!(r.to_integer()) } else { json!(r.to_string()) }).collect()
}

pub fn run(a: &CountArgs, ctx: &mut Context) -> Result<(), CliError> {
    let case: CountCase = a.case.parse().map_err(CliError::usage)?;
    let variants: Vec<Variant> = if a.all || a.variant.is_empty() {
        Variant::ALL.to_vec()
    } else {
        a.variant.iter().map(|s| s.parse().map_err(CliError::usage)).collect::<Result<_, _>>()?
    };
    if a.trials > 0 && a.k.is_none() {
        return Err(CliError::usage("--trials needs --K"));
    }
    if a.primitives && a.k.is_none() {
        return Err(CliError::usage("--primitives needs --K"));
    }

    ctx.out.line(format!("{case} case, coefficient of L*K^2"));
    ctx.out.line(format!("{:<8} {:<22} {:>8}", "variant", "gates by controls", "pulses"));
    for &v in &variants {
        match leading_coefficients(v, case) {
            Ok((vector, pulses)) => {
                ctx.out.line(format!("{:<8} {:<22} {:>8}", v.to_string(), vector.to_string(), pulses.to_string()));
                ctx.out.record(json!({
                    "record": "leading", "variant": v.to_string(), "case": case.to_string(),
                    "gates_by_controls": rational_list(&vector.trimmed()), "pulses": rational_list(&[pulses])[0],
                }));
                if let Some(&(_, _, want)) = TABLE.iter().find(|t| t.0 == v && t.1 == case) {
                    ctx.checks.expect_eq(format!("{v} {case} pulse coefficient"), pulses, Rational64::from_integer(want));
                }
            }
            Err(e) => ctx.out.line(format!("{:<8} {:<22} {:>8}  ({e})", v.to_string(), "-", "-")),
        }
    }

    if let Some(k) = a.k {
        let l = a.l.unwrap_or(2 * k);
        ctx.out.line(format!("closed-form totals at K={k}, L={l}"));
        for &v in &variants {
            match (formula_gate_vector(v, case, k, l), formula_pulses(v, case, k, l)) {
                (Ok(vector), Ok(pulses)) => {
                    ctx.out.line(format!("{:<8} {:<40} {:>14}", v.to_string(), vector.to_string(), pulses.to_string()));
                    ctx.out.record(json!({
                        "record": "formula", "variant": v.to_string(), "case": case.to_string(), "K": k, "L": l,
                        "gates_by_controls": rational_list(&vector.trimmed()), "pulses": rational_list(&[pulses])[0],
                    }));
                    if let Some(&(_, _, _, want)) = TOTALS.iter().find(|t| t.0 == v && t.1 == k && t.2 == l) {
                        if case == CountCase::Average {
                            ctx.checks.expect_eq(format!("{v} K={k} L={l} pulses"), pulses, Rational64::from_integer(want));
                        }
                    }
                }
                (Err(e), _) | (_, Err(e)) => ctx.out.line(format!("{:<8} ({e})", v.to_string())),
            }
        }
        if a.trials > 0 {
            ctx.out.line(format!("constructed networks, {} random instances, seed {}", a.trials, ctx.global.seed));
            for &v in &variants {
                let seed = ctx.global.seed;
                let counts = ctx.pool(|| {
                    (0..a.trials).into_par_iter().map(|i| instance_counts(v, k, l, seed, i)).collect::<Result<Vec<_>, _>>()
                })?;
                let m = summarize(v, k, l, seed, &counts.map_err(CliError::failed)?).map_err(CliError::failed)?;
                let formula = formula_pulses(v, CountCase::Average, k, l).ok().map(to_f64);
                let gates: Vec<String> = m.mean_gates.iter().map(|g| format!("{g:.2}")).collect();
                let vs = formula.map(|f| format!(" ({:+.2}% vs closed form)", 100.0 * (m.mean_pulses / f - 1.0)));
                ctx.out.line(format!(
                    "{:<8} [{}] {:.2} pulses{}",
                    v.to_string(),
                    gates.join(","),
                    m.mean_pulses,
                    vs.unwrap_or_default()
                ));
                ctx.out.record(json!({
                    "record": "measured", "variant": v.to_string(), "K": k, "L": l, "trials": a.trials, "seed": seed,
                    "mean_gates_by_controls": m.mean_gates, "mean_pulses": m.mean_pulses, "closed_form_pulses": formula,
                }));
            }
        }
    }

    if a.primitives {
        let k = a.k.expect("checked above");
        let rows = primitive_count_table(k).map_err(CliError::usage)?;
        ctx.out.line(format!("primitives at K={k}"));
        ctx.out.line(format!("{:<10} {:<22} {}", "primitive", "worst", "average"));
        for r in rows {
            ctx.out.line(format!("{:<10} {:<22} {}", r.name, r.worst.to_string(), r.average));
            ctx.out.record(json!({
                "record": "primitive", "name": r.name, "K": k,
                "worst": rational_list(&r.worst.trimmed()), "average": rational_list(&r.average.trimmed()),
            }));
        }
    }
    Ok(())
}
