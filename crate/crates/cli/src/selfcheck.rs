use crate::{CliError, Context};
use clap::Args;
use num_rational::Rational64;
use qfn_core::arith::{build_expn, mod_pow, register_plan, ModulusContext, NetworkConfig, Variant};
use qfn_core::cost::{formula_pulses, leading_coefficients, primitive_count_table, CountCase};
use qfn_core::machine::{count_gates, total_pulses, validate, CostVector};
use qfn_core::minimal::build_expn_min;
use qfn_core::shor::{build_expn15, mod2k_test_circuit, run_factoring_experiment, ExpnSource, LookupStyle};
use qfn_core::sim::{build_qft, prepare_uniform, read_register, run_basis, BasisState, QftKind};
use serde::Serialize;

#[derive(Args, Debug, Serialize)]
pub struct SelfcheckArgs {
    /// Sampled measurements for the N = 15 success rate.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
}

fn int(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

fn rats(v: &[(i64, i64)]) -> CostVector {
    CostVector::from_rationals(v.iter().map(|&(n, d)| Rational64::new(n, d)).collect())
}

pub fn run(a: &SelfcheckArgs, ctx: &mut Context) -> Result<(), CliError> {
    let checks = &mut ctx.checks;

    for (v, k, l, want) in [(Variant::E2K1, 4, 8, 15284), (Variant::E2K2, 4, 8, 14878), (Variant::MinSpace, 4, 2, 1406)] {
        let got = formula_pulses(v, CountCase::Average, k, l).map_err(CliError::failed)?;
        checks.expect_eq(format!("{v} K={k} L={l} average pulses"), got, int(want));
    }
    let table: [(Variant, CountCase, &[i64], i64); 6] = [
        (Variant::E2K1, CountCase::Average, &[10, 4, 17, 3, 2], 198),
        (Variant::E2K2, CountCase::Average, &[10, 5, 19, 2], 186),
        (Variant::B2K3, CountCase::Average, &[10, 7, 23], 206),
        (Variant::B2K2, CountCase::Average, &[10, 5, 27], 224),
        (Variant::B2K1, CountCase::Average, &[10, 4, 49], 373),
        (Variant::B2K3, CountCase::Worst, &[], 280),
    ];
    for (v, case, vector, pulses) in table {
        let (got, got_pulses) = leading_coefficients(v, case).map_err(CliError::failed)?;
        if !vector.is_empty() {
            checks.expect_eq(format!("{v} {case} coefficients"), got, CostVector::from_integers(vector));
        }
        checks.expect_eq(format!("{v} {case} pulse coefficient"), got_pulses, int(pulses));
    }

    let rows = primitive_count_table(8).map_err(CliError::failed)?;
    let primitives = [
        ("MUXFA[2]", CostVector::from_integers(&[2, 1, 2, 1, 1]), rats(&[(1, 2), (1, 1), (5, 4), (3, 4), (1, 2)])),
        ("MUXFA[1]", CostVector::from_integers(&[2, 2, 2, 1]), rats(&[(1, 2), (5, 4), (7, 4), (1, 2)])),
        ("MUXFA''", CostVector::from_integers(&[2, 2, 4]), rats(&[(1, 2), (7, 4), (11, 4)])),
        ("MUXFA'''", CostVector::from_integers(&[2, 2, 6]), rats(&[(1, 2), (5, 4), (15, 4)])),
        ("MUXFA''''", CostVector::from_integers(&[2, 1, 15]), rats(&[(1, 2), (1, 1), (37, 4)])),
        ("LT", CostVector::from_integers(&[8, 2, 13]), rats(&[(15, 2), (3, 2), (19, 2)])),
    ];
    for (name, worst, average) in primitives {
        let row = rows.iter().find(|r| r.name == name).ok_or_else(|| CliError::failed(format!("missing {name}")))?;
        checks.expect_eq(format!("{name} worst (K=8)"), row.worst.clone(), worst);
        checks.expect_eq(format!("{name} average (K=8)"), row.average.clone(), average);
    }

    let ctx15 = ModulusContext::new(15).map_err(CliError::failed)?;
    let expn = build_expn(7, ctx15, 2, &NetworkConfig::new(Variant::E2K1)).map_err(CliError::failed)?;
    let outputs: Vec<u64> = (0..4)
        .map(|a| {
            let mut s = BasisState::zeros(expn.qubit_count());
            s.write(&expn.register("alpha").expect("alpha").qubits, a);
            let out = run_basis(&expn, &s, true).map_err(CliError::failed)?;
            Ok(read_register(&expn.final_layout(), "beta", &out).expect("beta"))
        })
        .collect::<Result<_, CliError>>()?;
    let want: Vec<u64> = (0..4).map(|a| mod_pow(7, a, 15)).collect();
    checks.expect(
        "EXPN(7, 15) table",
        outputs == [1, 7, 4, 13] && outputs == want,
        format!("{outputs:?}"),
    );
    checks.expect("EXPN fits its machine", validate(&expn, Variant::E2K1.machine()).is_ok(), "e2k1 on enhanced");

    let k = 6;
    for v in Variant::ALL.into_iter().filter(|v| v.scratch_qubits(k) == 2 * k + 1) {
        checks.expect_eq(format!("{v} qubits at K=6, L=12"), register_plan(k, 2 * k, v).total_qubits(), 5 * k + 1);
    }
    checks.expect_eq("minimal-space qubits (K=4, L=2)", build_expn_min(7, ctx15, 2).map_err(CliError::failed)?.qubit_count(), 11);

    let standard = total_pulses(&build_expn15(7, LookupStyle::Standard).map_err(CliError::failed)?);
    let custom = build_expn15(7, LookupStyle::CustomGates).map_err(CliError::failed)?;
    let prep = total_pulses(&prepare_uniform(2).map_err(CliError::failed)?);
    checks.expect_eq("N=15 lookup exponentiation pulses", standard, 34);
    checks.expect_eq("N=15 lookup gates", count_gates(&build_expn15(7, LookupStyle::Standard).map_err(CliError::failed)?), CostVector::from_integers(&[6, 0, 4]));
    checks.expect_eq("N=15 custom-gate preparation pulses", prep + total_pulses(&custom), 32);
    checks.expect_eq("L=2 transform pulses", total_pulses(&build_qft(2, QftKind::Hat, None).map_err(CliError::failed)?), 6);
    let rep = run_factoring_experiment(15, 7, 2, 2, ExpnSource::Lookup(LookupStyle::CustomGates), ctx.global.seed, a.trials)
        .map_err(CliError::failed)?;
    checks.expect_eq("N=15 full demo pulses", rep.pulses, 38);
    if a.trials >= 10_000 {
        let rate = rep.success_rate();
        checks.expect("N=15 success rate 1/2", (rate - 0.5).abs() <= 0.02, format!("{rate:.4} over {} trials", a.trials));
    }
    checks.expect_eq("mod 2^K test pulses (L=2, K=1)", total_pulses(&mod2k_test_circuit(2, 1, QftKind::Hat).map_err(CliError::failed)?), 13);
    Ok(())
}
