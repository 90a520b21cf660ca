//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use num_complex::Complex64;
use num_rational::Rational64;
use qfn_core::arith::{build_expn, mod_pow, register_plan, ModulusContext, NetworkConfig, Variant};
use qfn_core::cost::{empirical_average, formula_pulses, leading_coefficients, primitive_count_table, random_instance, CountCase};
use qfn_core::ir::{Circuit, QubitId};
use qfn_core::machine::{to_f64, total_pulses, CostVector};
use qfn_core::shor::{build_expn15, mod2k_test_circuit, run_factoring_experiment, ExpnSource, LookupStyle};
use qfn_core::sim::{
    bit_reverse, build_qft, distribution, ft_reference_prob, lanes_read, lanes_write, prepare_uniform, run_statevector,
    LaneProgram, QftKind, StateVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::Instant;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Runs `c` on the exponents `a` (up to 64 at a time) and checks the result
/// register, the exponent register and every scratch qubit.
fn check_exponents(c: &Circuit, prog: &LaneProgram, x: u64, n: u64, exps: &[u64]) -> Result<(), String> {
    let alpha = &c.register("alpha").ok_or("no alpha register")?.qubits;
    let exit = c.final_layout();
    let find = |name: &str| exit.iter().find(|r| r.name == name).map(|r| r.qubits.clone()).ok_or(format!("no {name}"));
    let (alpha_out, beta_out) = (find("alpha")?, find("beta")?);
    let scratch: Vec<QubitId> =
        (0..c.qubit_count()).map(QubitId).filter(|q| !alpha_out.contains(q) && !beta_out.contains(q)).collect();
    for chunk in exps.chunks(64) {
        let mut lanes = vec![0u64; c.qubit_count() as usize];
        lanes_write(&mut lanes, alpha, chunk);
        prog.apply(&mut lanes).map_err(|e| e.to_string())?;
        let live = if chunk.len() == 64 { !0 } else { (1u64 << chunk.len()) - 1 };
        if let Some(q) = scratch.iter().find(|q| lanes[q.index()] & live != 0) {
            return Err(format!("N={n} x={x}: scratch qubit {} left set", q.0));
        }
        let betas = lanes_read(&lanes, &beta_out, chunk.len());
        let alphas = lanes_read(&lanes, &alpha_out, chunk.len());
        for ((&a, &b), &a_out) in chunk.iter().zip(&betas).zip(&alphas) {
            ensure(b == mod_pow(x, a, n) && a_out == a, || format!("N={n} x={x} a={a}: got {b}"))?;
        }
    }
    Ok(())
}

fn criterion_1() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce_0001);
    let mut runs = 0usize;
    for v in Variant::ALL {
        let cfg = NetworkConfig::new(v);
        for k in 3..=5u32 {
            let l = 2 * k;
            for _ in 0..20 {
                let (n, x) = random_instance(&mut rng, k).map_err(|e| e.to_string())?;
                let c = build_expn(x, ModulusContext::new(n).unwrap(), l, &cfg).map_err(|e| e.to_string())?;
                let prog = LaneProgram::compile(&c).map_err(|e| e.to_string())?;
                let exps: Vec<u64> = (0..1u64 << l).collect();
                check_exponents(&c, &prog, x, n, &exps).map_err(|e| format!("{v}: {e}"))?;
                runs += exps.len();
            }
        }
        let (n, x) = random_instance(&mut rng, 8).map_err(|e| e.to_string())?;
        let c = build_expn(x, ModulusContext::new(n).unwrap(), 16, &cfg).map_err(|e| e.to_string())?;
        let prog = LaneProgram::compile(&c).map_err(|e| e.to_string())?;
        let exps: Vec<u64> = (0..10_000).map(|_| rng.random_range(0..1u64 << 16)).collect();
        check_exponents(&c, &prog, x, n, &exps).map_err(|e| format!("{v} K=8: {e}"))?;
        runs += exps.len();
    }
    Ok(format!("{runs} exponent runs over {} variants, no mismatches, scratch clean", Variant::ALL.len()))
}

fn criterion_2() -> Outcome {
    let cases = [(Variant::E2K1, 4, 8, 15284), (Variant::E2K2, 4, 8, 14878), (Variant::MinSpace, 4, 2, 1406)];
    let mut seen = Vec::new();
    for (v, k, l, want) in cases {
        let got = formula_pulses(v, CountCase::Average, k, l).map_err(|e| e.to_string())?;
        ensure(got == Rational64::from_integer(want), || format!("{v} K={k} L={l}: {got} vs {want}"))?;
        seen.push(got.to_string());
    }
    let big = formula_pulses(Variant::E2K1, CountCase::Average, 432, 864).map_err(|e| e.to_string())?;
    Ok(format!("{} exact; K=432, L=864 projects {:.3e} pulses", seen.join(", "), to_f64(big)))
}

fn criterion_3() -> Outcome {
    let ints = CostVector::from_integers;
    let rats = |v: &[(i64, i64)]| CostVector::from_rationals(v.iter().map(|&(n, d)| Rational64::new(n, d)).collect());
    let mut checked = 0;
    for k in 2..=8i64 {
        let rows = primitive_count_table(k as u32).map_err(|e| e.to_string())?;
        let row = |name: &str| rows.iter().find(|r| r.name == name).ok_or(format!("missing {name}"));
        let expected = [
            ("MUXFA[2]", ints(&[2, 1, 2, 1, 1]), rats(&[(1, 2), (1, 1), (5, 4), (3, 4), (1, 2)])),
            ("MUXFA[1]", ints(&[2, 2, 2, 1, 0]), rats(&[(1, 2), (5, 4), (7, 4), (1, 2)])),
            ("MUXFA''", ints(&[2, 2, 4]), rats(&[(1, 2), (7, 4), (11, 4)])),
            ("MUXFA'''", ints(&[2, 2, 6]), rats(&[(1, 2), (5, 4), (15, 4)])),
            ("MUXFA''''", ints(&[2, 1, 15]), rats(&[(1, 2), (1, 1), (37, 4)])),
            ("MUXHA[1]", ints(&[2, 2, 1]), rats(&[(1, 2), (5, 4), (1, 2)])),
            ("MUXHA[2]", ints(&[2, 1, 1, 1]), rats(&[(1, 2), (1, 1), (1, 4), (1, 2)])),
            ("LT", ints(&[k, 2, 2 * k - 3]), rats(&[(2 * k - 1, 2), (3, 2), (3 * k - 5, 2)])),
        ];
        for (name, worst, avg) in expected {
            let r = row(name)?;
            ensure(r.worst == worst, || format!("K={k} {name} worst {} vs {worst}", r.worst))?;
            ensure(r.average == avg, || format!("K={k} {name} average {} vs {avg}", r.average))?;
            ensure(r.worst.dominates(&r.average), || format!("K={k} {name}: worst below average"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} worst/average pairs equal for K=2..8"))
}

fn criterion_4() -> Outcome {
    let (k, l, trials, seed) = (32u32, 64u32, 8usize, 0xacce_0004);
    let scale = f64::from(l) * f64::from(k) * f64::from(k);
    let mut report = Vec::new();
    let mut failures = Vec::new();
    for v in Variant::TABLED.into_iter().chain([Variant::S3K1]) {
        let m = empirical_average(v, k, l, trials, seed).map_err(|e| e.to_string())?;
        let (lead, lead_pulses) = leading_coefficients(v, CountCase::Average).map_err(|e| e.to_string())?;
        let measured: Vec<f64> = m.mean_gates.iter().map(|g| g / scale).collect();
        let pulses = m.mean_pulses / scale;
        let want = to_f64(lead_pulses);
        if v == Variant::S3K1 {
            if (pulses / want - 1.0).abs() > 0.10 {
                failures.push(format!("s3k1 pulses {pulses:.1} vs {want} (10%)"));
            }
        } else {
            for i in 0..lead.len().max(measured.len()) {
                let t = to_f64(lead.get(i));
                let got = measured.get(i).copied().unwrap_or(0.0);
                if (got - t).abs() > 0.05 * t.max(1.0) {
                    failures.push(format!("{v} arity {i}: {got:.2} vs {t}"));
                }
            }
            if (pulses / want - 1.0).abs() > 0.05 {
                failures.push(format!("{v} pulses {pulses:.1} vs {want}"));
            }
        }
        match formula_pulses(v, CountCase::Average, k, l) {
            Ok(f) => report.push(format!("{v} {pulses:.1}/{want} (closed form {:.1})", to_f64(f) / scale)),
            Err(_) => report.push(format!("{v} {pulses:.1}/{want}")),
        }
    }
    let summary = format!("K={k}, L={l}, {trials} instances: {}", report.join(", "));
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{summary}; out of tolerance: {}", failures.join("; ")))
    }
}

fn criterion_5() -> Outcome {
    let mut checked = 0;
    for v in Variant::ALL {
        for k in 2..=12u32 {
            if v.scratch_qubits(k) != 2 * k + 1 {
                continue;
            }
            for l in [1, k, 2 * k] {
                let total = register_plan(k, l, v).total_qubits();
                ensure(total == l + 3 * k + 1, || format!("{v} K={k} L={l}: {total}"))?;
                checked += 1;
            }
            ensure(register_plan(k, 2 * k, v).total_qubits() == 5 * k + 1, || format!("{v} K={k}"))?;
        }
    }
    ensure(checked > 0, || "no 2K+1-scratch variant".into())?;
    let plan = register_plan(4, 2, Variant::MinSpace).total_qubits();
    let built = qfn_core::minimal::build_expn_min(7, ModulusContext::new(15).unwrap(), 2).map_err(|e| e.to_string())?;
    ensure(plan == 11 && built.qubit_count() == 11, || format!("minimal space uses {plan} qubits"))?;
    let e2k1 = build_expn(7, ModulusContext::new(15).unwrap(), 8, &NetworkConfig::new(Variant::E2K1)).unwrap();
    ensure(e2k1.qubit_count() == 21, || format!("E2K1 K=4 L=8 built with {} qubits", e2k1.qubit_count()))?;
    Ok(format!("{checked} plans total L+3K+1; minimal space K=4, L=2 uses 11"))
}

/// Upper tail of the chi-square law with three degrees of freedom.
fn chi2_sf_3(x: f64) -> f64 {
    libm::erfc((x / 2.0).sqrt()) + (2.0 * x / PI).sqrt() * (-x / 2.0).exp()
}

fn criterion_6() -> Outcome {
    let source = ExpnSource::Lookup(LookupStyle::CustomGates);
    let rep = run_factoring_experiment(15, 7, 2, 2, source, 0xacce_0006, 10_000).map_err(|e| e.to_string())?;
    let mut bins = [0f64; 4];
    for t in &rep.trials {
        bins[t.y as usize] += 1.0;
    }
    let expected = rep.trials.len() as f64 / 4.0;
    let chi2: f64 = bins.iter().map(|o| (o - expected).powi(2) / expected).sum();
    let p = chi2_sf_3(chi2);
    let rate = rep.success_rate();
    ensure(p > 0.01, || format!("y counts {bins:?}, chi2 {chi2:.2}, p {p:.4}"))?;
    ensure((rate - 0.5).abs() <= 0.02, || format!("success rate {rate:.4}"))?;
    let standard = total_pulses(&build_expn15(7, LookupStyle::Standard).map_err(|e| e.to_string())?);
    let custom = total_pulses(&build_expn15(7, LookupStyle::CustomGates).map_err(|e| e.to_string())?);
    let prep = total_pulses(&prepare_uniform(2).map_err(|e| e.to_string())?);
    ensure(standard == 34, || format!("standard lookup {standard} pulses"))?;
    ensure(rep.pulses == 38, || format!("full demo {} pulses", rep.pulses))?;
    ensure(prep + custom == 32, || format!("prep + custom {} pulses", prep + custom))?;
    Ok(format!("chi2 {chi2:.2} (p {p:.3}), success {rate:.4}, pulses 34/38/32"))
}

fn transform_column(l: u32, kind: QftKind, x: usize) -> Result<Vec<Complex64>, String> {
    let c = build_qft(l, kind, None).map_err(|e| e.to_string())?;
    let psi = StateVector::basis(l, x).map_err(|e| e.to_string())?;
    Ok(run_statevector(&c, &psi).map_err(|e| e.to_string())?.amplitudes().to_vec())
}

fn criterion_7() -> Outcome {
    let mut worst = 0f64;
    for l in 1..=8u32 {
        let size = 1usize << l;
        let norm = 1.0 / (size as f64).sqrt();
        for x in 0..size {
            let hat = transform_column(l, QftKind::Hat, x)?;
            let tilde = transform_column(l, QftKind::Tilde, x)?;
            for y in 0..size {
                let angle = 2.0 * PI * ((x * y) % size) as f64 / size as f64;
                let got = hat[bit_reverse(y as u64, l) as usize];
                let err = (got - Complex64::from_polar(norm, angle)).norm();
                worst = worst.max(err);
                ensure(err < 1e-12, || format!("L={l} x={x} y={y}: error {err:e}"))?;
                let gap = (hat[y].norm() - tilde[y].norm()).abs();
                ensure(gap < 1e-12, || format!("L={l} x={x}: moduli differ by {gap:e}"))?;
            }
        }
    }
    for l in 1..=16u32 {
        let p = total_pulses(&build_qft(l, QftKind::Hat, None).map_err(|e| e.to_string())?);
        ensure(p == u64::from(l * (2 * l - 1)), || format!("L={l}: {p} pulses"))?;
    }
    Ok(format!("max DFT error {worst:.1e} for L<=8, moduli agree, pulses L(2L-1) for L<=16"))
}

fn transform_law(l: u32, k: u32) -> Result<(Circuit, Vec<f64>), String> {
    let c = mod2k_test_circuit(l, k, QftKind::Hat).map_err(|e| e.to_string())?;
    let psi = run_statevector(&c, &StateVector::basis(c.qubit_count(), 0).unwrap()).map_err(|e| e.to_string())?;
    let d = distribution(&psi, c.register("alpha").unwrap()).map_err(|e| e.to_string())?.bit_reversed();
    Ok((c, d.probabilities().to_vec()))
}

fn criterion_8() -> Outcome {
    let (c, law) = transform_law(2, 1)?;
    let pulses = total_pulses(&c);
    ensure(pulses == 13, || format!("L=2, K=1 circuit {pulses} pulses"))?;
    let y0_zero = law[0] + law[2];
    ensure((y0_zero - 1.0).abs() < 1e-10, || format!("P(y0=0) = {y0_zero}"))?;
    ensure((law[0] - 0.5).abs() < 1e-10 && (law[2] - 0.5).abs() < 1e-10, || format!("y1 law {law:?}"))?;
    let mut cases = 0;
    for l in 2..=10u32 {
        for k in 1..=l.min(6) {
            let (_, got) = transform_law(l, k)?;
            let step = 1usize << (l - k);
            let mass = 1.0 / f64::from(1u32 << k);
            for (y, &p) in got.iter().enumerate() {
                let want = if y % step == 0 { mass } else { 0.0 };
                ensure((p - want).abs() < 1e-10, || format!("L={l} K={k} y={y}: {p}"))?;
            }
            for offset in 0..1u64 << k {
                let reference = ft_reference_prob(l, 1 << k, offset).map_err(|e| e.to_string())?;
                for (y, (a, b)) in got.iter().zip(reference.probabilities()).enumerate() {
                    ensure((a - b).abs() < 1e-10, || format!("L={l} K={k} offset {offset} y={y}: {a} vs {b}"))?;
                }
            }
            cases += 1;
        }
    }
    Ok(format!("13 pulses, P(y0=0)=1, {cases} (L,K) laws on multiples of 2^(L-K)"))
}

fn criterion_9() -> Outcome {
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    let out = Command::new(cargo)
        .args(["test", "--offline", "-q", "-p", "qfn-core", "--test", "properties"])
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .output()
        .map_err(|e| e.to_string())?;
    let text = String::from_utf8_lossy(&out.stdout);
    let line = text.lines().find(|l| l.starts_with("test result:")).unwrap_or("no result line").to_string();
    ensure(out.status.success(), || format!("{line}\n{}", String::from_utf8_lossy(&out.stderr)))?;
    Ok(format!("reversibility, scratch, machine, text round-trip at 1000 cases each: {line}"))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("modular exponentiation", criterion_1),
        ("pulse formulas", criterion_2),
        ("primitive count tables", criterion_3),
        ("leading coefficients", criterion_4),
        ("qubit budgets", criterion_5),
        ("N=15 end to end", criterion_6),
        ("transform correctness", criterion_7),
        ("mod 2^K transform test", criterion_8),
        ("property suites", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {} ({name}): PASS [{secs:.1}s] {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} ({name}): FAIL [{secs:.1}s] {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
