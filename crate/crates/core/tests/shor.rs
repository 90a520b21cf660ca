use num_complex::Complex64;
use qfn_core::arith::{mod_pow, NetworkConfig, Variant};
use qfn_core::ir::compose;
use qfn_core::machine::{count_gates, total_pulses, CostVector};
use qfn_core::shor::{
    build_expn15, build_mod2k, extract_order, factor_from_order, factoring_circuit, lookup_input_mask,
    measurement_law, run_factoring_experiment, ExpnSource, FactorFailure, LookupStyle, LookupTable15, ShorError,
};
use qfn_core::sim::{
    build_qft, prepare_uniform, read_register, run_basis, run_statevector, BasisState, QftKind, StateVector,
};

const UNITS: [u64; 8] = [1, 2, 4, 7, 8, 11, 13, 14];
const STYLES: [LookupStyle; 3] = [LookupStyle::Standard, LookupStyle::DropFinalNot, LookupStyle::CustomGates];

#[test]
fn lookup_table_rows() {
    let t = LookupTable15::new(7).unwrap();
    assert_eq!(t.rows, [1, 7, 4, 13]);
    for x in UNITS {
        assert_eq!(LookupTable15::new(x).unwrap().rows[0], 1);
    }
    for x in [0, 3, 5, 15, 16] {
        assert!(matches!(LookupTable15::new(x), Err(ShorError::BadBase { .. })));
    }
}

#[test]
fn lookup_circuits_reproduce_the_table() {
    for x in UNITS {
        for style in STYLES {
            let c = build_expn15(x, style).unwrap();
            let mask = lookup_input_mask(x, style).unwrap();
            let layout = c.final_layout();
            for a in 0..4 {
                let mut s = BasisState::zeros(6);
                s.write(&c.register("alpha").unwrap().qubits, a);
                let out = run_basis(&c, &s, false).unwrap();
                assert_eq!(read_register(&layout, "beta", &out), Some(mod_pow(x, a, 15)), "x={x} {style} a={a}");
                assert_eq!(read_register(&layout, "alpha", &out), Some(a ^ mask), "x={x} {style} a={a}");
            }
        }
    }
}

#[test]
fn lookup_circuit_costs_for_seven() {
    let standard = build_expn15(7, LookupStyle::Standard).unwrap();
    assert_eq!(count_gates(&standard), CostVector::from_integers(&[6, 0, 4]));
    assert_eq!(total_pulses(&standard), 34);
    assert_eq!(total_pulses(&build_expn15(7, LookupStyle::DropFinalNot).unwrap()), 33);
    let custom = build_expn15(7, LookupStyle::CustomGates).unwrap();
    assert_eq!(count_gates(&custom), CostVector::from_integers(&[2, 0, 4]));
    assert_eq!(total_pulses(&custom), 30);
    let prep = prepare_uniform(2).unwrap();
    assert_eq!(total_pulses(&prep) + total_pulses(&custom), 32);
    assert_eq!(total_pulses(&prep) + total_pulses(&standard), 36);
    assert_eq!(total_pulses(&build_qft(2, QftKind::Hat, None).unwrap()) + 32, 38);
}

#[test]
fn other_bases_are_cheaper() {
    for x in UNITS.into_iter().filter(|&x| x != 7 && x != 13) {
        for style in STYLES {
            assert!(total_pulses(&build_expn15(x, style).unwrap()) < 34, "x={x} {style}");
        }
    }
}

#[test]
fn entangled_state_before_transform() {
    for style in STYLES {
        let prep = prepare_uniform(2).unwrap();
        let f = build_expn15(7, style).unwrap();
        let prep = qfn_core::ir::Circuit::new(6, f.registers().to_vec(), prep.ops().to_vec()).unwrap();
        let c = compose(&prep, &f).unwrap();
        let psi = run_statevector(&c, &StateVector::basis(6, 0).unwrap()).unwrap();
        let mask = lookup_input_mask(7, style).unwrap();
        for (i, amp) in psi.amplitudes().iter().enumerate() {
            let (alpha, beta) = ((i & 3) as u64, (i >> 2) as u64);
            let want = if mod_pow(7, alpha ^ mask, 15) == beta { 0.5 } else { 0.0 };
            assert!((amp - Complex64::new(want, 0.0)).norm() < 1e-12, "{style} index {i}");
        }
    }
}

#[test]
fn mod2k_copies_low_bits() {
    let c = build_mod2k(4, 2).unwrap();
    let mut s = BasisState::zeros(6);
    s.write(&c.register("alpha").unwrap().qubits, 0b1011);
    let out = run_basis(&c, &s, false).unwrap();
    assert_eq!(read_register(c.registers(), "beta", &out), Some(0b11));
    for (l, k) in [(2, 1), (4, 2), (6, 3)] {
        let total = total_pulses(&prepare_uniform(l).unwrap()) + total_pulses(&build_mod2k(l, k).unwrap());
        assert_eq!(total, u64::from(5 * k + l));
    }
    assert!(build_mod2k(2, 3).is_err());
}

#[test]
fn order_extraction_examples() {
    let r = extract_order(3, 2, 15);
    assert!(r.success);
    assert_eq!((r.candidate_r, r.numerator), (4, 3));
    assert_eq!(extract_order(2, 2, 15).candidate_r, 2);
    assert_eq!(extract_order(192, 8, 16).candidate_r, 4);
    assert!(!extract_order(0, 4, 16).success);
    assert!(!extract_order(16, 4, 16).success);
    // Denominators must stay strictly below the bound.
    assert_eq!(extract_order(3, 2, 4).candidate_r, 1);
}

#[test]
fn order_extraction_recovers_reduced_denominators() {
    for l in 4..=12u32 {
        let bound = 1u64 << (l / 2);
        for r in 2..bound {
            for j in 1..r {
                if num_integer::gcd(j, r) != 1 {
                    continue;
                }
                let y = ((j as u128) << l) as f64 / r as f64;
                let y = y.round() as u64;
                let got = extract_order(y, l, bound);
                assert!(got.success);
                assert_eq!(got.candidate_r, r, "L={l} r={r} j={j} y={y}");
            }
        }
    }
}

#[test]
fn factor_extraction() {
    assert_eq!(factor_from_order(7, 4, 15), Ok((3, 5)));
    assert_eq!(factor_from_order(7, 3, 15), Err(FactorFailure::OddOrder));
    assert_eq!(factor_from_order(14, 2, 15), Err(FactorFailure::SquareRootIsMinusOne));
    assert_eq!(factor_from_order(4, 2, 15), Ok((3, 5)));
    assert_eq!(factor_from_order(2, 0, 15), Err(FactorFailure::OddOrder));
}

fn law(x: u64, ft_width: u32, source: ExpnSource) -> Vec<f64> {
    let (c, alpha) = factoring_circuit(15, x, 2, ft_width, source).unwrap();
    measurement_law(&c, &alpha).unwrap().probabilities().to_vec()
}

fn assert_law(got: &[f64], want: &[f64]) {
    assert_eq!(got.len(), want.len());
    for (y, (a, b)) in got.iter().zip(want).enumerate() {
        assert!((a - b).abs() < 1e-10, "y={y}: {a} vs {b}");
    }
}

#[test]
fn measurement_laws_for_fifteen() {
    let lookup = ExpnSource::Lookup(LookupStyle::Standard);
    assert_law(&law(7, 2, lookup), &[0.25; 4]);
    assert_law(&law(4, 2, lookup), &[0.5, 0.0, 0.5, 0.0]);
    assert_law(&law(1, 2, lookup), &[1.0, 0.0, 0.0, 0.0]);
    for style in STYLES {
        assert_law(&law(13, 2, ExpnSource::Lookup(style)), &[0.25; 4]);
    }
    // Wider transform: uniform over multiples of 2^(width-2).
    let mut want = vec![0.0; 16];
    for y in [0, 4, 8, 12] {
        want[y] = 0.25;
    }
    assert_law(&law(7, 4, lookup), &want);
}

#[test]
fn general_network_gives_the_same_law() {
    for v in [Variant::E2K1, Variant::MinSpace] {
        assert_law(&law(7, 2, ExpnSource::General(NetworkConfig::new(v))), &[0.25; 4]);
    }
}

#[test]
fn experiment_reports_are_consistent() {
    let rep = run_factoring_experiment(15, 7, 2, 2, ExpnSource::Lookup(LookupStyle::CustomGates), 9, 2000).unwrap();
    assert_eq!(rep.pulses, 38);
    assert_eq!(rep.seed, 9);
    for t in &rep.trials {
        if let Some((p, q)) = t.factors {
            assert!(t.verified);
            assert_eq!(mod_pow(7, t.order.candidate_r, 15), 1);
            assert!(p > 1 && q > 1 && p * q == 15);
        }
        if t.y == 0 {
            assert!(t.factors.is_none());
        }
    }
    let again = run_factoring_experiment(15, 7, 2, 2, ExpnSource::Lookup(LookupStyle::CustomGates), 9, 2000).unwrap();
    assert_eq!(again, rep);
    assert!((rep.success_rate() - 0.5).abs() < 0.05);
    let rep = run_factoring_experiment(15, 1, 2, 2, ExpnSource::Lookup(LookupStyle::Standard), 1, 100).unwrap();
    assert!(rep.trials.iter().all(|t| t.y == 0 && t.factors.is_none()));
}

#[test]
fn experiment_rejects_bad_parameters() {
    let lookup = ExpnSource::Lookup(LookupStyle::Standard);
    assert!(run_factoring_experiment(21, 2, 2, 2, lookup, 1, 1).is_err());
    assert!(run_factoring_experiment(15, 7, 2, 1, lookup, 1, 1).is_err());
}
