mod common;

use common::{ones, Harness};
use num_rational::Rational64;
use qfn_core::arith::{build_expn, mod_pow, register_plan, ModulusContext, NetworkConfig, Variant};
use qfn_core::machine::{count_gates, pulses, validate, CostVector, MachineModel};
use qfn_core::minimal::{
    build_add_ltr, build_expn_min, build_madd_prime, build_oaddn_min, count_add_ltr, count_madd_prime,
};

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn int(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

#[test]
fn left_to_right_adder_exhaustive_k4() {
    for n_en in 0..=2 {
        for a in 0..16 {
            let c = build_add_ltr(a, 4, n_en).unwrap();
            assert!(validate(&c, MachineModel::UNRESTRICTED).is_ok());
            let h = Harness::new(c);
            for en in 0..=ones(n_en) {
                let add = if en == ones(n_en) { a } else { 0 };
                for b in 0..16 {
                    let out = h.run(&[("beta", b), ("enable", en)]);
                    let sum = b + add;
                    assert_eq!((out.get("beta"), out.get("overflow")), (sum & 15, sum >> 4), "a={a} b={b}");
                }
            }
        }
    }
}

#[test]
fn left_to_right_adder_counts() {
    for k in 1..=8u32 {
        let all = (1u64 << k) - 1;
        let mut want = vec![k as i64];
        want.extend((1..=k as i64).rev());
        assert_eq!(count_gates(&build_add_ltr(all, k, 0).unwrap()), CostVector::from_integers(&want));
        assert_eq!(count_add_ltr(all, k, 0), CostVector::from_integers(&want));
    }
    assert!(build_add_ltr(0, 5, 1).unwrap().ops().is_empty());
}

fn average_add_pulses(k: u32, n_en: usize) -> Rational64 {
    let total = (0..1u64 << k).map(|a| pulses(&count_add_ltr(a, k, n_en))).fold(int(0), |s, p| s + p);
    total / int(1 << k)
}

fn add_formula(k: i64, l: i64) -> Rational64 {
    r(1, 6) * int(k * k * k) + (r(l, 2) + r(5, 4)) * int(k * k) + (r(3 * l, 2) + r(31, 12)) * int(k)
}

#[test]
fn left_to_right_adder_average_pulses_closed_form() {
    for n_en in 1..=2 {
        for k in 1..=8u32 {
            assert_eq!(average_add_pulses(k, n_en), add_formula(k as i64, n_en as i64), "K={k} enables={n_en}");
        }
    }
}

#[test]
fn left_to_right_adder_average_without_enables() {
    // Without enables each set addend bit starts with a bare NOT costing one
    // pulse rather than three, so the closed form overshoots by K.
    for k in 1..=8u32 {
        assert_eq!(average_add_pulses(k, 0), add_formula(k as i64, 0) - int(k as i64));
    }
}

#[test]
fn multiplexed_overflow_adder_exhaustive_k4() {
    for n_en in 0..=1 {
        for u in 0..16 {
            for v in 0..16 {
                let h = Harness::new(build_madd_prime(u, v, 4, n_en).unwrap());
                for en in 0..=ones(n_en) {
                    for sel in 0..2 {
                        for b in 0..16 {
                            let out = h.run(&[("beta", b), ("select", sel), ("enable", en)]);
                            let add = if en != ones(n_en) { 0 } else if sel == 1 { v } else { u };
                            assert_eq!((out.get("beta"), out.get("select")), ((b + add) % 16, sel));
                        }
                    }
                }
            }
        }
    }
    let h = Harness::new(build_madd_prime(2, 11, 4, 0).unwrap());
    assert_eq!(h.run(&[("beta", 7), ("select", 0)]).get("beta"), 9);
    assert_eq!(h.run(&[("beta", 7), ("select", 1)]).get("beta"), 2);
}

#[test]
fn one_qubit_scratch_modular_adder_exhaustive() {
    for n in (5..=15u64).chain([17, 29, 31]) {
        let ctx = ModulusContext::new(n).unwrap();
        for n_en in 0..=2 {
            for a in 0..n {
                let h = Harness::new(build_oaddn_min(a, ctx, n_en).unwrap());
                for en in 0..=ones(n_en) {
                    let add = if en == ones(n_en) { a } else { 0 };
                    for b in 0..n {
                        let out = h.run(&[("beta", b), ("enable", en)]);
                        assert_eq!(out.get("beta"), (b + add) % n, "N={n} a={a} b={b} en={en}");
                        assert_eq!(out.get("overflow"), 0);
                    }
                }
            }
        }
    }
    let ctx = ModulusContext::new(15).unwrap();
    let out = Harness::new(build_oaddn_min(7, ctx, 1).unwrap()).run(&[("beta", 11), ("enable", 1)]);
    assert_eq!((out.get("beta"), out.get("overflow")), (3, 0));
}

fn oaddn_formula(k: i64, l: i64) -> Rational64 {
    r(7, 12) * int(k * k * k) + (r(7 * l, 4) + r(33, 8)) * int(k * k) + (r(15 * l, 4) + r(169, 24)) * int(k)
}

#[test]
fn one_qubit_scratch_modular_adder_average_pulses_closed_form() {
    // Average with the addend bits of the two additions and the two
    // multiplexed addends independent and uniform.
    for n_en in 1..=2 {
        for k in 1..=6u32 {
            let size = int(1 << k);
            let madd = (0..1u64 << k)
                .flat_map(|u| (0..1u64 << k).map(move |v| (u, v)))
                .map(|(u, v)| pulses(&count_madd_prime(u, v, k, n_en)))
                .fold(int(0), |s, p| s + p)
                / (size * size);
            let avg = average_add_pulses(k, n_en) * int(2) + madd;
            assert_eq!(avg, oaddn_formula(k as i64, n_en as i64), "K={k} enables={n_en}");
        }
    }
}

#[test]
fn minimal_space_exponentiation() {
    let ctx = ModulusContext::new(15).unwrap();
    let c = build_expn_min(7, ctx, 2).unwrap();
    assert_eq!(c.qubit_count(), 11);
    assert_eq!(register_plan(4, 2, Variant::MinSpace).total_qubits(), 11);
    let h = Harness::new(c);
    for (a, want) in [(0, 1), (1, 7), (2, 4), (3, 13)] {
        let out = h.run(&[("alpha", a)]);
        assert_eq!(out.get("beta"), want);
        assert!(out.clean_except(&["alpha", "beta"]));
    }
}

#[test]
fn minimal_space_matches_scratch_networks() {
    for (n, x, l) in [(15u64, 2u64, 4u32), (21, 5, 5), (29, 3, 6), (31, 17, 6), (13, 6, 5)] {
        let ctx = ModulusContext::new(n).unwrap();
        let min = Harness::new(build_expn_min(x, ctx, l).unwrap());
        let std = Harness::new(build_expn(x, ctx, l, &NetworkConfig::new(Variant::E2K1)).unwrap());
        for a in 0..1u64 << l {
            let got = min.run(&[("alpha", a)]).get("beta");
            assert_eq!(got, std.run(&[("alpha", a)]).get("beta"));
            assert_eq!(got, mod_pow(x, a, n));
        }
    }
}

#[test]
fn minimal_space_rejects_bad_inputs() {
    let ctx = ModulusContext::new(15).unwrap();
    assert!(build_expn_min(6, ctx, 2).is_err());
    assert!(build_expn_min(7, ctx, 0).is_err());
    assert!(build_oaddn_min(15, ctx, 1).is_err());
    assert!(build_add_ltr(16, 4, 0).is_err());
    assert!(build_madd_prime(0, 16, 4, 0).is_err());
}
