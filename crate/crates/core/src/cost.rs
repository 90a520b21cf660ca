//! Closed-form cost formulas, worst/average aggregation over classical bits,
//! and measured counts of constructed networks.

use crate::arith::{
    build_lt, build_muxfa, build_muxha, count_expn, mod_inverse, ArithError, ModulusContext, MuxForm, NetworkConfig,
    Variant,
};
use crate::machine::{count_gates, pulses, to_f64, CostVector, MachineModel};
use num_integer::Integer;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;

/// Aggregation over the classical bits that steer gate choices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CountCase {
    /// Entrywise maximum.
    Worst,
    /// Mean with independent uniform bits.
    Average,
}

impl fmt::Display for CountCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CountCase::Worst => "worst",
            CountCase::Average => "average",
        })
    }
}

impl std::str::FromStr for CountCase {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "worst" => Ok(CountCase::Worst),
            "average" | "ave" | "avg" => Ok(CountCase::Average),
            _ => Err(format!("unknown case {s:?} (expected worst or average)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CostError {
    #[error("no closed form for {variant} ({case} case)")]
    NoClosedForm { variant: Variant, case: CountCase },
    #[error("parameters out of range: {0}")]
    BadParams(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

fn r(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

fn int(n: i64) -> Rational64 {
    Rational64::from_integer(n)
}

/// Evaluates `Σ c_i K^i` for coefficients listed lowest power first.
fn poly(coeffs: &[Rational64], k: i64) -> Rational64 {
    coeffs.iter().rev().fold(int(0), |acc, c| acc * int(k) + c)
}

/// Average gate counts per controlled multiplication (lowest power of K
/// first, one polynomial per arity).
fn omuln_average(variant: Variant) -> Option<Vec<[i64; 3]>> {
    let v = match variant {
        Variant::E2K1 => vec![[4, -14, 10], [-12, 8, 4], [22, -36, 17], [-3, 0, 3], [2, -4, 2]],
        Variant::E2K2 => vec![[4, -14, 10], [-14, 10, 5], [21, -34, 19], [2, -4, 2]],
        Variant::B2K3 => vec![[4, -14, 10], [-12, 6, 7], [25, -42, 23]],
        Variant::B2K2 => vec![[4, -14, 10], [-14, 10, 5], [29, -50, 27]],
        Variant::B2K1 => vec![[4, -14, 10], [-12, 8, 4], [30, -76, 49]],
        Variant::S3K1 | Variant::MinSpace => return None,
    };
    Some(v)
}

fn check_kl(k: u32, l: u32) -> Result<(), CostError> {
    if k < 2 || l < 1 {
        return Err(CostError::BadParams(format!("K = {k}, L = {l} (need K ≥ 2, L ≥ 1)")));
    }
    Ok(())
}

/// Closed-form gate vector of the exponentiation network with the first
/// multiplication replaced by a controlled copy.
pub fn formula_gate_vector(variant: Variant, case: CountCase, k: u32, l: u32) -> Result<CostVector, CostError> {
    check_kl(k, l)?;
    let per = match (case, omuln_average(variant)) {
        (CountCase::Average, Some(p)) => p,
        _ => return Err(CostError::NoClosedForm { variant, case }),
    };
    let kk = k as i64;
    let mut counts: Vec<Rational64> =
        per.iter().map(|c| poly(&[int(c[0]), int(c[1]), int(c[2])], kk) * int(l as i64 - 1)).collect();
    counts[0] += int(2);
    counts[1] += r(kk, 2) + int(1);
    Ok(CostVector::from_rationals(counts))
}

/// Closed-form pulse count of the exponentiation network.
pub fn formula_pulses(variant: Variant, case: CountCase, k: u32, l: u32) -> Result<Rational64, CostError> {
    check_kl(k, l)?;
    if variant == Variant::MinSpace && case == CountCase::Average {
        let kk = k as i64;
        let per = poly(&[int(0), r(-97, 12), r(83, 6), r(169, 12), r(7, 6)], kk);
        return Ok(per * int(l as i64 - 1) + r(5 * kk, 2) + int(7));
    }
    Ok(pulses(&formula_gate_vector(variant, case, k, l)?))
}

/// Coefficients of `L·K²` in the gate vector and in the pulse count.
pub fn leading_coefficients(variant: Variant, case: CountCase) -> Result<(CostVector, Rational64), CostError> {
    let v: &[i64] = match (variant, case) {
        (Variant::E2K1, CountCase::Average) => &[10, 4, 17, 3, 2],
        (Variant::E2K2, CountCase::Average) => &[10, 5, 19, 2, 0],
        (Variant::B2K3, CountCase::Average) => &[10, 7, 23],
        (Variant::B2K2, CountCase::Average) => &[10, 5, 27],
        (Variant::B2K1, CountCase::Average) => &[10, 4, 49],
        (Variant::S3K1, CountCase::Average) => &[6, 5, 13, 2, 0],
        (Variant::E2K1, CountCase::Worst) => &[16, 4, 24, 4, 4],
        (Variant::E2K2, CountCase::Worst) => &[16, 8, 24, 4, 0],
        (Variant::B2K3, CountCase::Worst) => &[16, 8, 32],
        (Variant::B2K2, CountCase::Worst) => &[16, 8, 40],
        (Variant::B2K1, CountCase::Worst) => &[16, 4, 76],
        _ => return Err(CostError::NoClosedForm { variant, case }),
    };
    let v = CostVector::from_integers(v);
    let p = pulses(&v);
    Ok((v, p))
}

/// Random odd modulus `2^(K−1) ≤ N < 2^K` and a base coprime to it other than 1.
pub fn random_instance(rng: &mut impl Rng, k: u32) -> Result<(u64, u64), CostError> {
    if !(3..=62).contains(&k) {
        return Err(CostError::BadParams(format!("no odd K-bit modulus with a nontrivial base for K = {k}")));
    }
    let lo = 1u64 << (k - 1);
    loop {
        let n = rng.random_range(lo..lo << 1) | 1;
        let x = rng.random_range(2..n);
        if x.gcd(&n) == 1 {
            return Ok((n, x));
        }
    }
}

/// Measured counts averaged over random instances.
#[derive(Clone, Debug, PartialEq)]
pub struct EmpiricalAverage {
    pub variant: Variant,
    pub k: u32,
    pub l: u32,
    pub trials: usize,
    pub seed: u64,
    /// Mean gate count per arity.
    pub mean_gates: Vec<f64>,
    pub mean_pulses: f64,
}

/// Gate counts of one constructed network for the random instance `index`
/// of the stream seeded by `seed`.
pub fn instance_counts(variant: Variant, k: u32, l: u32, seed: u64, index: usize) -> Result<CostVector, CostError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let (n, x) = random_instance(&mut rng, k)?;
    let ctx = ModulusContext::with_width(n, k)?;
    mod_inverse(x, n)?;
    Ok(count_expn(x, ctx, l, &NetworkConfig::new(variant))?)
}

/// Mean counts of `trials` constructed networks for random `(N, x)`.
pub fn empirical_average(variant: Variant, k: u32, l: u32, trials: usize, seed: u64) -> Result<EmpiricalAverage, CostError> {
    let counts: Result<Vec<CostVector>, CostError> =
        (0..trials).map(|i| instance_counts(variant, k, l, seed, i)).collect();
    summarize(variant, k, l, seed, &counts?)
}

/// Aggregates per-instance counts (as produced by [`instance_counts`]).
pub fn summarize(variant: Variant, k: u32, l: u32, seed: u64, counts: &[CostVector]) -> Result<EmpiricalAverage, CostError> {
    if counts.is_empty() {
        return Err(CostError::BadParams("at least one trial is required".into()));
    }
    let mean = CostVector::mean(counts);
    Ok(EmpiricalAverage {
        variant,
        k,
        l,
        trials: counts.len(),
        seed,
        mean_gates: mean.trimmed().into_iter().map(to_f64).collect(),
        mean_pulses: to_f64(pulses(&mean)),
    })
}

/// Worst and average counts of one primitive.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimitiveCounts {
    pub name: String,
    pub worst: CostVector,
    pub average: CostVector,
}

fn aggregate(name: &str, vs: Vec<CostVector>) -> PrimitiveCounts {
    PrimitiveCounts { name: name.to_string(), worst: CostVector::worst(&vs), average: CostVector::mean(&vs) }
}

fn bit_pairs() -> [(bool, bool); 4] {
    [(false, false), (false, true), (true, false), (true, true)]
}

/// Worst/average counts of the adder cells and the `k`-bit comparator,
/// enumerated over their classical bits using the builders.
pub fn primitive_count_table(k: u32) -> Result<Vec<PrimitiveCounts>, CostError> {
    let mut rows = Vec::new();
    let muxfa = [
        ("MUXFA'", MuxForm::Prime, 0),
        ("MUXFA[1]", MuxForm::Plain, 1),
        ("MUXFA[2]", MuxForm::Plain, 2),
        ("MUXFA''", MuxForm::DoublePrime, 1),
        ("MUXFA'''", MuxForm::TriplePrime, 1),
        ("MUXFA''''", MuxForm::QuadPrime, 2),
    ];
    for (name, form, en) in muxfa {
        let vs: Result<Vec<_>, ArithError> =
            bit_pairs().iter().map(|&(a0, a1)| build_muxfa(form, a0, a1, en).map(|c| count_gates(&c))).collect();
        rows.push(aggregate(name, vs?));
    }
    let muxha = [
        ("MUXHA[1]", 1, MachineModel::ENHANCED),
        ("MUXHA[2]", 2, MachineModel::ENHANCED),
        ("MUXHA[2] basic", 2, MachineModel::BASIC),
    ];
    for (name, en, m) in muxha {
        let vs: Result<Vec<_>, ArithError> =
            bit_pairs().iter().map(|&(a0, a1)| build_muxha(a0, a1, en, m).map(|c| count_gates(&c))).collect();
        rows.push(aggregate(name, vs?));
    }
    if !(2..=16).contains(&k) {
        return Err(CostError::BadParams(format!("comparator width {k} outside 2..=16")));
    }
    let vs: Result<Vec<_>, ArithError> = (0..1u64 << k).map(|a| build_lt(a, k).map(|c| count_gates(&c))).collect();
    rows.push(aggregate("LT", vs?));
    Ok(rows)
}

/// Richardson extrapolation `(K₂·c₂ − K₁·c₁)/(K₂ − K₁)` of a quantity with a
/// `1/K` correction, measured at widths `k1 < k2`.
pub fn richardson(k1: u32, c1: f64, k2: u32, c2: f64) -> f64 {
    (k2 as f64 * c2 - k1 as f64 * c1) / (k2 as f64 - k1 as f64)
}
