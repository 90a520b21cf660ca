//! End-to-end demonstrations: lookup-table exponentiation for `N = 15`, the
//! `a mod 2^K` transform test, and classical order and factor extraction.

use crate::arith::{build_expn, mod_pow, ArithError, ModulusContext, NetworkConfig};
use crate::ir::{Circuit, ControlSpec, Gate, Instruction, IrError, PhaseGate, QubitId, Register, RotationKind};
use crate::sim::{bit_reverse, distribution, qft_instructions, run_statevector, sample, MeasurementDistribution};
use crate::sim::{QftKind, SimError, StateVector};
use num_integer::Integer;
use std::fmt;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ShorError {
    #[error("{x} is not a unit modulo 15")]
    BadBase { x: u64 },
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Ir(#[from] IrError),
}

/// `x^a mod 15` for the four 2-bit exponents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LookupTable15 {
    pub x: u64,
    pub rows: [u64; 4],
}

impl LookupTable15 {
    pub fn new(x: u64) -> Result<Self, ShorError> {
        if x == 0 || x >= 15 || x.gcd(&15) != 1 {
            return Err(ShorError::BadBase { x });
        }
        Ok(LookupTable15 { x, rows: [0, 1, 2, 3].map(|a| mod_pow(x, a, 15)) })
    }
}

/// How the lookup circuit reaches the rows of the table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LookupStyle {
    /// Toggles the exponent bits to visit rows, then restores them.
    Standard,
    /// As `Standard` without the final restoring toggle; the exponent
    /// register is left XORed with [`lookup_input_mask`].
    DropFinalNot,
    /// Negative-polarity controls select each row directly.
    CustomGates,
}

impl fmt::Display for LookupStyle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LookupStyle::Standard => "standard",
            LookupStyle::DropFinalNot => "drop-final-not",
            LookupStyle::CustomGates => "custom",
        })
    }
}

impl std::str::FromStr for LookupStyle {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "standard" => Ok(LookupStyle::Standard),
            "drop-final-not" => Ok(LookupStyle::DropFinalNot),
            "custom" => Ok(LookupStyle::CustomGates),
            _ => Err(format!("unknown lookup style {s:?} (expected standard, drop-final-not or custom)")),
        }
    }
}

/// Order in which the toggling styles visit rows: each step flips one
/// exponent bit, starting from row 3.
const GRAY_ROWS: [u64; 4] = [3, 2, 0, 1];

/// Column `j` of the table as a 4-bit row mask (bit `a` = output bit `j` on row `a`).
fn column(t: &LookupTable15, j: usize) -> u8 {
    (0..4).fold(0u8, |m, a| m | ((((t.rows[a] >> j) & 1) as u8) << a))
}

struct Plan {
    /// Output bits set by a bare NOT.
    base: Vec<usize>,
    /// `(output bit, exponent bit)` CNOTs.
    cnots: Vec<(usize, usize)>,
    /// `(row, output bit)`: flip the output bit on that row only.
    row_flips: Vec<(u64, usize)>,
}

fn plan(t: &LookupTable15) -> Plan {
    let mut p = Plan { base: Vec::new(), cnots: Vec::new(), row_flips: Vec::new() };
    for j in 0..4 {
        let col = column(t, j);
        let ones = col.count_ones();
        let complement = col & 1 == 1;
        let lin = if complement { !col & 0xF } else { col };
        match ones {
            0 => {}
            4 => p.base.push(j),
            1 => p.row_flips.push((col.trailing_zeros() as u64, j)),
            3 => {
                p.base.push(j);
                p.row_flips.push(((!col & 0xF).trailing_zeros() as u64, j));
            }
            _ => {
                // Two ones: an affine function of the exponent bits.
                if complement {
                    p.base.push(j);
                }
                match lin {
                    0b1010 => p.cnots.push((j, 0)),
                    0b1100 => p.cnots.push((j, 1)),
                    0b0110 => {
                        p.cnots.push((j, 0));
                        p.cnots.push((j, 1));
                    }
                    _ => unreachable!("two-row column {lin:#06b} is affine"),
                }
            }
        }
    }
    p
}

/// Exponent bits left toggled by the circuit of [`build_expn15`].
pub fn lookup_input_mask(x: u64, style: LookupStyle) -> Result<u64, ShorError> {
    let t = LookupTable15::new(x)?;
    if style != LookupStyle::DropFinalNot {
        return Ok(0);
    }
    let p = plan(&t);
    let last = GRAY_ROWS.iter().rev().find(|r| p.row_flips.iter().any(|(q, _)| q == *r));
    Ok(last.map_or(0, |r| 3 ^ r))
}

/// Lookup circuit `|a⟩|0⟩ ↦ |a⟩|x^a mod 15⟩` on `alpha` (2 qubits) and `beta`
/// (4 qubits), with no scratch.
pub fn build_expn15(x: u64, style: LookupStyle) -> Result<Circuit, ShorError> {
    let t = LookupTable15::new(x)?;
    let p = plan(&t);
    let alpha = [QubitId(0), QubitId(1)];
    let beta = [QubitId(2), QubitId(3), QubitId(4), QubitId(5)];
    let mut ops = Vec::new();
    let mut gate = |ctl: Vec<ControlSpec>, target: QubitId| -> Result<(), IrError> {
        ops.push(Instruction::Gate(Gate::new(ctl, target)?));
        Ok(())
    };
    for &j in &p.base {
        gate(vec![], beta[j])?;
    }
    for &(j, i) in &p.cnots {
        gate(vec![ControlSpec::pos(alpha[i])], beta[j])?;
    }
    match style {
        LookupStyle::CustomGates => {
            let mut flips = p.row_flips.clone();
            flips.sort_by_key(|(r, _)| GRAY_ROWS.iter().position(|g| g == r));
            for (row, j) in flips {
                let ctl = (0..2)
                    .map(|i| {
                        let q = alpha[i];
                        if (row >> i) & 1 == 1 {
                            ControlSpec::pos(q)
                        } else {
                            ControlSpec::neg(q)
                        }
                    })
                    .collect();
                gate(ctl, beta[j])?;
            }
        }
        LookupStyle::Standard | LookupStyle::DropFinalNot => {
            let mut toggled = 0u64;
            for &row in GRAY_ROWS.iter().filter(|r| p.row_flips.iter().any(|(q, _)| q == *r)) {
                let diff = toggled ^ 3 ^ row;
                for (i, &q) in alpha.iter().enumerate().take(2) {
                    if (diff >> i) & 1 == 1 {
                        gate(vec![], q)?;
                    }
                }
                toggled ^= diff;
                for &(_, j) in p.row_flips.iter().filter(|(r, _)| *r == row) {
                    gate(vec![ControlSpec::pos(alpha[0]), ControlSpec::pos(alpha[1])], beta[j])?;
                }
            }
            if style == LookupStyle::Standard {
                for (i, &q) in alpha.iter().enumerate().take(2) {
                    if (toggled >> i) & 1 == 1 {
                        gate(vec![], q)?;
                    }
                }
            }
        }
    }
    let regs = vec![Register::new("alpha", alpha.to_vec()), Register::new("beta", beta.to_vec())];
    Ok(Circuit::new(6, regs, ops)?)
}

/// `|a⟩|0⟩ ↦ |a⟩|a mod 2^K⟩`: `K` CNOTs from `alpha` (L qubits) to `beta` (K qubits).
pub fn build_mod2k(l: u32, k: u32) -> Result<Circuit, ShorError> {
    if k == 0 || k > l {
        return Err(ShorError::BadParams(format!("need 1 ≤ K ≤ L, got K = {k}, L = {l}")));
    }
    let alpha: Vec<QubitId> = (0..l).map(QubitId).collect();
    let beta: Vec<QubitId> = (l..l + k).map(QubitId).collect();
    let ops = (0..k as usize)
        .map(|i| Gate::cnot(alpha[i], beta[i]).map(Instruction::Gate))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Circuit::new(l + k, vec![Register::new("alpha", alpha), Register::new("beta", beta)], ops)?)
}

/// The transform test: uniform preparation of `alpha`, the `a mod 2^K` copy,
/// then the transform on `alpha`.
pub fn mod2k_test_circuit(l: u32, k: u32, kind: QftKind) -> Result<Circuit, ShorError> {
    let f = build_mod2k(l, k)?;
    let alpha = f.register("alpha").expect("exponent register").qubits.clone();
    let mut ops: Vec<Instruction> = alpha
        .iter()
        .map(|&q| Instruction::Phase(PhaseGate::Rotation { qubit: q, kind: RotationKind::Hat }))
        .collect();
    ops.extend(f.ops().iter().cloned());
    ops.extend(qft_instructions(&alpha, kind, None).into_iter().map(Instruction::Phase));
    Ok(Circuit::new(f.qubit_count(), f.registers().to_vec(), ops)?)
}

/// Outcome of continued-fraction order extraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrderResult {
    pub candidate_r: u64,
    pub numerator: u64,
    pub success: bool,
}

/// Last continued-fraction convergent `p/q` of `y/2^l` with `q < bound`.
/// `y = 0` gives no candidate.
pub fn extract_order(y: u64, l: u32, bound: u64) -> OrderResult {
    let fail = OrderResult { candidate_r: 0, numerator: 0, success: false };
    if y == 0 || l == 0 || l > 63 || y >> l != 0 {
        return fail;
    }
    let (mut num, mut den) = (y as u128, 1u128 << l);
    // Convergent recursion h_n = a_n h_{n-1} + h_{n-2}, likewise k_n.
    let (mut h_prev, mut h) = (0u128, 1u128);
    let (mut k_prev, mut k) = (1u128, 0u128);
    let mut best = fail;
    while den != 0 {
        let a = num / den;
        (num, den) = (den, num % den);
        (h_prev, h) = (h, a * h + h_prev);
        (k_prev, k) = (k, a * k + k_prev);
        if k >= bound as u128 {
            break;
        }
        if h > 0 {
            best = OrderResult { candidate_r: k as u64, numerator: h as u64, success: true };
        }
    }
    best
}

/// Why an order does not yield factors.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorFailure {
    OddOrder,
    /// `x^(r/2) ≡ −1 (mod N)`.
    SquareRootIsMinusOne,
    /// A gcd came out as 1 or `N`.
    TrivialFactor,
}

impl fmt::Display for FactorFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FactorFailure::OddOrder => "odd order",
            FactorFailure::SquareRootIsMinusOne => "square root is -1",
            FactorFailure::TrivialFactor => "trivial factor",
        })
    }
}

/// Factors `gcd(x^(r/2) − 1, N)` and `gcd(x^(r/2) + 1, N)`.
pub fn factor_from_order(x: u64, r: u64, n: u64) -> Result<(u64, u64), FactorFailure> {
    if r == 0 || r % 2 == 1 {
        return Err(FactorFailure::OddOrder);
    }
    let h = mod_pow(x, r / 2, n);
    if h == n - 1 {
        return Err(FactorFailure::SquareRootIsMinusOne);
    }
    let f1 = (h + n - 1) % n;
    let (p, q) = (f1.gcd(&n), (h + 1).gcd(&n));
    if p == 1 || p == n || q == 1 || q == n {
        return Err(FactorFailure::TrivialFactor);
    }
    Ok((p, q))
}

/// Source of the exponentiation stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpnSource {
    /// Lookup circuit for `N = 15` (`L = 2`).
    Lookup(LookupStyle),
    /// General network.
    General(NetworkConfig),
}

/// One sampled measurement.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trial {
    pub y: u64,
    pub order: OrderResult,
    /// `x^r ≡ 1` for the candidate.
    pub verified: bool,
    pub factors: Option<(u64, u64)>,
}

/// Result of [`run_factoring_experiment`].
#[derive(Clone, Debug, PartialEq)]
pub struct FactoringReport {
    pub n: u64,
    pub x: u64,
    pub l: u32,
    pub ft_width: u32,
    pub seed: u64,
    /// Exact law of `y`.
    pub distribution: MeasurementDistribution,
    pub trials: Vec<Trial>,
    /// Pulses of preparation, exponentiation and transform.
    pub pulses: u64,
}

impl FactoringReport {
    pub fn success_rate(&self) -> f64 {
        if self.trials.is_empty() {
            return 0.0;
        }
        self.trials.iter().filter(|t| t.factors.is_some()).count() as f64 / self.trials.len() as f64
    }
}

/// Full circuit: uniform preparation of `ft_width` exponent qubits,
/// exponentiation on the low `l` of them, transform on all of them. Returns
/// the circuit and the exponent qubits.
pub fn factoring_circuit(
    n: u64,
    x: u64,
    l: u32,
    ft_width: u32,
    source: ExpnSource,
) -> Result<(Circuit, Vec<QubitId>), ShorError> {
    if ft_width < l {
        return Err(ShorError::BadParams(format!("transform width {ft_width} below exponent width {l}")));
    }
    let expn = match source {
        ExpnSource::Lookup(style) => {
            if n != 15 || l != 2 {
                return Err(ShorError::BadParams("lookup circuits need N = 15 and L = 2".into()));
            }
            build_expn15(x, style)?
        }
        ExpnSource::General(cfg) => build_expn(x, ModulusContext::new(n)?, l, &cfg)?,
    };
    let base = expn.qubit_count();
    let mut alpha = expn.register("alpha").expect("exponent register").qubits.clone();
    let extra: Vec<QubitId> = (base..base + ft_width - l).map(QubitId).collect();
    alpha.extend_from_slice(&extra);
    let mut regs = expn.registers().to_vec();
    if !extra.is_empty() {
        regs.push(Register::new("alpha_high", extra));
    }
    let mut ops: Vec<Instruction> = alpha
        .iter()
        .map(|&q| Instruction::Phase(PhaseGate::Rotation { qubit: q, kind: RotationKind::Hat }))
        .collect();
    ops.extend(expn.ops().iter().cloned());
    ops.extend(qft_instructions(&alpha, QftKind::Hat, None).into_iter().map(Instruction::Phase));
    Ok((Circuit::new(base + ft_width - l, regs, ops)?, alpha))
}

/// Law of `y` (transform output, bit order restored) for the full circuit.
pub fn measurement_law(c: &Circuit, alpha: &[QubitId]) -> Result<MeasurementDistribution, ShorError> {
    let psi = run_statevector(c, &StateVector::basis(c.qubit_count(), 0)?)?;
    let d = distribution(&psi, &Register::new("y", alpha.to_vec()))?;
    Ok(d.bit_reversed())
}

/// Prepares, exponentiates, transforms and samples `trials` values of `y`,
/// then extracts orders (denominators below `N`) and factors.
pub fn run_factoring_experiment(
    n: u64,
    x: u64,
    l: u32,
    ft_width: u32,
    source: ExpnSource,
    seed: u64,
    trials: usize,
) -> Result<FactoringReport, ShorError> {
    let (c, alpha) = factoring_circuit(n, x, l, ft_width, source)?;
    let law = measurement_law(&c, &alpha)?;
    let trials = sample(&law, seed, trials)
        .into_iter()
        .map(|y| {
            let order = extract_order(y, ft_width, n);
            let verified = order.success && mod_pow(x, order.candidate_r, n) == 1;
            let factors = if verified { factor_from_order(x, order.candidate_r, n).ok() } else { None };
            Trial { y, order, verified, factors }
        })
        .collect();
    Ok(FactoringReport {
        n,
        x,
        l,
        ft_width,
        seed,
        distribution: law,
        trials,
        pulses: crate::machine::total_pulses(&c),
    })
}

/// Bit pattern of `y` as measured on the exponent register (before the bit
/// order is restored).
pub fn measured_pattern(y: u64, width: u32) -> u64 {
    bit_reverse(y, width)
}
