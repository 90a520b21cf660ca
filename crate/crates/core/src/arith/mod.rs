//! Reversible arithmetic networks for modular exponentiation.
//!
//! Every builder returns a [`Circuit`](crate::ir::Circuit) over a named
//! register layout. The `emit_*` functions are the underlying generators that
//! write into a shared emitter on caller-chosen physical qubits; they are
//! reused by the composite networks.

mod adders;
mod classical;
mod compare;
mod expn;
mod modular;
mod multiply;

pub use adders::{build_fa, build_madd, build_muxfa, build_muxha};
pub use classical::{classical_precompute, doubling_table, mod_inverse, mod_mul, mod_pow, Precomputed};
pub use compare::{build_lt, build_xlt, lt_mask};
pub use expn::{build_expn, count_expn, register_plan, RegisterPlan};
pub use modular::{build_addn, build_oaddn};
pub use multiply::{build_emul, build_muln, build_omuln, build_xor};

pub(crate) use adders::emit_madd;
pub(crate) use compare::{emit_lt, LtPart};
pub(crate) use multiply::{emit_emul, emit_xor};

use crate::ir::{IrError, QubitId};
use crate::machine::MachineModel;
use std::fmt;
use std::str::FromStr;

/// Errors from network construction.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ArithError {
    #[error("modulus {n} does not fit width {k} (need 2^(K-1) <= N < 2^K, K >= 2)")]
    BadModulus { n: u64, k: u32 },
    #[error("{x} has no inverse modulo {n}")]
    NotInvertible { x: u64, n: u64 },
    #[error("classical operand {value} out of range (must be below {bound})")]
    OperandOutOfRange { value: u64, bound: u64 },
    #[error("input width must be at least 1")]
    EmptyInput,
    #[error("width {0} is not supported")]
    BadWidth(u32),
    #[error("{0}")]
    FormMismatch(String),
    #[error(transparent)]
    Ir(#[from] IrError),
}

/// Classical modulus with its bit width.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModulusContext {
    n: u64,
    k: u32,
}

impl ModulusContext {
    /// Context for `n` with `K` = bit length of `n`.
    pub fn new(n: u64) -> Result<Self, ArithError> {
        let k = 64 - n.leading_zeros();
        Self::with_width(n, k)
    }

    /// Context for `n` at an explicit width; requires `2^(K-1) ≤ n < 2^K`, `2 ≤ K ≤ 62`.
    pub fn with_width(n: u64, k: u32) -> Result<Self, ArithError> {
        if !(2..=62).contains(&k) || n < (1u64 << (k - 1)) || n >= (1u64 << k) {
            return Err(ArithError::BadModulus { n, k });
        }
        Ok(ModulusContext { n, k })
    }

    pub fn n(self) -> u64 {
        self.n
    }

    pub fn k(self) -> u32 {
        self.k
    }

    /// `2^K`.
    pub fn pow2k(self) -> u64 {
        1u64 << self.k
    }

    pub(crate) fn check_operand(self, a: u64) -> Result<(), ArithError> {
        if a >= self.n {
            return Err(ArithError::OperandOutOfRange { value: a, bound: self.n });
        }
        Ok(())
    }
}

/// Scratch/machine configurations of the exponentiation network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    /// Enhanced machine, 2K+1 scratch qubits.
    E2K1,
    /// Enhanced machine, 2K+2 scratch qubits (enable AND line).
    E2K2,
    /// Basic machine, 2K+3 scratch qubits (enable AND line plus adder scratch line).
    B2K3,
    /// Basic machine, 2K+2 scratch qubits.
    B2K2,
    /// Basic machine, 2K+1 scratch qubits.
    B2K1,
    /// Enhanced machine, 3K+1 scratch qubits (comparator scratch kept across the adder).
    S3K1,
    /// Unrestricted gate set, K+1 scratch qubits (left-to-right adders).
    MinSpace,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::E2K1,
        Variant::E2K2,
        Variant::B2K3,
        Variant::B2K2,
        Variant::B2K1,
        Variant::S3K1,
        Variant::MinSpace,
    ];

    /// The five configurations of the summary table.
    pub const TABLED: [Variant; 5] = [Variant::E2K1, Variant::E2K2, Variant::B2K3, Variant::B2K2, Variant::B2K1];

    /// Machine the variant targets.
    pub fn machine(self) -> MachineModel {
        match self {
            Variant::E2K1 | Variant::E2K2 | Variant::S3K1 => MachineModel::ENHANCED,
            Variant::B2K3 | Variant::B2K2 | Variant::B2K1 => MachineModel::BASIC,
            Variant::MinSpace => MachineModel::UNRESTRICTED,
        }
    }

    /// Scratch qubits beyond the input and result registers.
    pub fn scratch_qubits(self, k: u32) -> u32 {
        match self {
            Variant::E2K1 | Variant::B2K1 => 2 * k + 1,
            Variant::E2K2 | Variant::B2K2 => 2 * k + 2,
            Variant::B2K3 => 2 * k + 3,
            Variant::S3K1 => 3 * k + 1,
            Variant::MinSpace => k + 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::E2K1 => "e2k1",
            Variant::E2K2 => "e2k2",
            Variant::B2K3 => "b2k3",
            Variant::B2K2 => "b2k2",
            Variant::B2K1 => "b2k1",
            Variant::S3K1 => "s3k1",
            Variant::MinSpace => "min-k1",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown variant {s:?} (expected one of e2k1, e2k2, b2k3, b2k2, b2k1, s3k1, min-k1)"))
    }
}

/// Variant plus machine and the first-multiplication shortcut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct NetworkConfig {
    pub machine: MachineModel,
    pub variant: Variant,
    /// Replace the first controlled multiplication by a controlled copy of `x`.
    pub first_mul_optimized: bool,
}

impl NetworkConfig {
    /// The variant on its own machine with the first-multiplication shortcut.
    pub fn new(variant: Variant) -> Self {
        NetworkConfig { machine: variant.machine(), variant, first_mul_optimized: true }
    }

    /// Checks that the machine matches the variant.
    pub fn validate(&self) -> Result<(), ArithError> {
        if self.machine != self.variant.machine() {
            return Err(ArithError::FormMismatch(format!(
                "variant {} requires the {:?} machine",
                self.variant,
                self.variant.machine().kind
            )));
        }
        Ok(())
    }
}

/// Multiplexed full-adder constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MuxForm {
    /// No enable bits.
    Prime,
    /// Enable bits folded into the control strings.
    Plain,
    /// One enable bit, basic machine, one extra scratch line.
    DoublePrime,
    /// One enable bit, basic machine, triple-control gates split with a borrowed bit.
    TriplePrime,
    /// Two enable bits, basic machine, all wide gates split with borrowed bits.
    QuadPrime,
}

/// Gate-emission style derived from a variant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Style {
    pub max_arity: usize,
    /// Use the scratch-line multiplexed full adder.
    pub double_prime: bool,
    /// Combine the two enables of each modular addition into one line.
    pub and_line: bool,
    /// Keep comparator scratch alive across the multiplexed adder.
    pub deferred: bool,
}

impl Style {
    pub const UNRESTRICTED: Style =
        Style { max_arity: usize::MAX, double_prime: false, and_line: false, deferred: false };

    pub fn for_variant(v: Variant) -> Style {
        let max_arity = v.machine().max_control_arity();
        let base = Style { max_arity, ..Style::UNRESTRICTED };
        match v {
            Variant::E2K1 | Variant::B2K1 | Variant::MinSpace => base,
            Variant::E2K2 | Variant::B2K2 => Style { and_line: true, ..base },
            Variant::B2K3 => Style { and_line: true, double_prime: true, ..base },
            Variant::S3K1 => Style { and_line: true, deferred: true, ..base },
        }
    }
}

/// Single-qubit scratch lines used by the modular adders.
#[derive(Clone, Debug)]
pub(crate) struct Lines {
    pub select: QubitId,
    pub and: Option<QubitId>,
    pub aux: Option<QubitId>,
    /// Comparator scratch (deferred style only).
    pub switch: Vec<QubitId>,
}

/// Consecutive qubit ids `start..start+len`.
pub(crate) fn qubits(start: u32, len: u32) -> Vec<QubitId> {
    (start..start + len).map(QubitId).collect()
}

#[inline]
pub(crate) fn bit(v: u64, i: usize) -> bool {
    (v >> i) & 1 == 1
}

/// Requires `1 ≤ k ≤ 62` and `a < 2^k`.
pub(crate) fn check_operand_width(a: u64, k: u32) -> Result<(), ArithError> {
    if !(1..=62).contains(&k) {
        return Err(ArithError::BadWidth(k));
    }
    if a >> k != 0 {
        return Err(ArithError::OperandOutOfRange { value: a, bound: 1 << k });
    }
    Ok(())
}
