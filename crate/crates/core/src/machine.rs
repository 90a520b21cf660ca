//! Target machines, gate-set compliance and the pulse cost model.

use crate::ir::{Circuit, Instruction, PhaseGate};
use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Mul};

/// Machine gate-set families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MachineKind {
    /// Controlled^k-NOT for k ≤ 2.
    Basic,
    /// Controlled^k-NOT for k ≤ 4.
    Enhanced,
    /// No arity cap.
    Unrestricted,
}

/// A machine: gate-set constraint plus the pulse cost function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MachineModel {
    pub kind: MachineKind,
}

impl MachineModel {
    pub const BASIC: MachineModel = MachineModel { kind: MachineKind::Basic };
    pub const ENHANCED: MachineModel = MachineModel { kind: MachineKind::Enhanced };
    pub const UNRESTRICTED: MachineModel = MachineModel { kind: MachineKind::Unrestricted };

    /// Largest admitted control count (`usize::MAX` when uncapped).
    pub fn max_control_arity(self) -> usize {
        match self.kind {
            MachineKind::Basic => 2,
            MachineKind::Enhanced => 4,
            MachineKind::Unrestricted => usize::MAX,
        }
    }

    pub fn admits_arity(self, k: usize) -> bool {
        k <= self.max_control_arity()
    }
}

/// A gate whose arity the machine does not admit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Violation {
    pub op_index: usize,
    pub arity: usize,
}

/// Checks every gate against the machine's arity cap; phase gates always pass.
pub fn validate(c: &Circuit, m: MachineModel) -> Result<(), Vec<Violation>> {
    let violations: Vec<Violation> = c
        .ops()
        .iter()
        .enumerate()
        .filter_map(|(i, op)| match op {
            Instruction::Gate(g) if !m.admits_arity(g.arity()) => Some(Violation { op_index: i, arity: g.arity() }),
            _ => None,
        })
        .collect();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Pulses for one controlled^k-NOT: 1 for k = 0, otherwise 2k + 3.
pub fn gate_pulses(k: usize) -> u64 {
    if k == 0 {
        1
    } else {
        2 * k as u64 + 3
    }
}

/// Pulses for a rotation.
pub const ROTATION_PULSES: u64 = 1;
/// Pulses for a two-qubit conditional phase.
pub const CONDITIONAL_PHASE_PULSES: u64 = 4;

/// Gate counts indexed by control arity; entries are exact rationals so that
/// averages stay exact. Trailing zeros are not significant.
#[derive(Clone, Debug, Default)]
pub struct CostVector {
    counts: Vec<Rational64>,
}

impl CostVector {
    pub fn zero() -> Self {
        CostVector { counts: Vec::new() }
    }

    pub fn from_integers(counts: &[i64]) -> Self {
        CostVector { counts: counts.iter().map(|&c| Rational64::from_integer(c)).collect() }
    }

    pub fn from_rationals(counts: Vec<Rational64>) -> Self {
        CostVector { counts }
    }

    /// Entry for arity `k` (zero beyond the stored length).
    pub fn get(&self, k: usize) -> Rational64 {
        self.counts.get(k).copied().unwrap_or_else(Rational64::zero)
    }

    /// Number of stored entries.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(Zero::is_zero)
    }

    /// Entries padded or truncated to `n` arities.
    pub fn padded(&self, n: usize) -> Vec<Rational64> {
        (0..n).map(|k| self.get(k)).collect()
    }

    /// Stored entries with trailing zeros removed.
    pub fn trimmed(&self) -> Vec<Rational64> {
        let mut v = self.counts.clone();
        while v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        v
    }

    pub fn add_at(&mut self, k: usize, amount: Rational64) {
        if self.counts.len() <= k {
            self.counts.resize(k + 1, Rational64::zero());
        }
        self.counts[k] += amount;
    }

    /// Entrywise maximum.
    pub fn max(&self, other: &CostVector) -> CostVector {
        let n = self.len().max(other.len());
        CostVector { counts: (0..n).map(|k| self.get(k).max(other.get(k))).collect() }
    }

    /// Entrywise mean of a non-empty collection.
    pub fn mean<'a>(items: impl IntoIterator<Item = &'a CostVector>) -> CostVector {
        let mut total = CostVector::zero();
        let mut n = 0i64;
        for v in items {
            total += v;
            n += 1;
        }
        assert!(n > 0, "mean of an empty collection");
        total * Rational64::new(1, n)
    }

    /// Entrywise maximum of a non-empty collection.
    pub fn worst<'a>(items: impl IntoIterator<Item = &'a CostVector>) -> CostVector {
        items.into_iter().fold(CostVector::zero(), |acc, v| acc.max(v))
    }

    /// Whether every entry of `self` is at least the matching entry of `other`.
    pub fn dominates(&self, other: &CostVector) -> bool {
        let n = self.len().max(other.len());
        (0..n).all(|k| self.get(k) >= other.get(k))
    }
}

impl PartialEq for CostVector {
    fn eq(&self, other: &Self) -> bool {
        self.trimmed() == other.trimmed()
    }
}

impl Eq for CostVector {}

impl AddAssign<&CostVector> for CostVector {
    fn add_assign(&mut self, rhs: &CostVector) {
        for (k, v) in rhs.counts.iter().enumerate() {
            self.add_at(k, *v);
        }
    }
}

impl Add for &CostVector {
    type Output = CostVector;
    fn add(self, rhs: &CostVector) -> CostVector {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Mul<Rational64> for CostVector {
    type Output = CostVector;
    fn mul(self, rhs: Rational64) -> CostVector {
        CostVector { counts: self.counts.into_iter().map(|c| c * rhs).collect() }
    }
}

impl fmt::Display for CostVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.trimmed();
        write!(f, "[")?;
        for (i, c) in v.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// Pulse total `c0 + Σ_{k≥1} c_k (2k+3)`.
pub fn pulses(v: &CostVector) -> Rational64 {
    v.counts
        .iter()
        .enumerate()
        .map(|(k, c)| *c * Rational64::from_integer(gate_pulses(k) as i64))
        .fold(Rational64::zero(), |a, b| a + b)
}

/// Gate counts by arity; relabels and phase gates are not counted.
pub fn count_gates(c: &Circuit) -> CostVector {
    let mut tally: Vec<u64> = Vec::new();
    for g in c.gates() {
        let k = g.arity();
        if tally.len() <= k {
            tally.resize(k + 1, 0);
        }
        tally[k] += 1;
    }
    tally_to_vector(&tally)
}

pub(crate) fn tally_to_vector(tally: &[u64]) -> CostVector {
    CostVector { counts: tally.iter().map(|&c| Rational64::from_integer(c as i64)).collect() }
}

/// Pulses spent on rotations and conditional phases.
pub fn phase_pulses(c: &Circuit) -> u64 {
    c.ops()
        .iter()
        .map(|op| match op {
            Instruction::Phase(PhaseGate::Rotation { .. }) => ROTATION_PULSES,
            Instruction::Phase(PhaseGate::ConditionalPhase { .. }) => CONDITIONAL_PHASE_PULSES,
            _ => 0,
        })
        .sum()
}

/// All pulses of a concrete circuit: gates plus phase gates.
pub fn total_pulses(c: &Circuit) -> u64 {
    pulses(&count_gates(c)).to_integer() as u64 + phase_pulses(c)
}

/// Rational to `f64`, for reporting.
pub fn to_f64(r: Rational64) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
