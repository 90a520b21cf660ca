//! Circuit execution: basis-state simulation for gate-only circuits and a
//! dense state-vector simulator for circuits with rotations and phases.

mod basis;
mod qft;
mod statevector;

pub use basis::{
    check_contracts, lanes_read, lanes_write, read_register, run_basis, run_compiled, BasisProgram, BasisState, LaneProgram,
};
pub use qft::{bit_reverse, build_qft, prepare_uniform, qft_instructions, QftKind};
pub use statevector::{run_statevector, StateVector, MAX_STATEVECTOR_QUBITS};

use crate::ir::{ContractPoint, IrError, Predicate, Register};
use rand::distr::{weighted::WeightedIndex, Distribution};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Errors from simulation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("op {op} is a phase gate; basis simulation needs a gate-only circuit")]
    PhaseGate { op: usize },
    #[error("state has {state} qubits but the circuit has {circuit}")]
    WidthMismatch { circuit: u32, state: u32 },
    #[error("{qubits} qubits exceed the state-vector limit of {max}")]
    TooManyQubits { qubits: u32, max: u32 },
    #[error("{point:?} contract on {register:?} violated: {predicate:?} does not hold for {value}")]
    ContractViolation { point: ContractPoint, register: String, predicate: Predicate, value: u64 },
    #[error("invalid amplitudes: {0}")]
    BadAmplitudes(String),
    #[error("register must have at least one qubit")]
    EmptyRegister,
    #[error("register wider than 26 qubits cannot be tabulated")]
    RegisterTooWide,
    #[error("invalid reference parameters: {0}")]
    BadReference(String),
    #[error(transparent)]
    Ir(#[from] IrError),
}

/// Probabilities of the values of one register.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementDistribution {
    width: u32,
    probs: Vec<f64>,
}

impl MeasurementDistribution {
    /// Wraps probabilities indexed by register value; they must sum to 1
    /// within `1e-12`.
    pub fn new(probs: Vec<f64>) -> Result<Self, SimError> {
        if !probs.len().is_power_of_two() {
            return Err(SimError::BadAmplitudes(format!("length {} is not a power of two", probs.len())));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 || probs.iter().any(|p| *p < 0.0) {
            return Err(SimError::BadAmplitudes(format!("probabilities sum to {total}")));
        }
        Ok(MeasurementDistribution { width: probs.len().trailing_zeros(), probs })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, value: u64) -> f64 {
        self.probs.get(value as usize).copied().unwrap_or(0.0)
    }

    /// `(value, probability)` for the values with nonzero probability, ascending.
    pub fn support(&self, eps: f64) -> Vec<(u64, f64)> {
        self.probs.iter().enumerate().filter(|(_, p)| **p > eps).map(|(v, p)| (v as u64, *p)).collect()
    }

    /// The distribution of the register value with its bits reversed.
    pub fn bit_reversed(&self) -> MeasurementDistribution {
        let mut probs = vec![0.0; self.probs.len()];
        for (v, p) in self.probs.iter().enumerate() {
            probs[bit_reverse(v as u64, self.width) as usize] = *p;
        }
        MeasurementDistribution { width: self.width, probs }
    }
}

/// Marginal distribution of `register` in `psi`.
pub fn distribution(psi: &StateVector, register: &Register) -> Result<MeasurementDistribution, SimError> {
    if register.width() > MAX_STATEVECTOR_QUBITS as usize {
        return Err(SimError::RegisterTooWide);
    }
    if let Some(q) = register.qubits.iter().find(|q| q.0 >= psi.qubits()) {
        return Err(SimError::WidthMismatch { circuit: q.0 + 1, state: psi.qubits() });
    }
    let mut probs = vec![0.0; 1usize << register.width()];
    for (i, a) in psi.amplitudes().iter().enumerate() {
        let v = register.qubits.iter().enumerate().fold(0usize, |acc, (b, q)| acc | (((i >> q.index()) & 1) << b));
        probs[v] += a.norm_sqr();
    }
    Ok(MeasurementDistribution { width: register.width() as u32, probs })
}

/// `count` independent samples from `d`, deterministic in `seed`.
pub fn sample(d: &MeasurementDistribution, seed: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = WeightedIndex::new(&d.probs).expect("distribution has positive mass");
    (0..count).map(|_| dist.sample(&mut rng) as u64).collect()
}

/// Count of `j ≥ 0` with `offset + r·j < 2^l`.
fn periodic_count(l: u32, r: u64, offset: u64) -> u64 {
    ((1u64 << l) - offset).div_ceil(r)
}

/// Measurement law after the transform of the periodic state
/// `Σ_j |offset + r·j⟩` (normalised), for `0 ≤ offset < r ≤ 2^l`.
pub fn ft_reference_prob(l: u32, r: u64, offset: u64) -> Result<MeasurementDistribution, SimError> {
    if l == 0 || l > MAX_STATEVECTOR_QUBITS {
        return Err(SimError::BadReference(format!("width {l}")));
    }
    if r == 0 || r > 1u64 << l || offset >= r {
        return Err(SimError::BadReference(format!("period {r}, offset {offset}")));
    }
    let q = 1u64 << l;
    let n = periodic_count(l, r, offset);
    let probs = (0..q)
        .map(|y| {
            let phase = 2.0 * PI * ((y * r) % q) as f64 / q as f64;
            let (mut re, mut im) = (0.0, 0.0);
            for j in 0..n {
                let t = phase * j as f64;
                re += t.cos();
                im += t.sin();
            }
            (re * re + im * im) / (n as f64 * q as f64)
        })
        .collect();
    Ok(MeasurementDistribution { width: l, probs })
}

/// Equal mixture of [`ft_reference_prob`] over all offsets `0..r`.
pub fn ft_reference_mixture(l: u32, r: u64) -> Result<MeasurementDistribution, SimError> {
    let mut probs = vec![0.0; 1usize << l];
    for k in 0..r {
        for (acc, p) in probs.iter_mut().zip(ft_reference_prob(l, r, k)?.probs) {
            *acc += p / r as f64;
        }
    }
    Ok(MeasurementDistribution { width: l, probs })
}
