//! Dense state-vector simulation.

use super::SimError;
use crate::ir::{Circuit, Gate, Instruction, PhaseGate, RotationKind};
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

/// Largest qubit count accepted by the dense simulator.
pub const MAX_STATEVECTOR_QUBITS: u32 = 26;

/// Amplitudes over `2^n` basis states; index bit `i` is qubit `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: u32,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The basis state `|index⟩`.
    pub fn basis(n: u32, index: usize) -> Result<Self, SimError> {
        guard(n)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    /// Wraps amplitudes; their squared norm must be 1 within `1e-12`.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, SimError> {
        if !amps.len().is_power_of_two() {
            return Err(SimError::BadAmplitudes(format!("length {} is not a power of two", amps.len())));
        }
        let n = amps.len().trailing_zeros();
        guard(n)?;
        let s = StateVector { n, amps };
        if (s.norm_sqr() - 1.0).abs() > 1e-12 {
            return Err(SimError::BadAmplitudes(format!("squared norm {}", s.norm_sqr())));
        }
        Ok(s)
    }

    pub fn qubits(&self) -> u32 {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn apply_gate(&mut self, g: &Gate) {
        let (mut mask, mut want) = (0usize, 0usize);
        for c in g.controls() {
            let b = 1usize << c.qubit.index();
            mask |= b;
            if c.fires_on(true) {
                want |= b;
            }
        }
        let t = 1usize << g.target().index();
        for i in 0..self.amps.len() {
            if i & t == 0 && i & mask == want {
                self.amps.swap(i, i | t);
            }
        }
    }

    fn apply_phase(&mut self, p: &PhaseGate) {
        match *p {
            PhaseGate::Rotation { qubit, kind } => {
                let t = 1usize << qubit.index();
                let h = FRAC_1_SQRT_2;
                // Rows of the 2×2 matrix acting on (a0, a1).
                let m: [[f64; 2]; 2] = match kind {
                    RotationKind::Hat => [[h, h], [h, -h]],
                    RotationKind::Tilde => [[h, h], [-h, h]],
                    RotationKind::TildeInverse => [[h, -h], [h, h]],
                };
                for i in 0..self.amps.len() {
                    if i & t == 0 {
                        let (a0, a1) = (self.amps[i], self.amps[i | t]);
                        self.amps[i] = a0 * m[0][0] + a1 * m[0][1];
                        self.amps[i | t] = a0 * m[1][0] + a1 * m[1][1];
                    }
                }
            }
            PhaseGate::ConditionalPhase { a, b, theta } => {
                let mask = (1usize << a.index()) | (1usize << b.index());
                let z = Complex64::from_polar(1.0, theta.radians());
                for (i, amp) in self.amps.iter_mut().enumerate() {
                    if i & mask == mask {
                        *amp *= z;
                    }
                }
            }
        }
    }
}

fn guard(n: u32) -> Result<(), SimError> {
    if n > MAX_STATEVECTOR_QUBITS {
        return Err(SimError::TooManyQubits { qubits: n, max: MAX_STATEVECTOR_QUBITS });
    }
    Ok(())
}

/// Applies every instruction of `c` to `psi` as a unitary.
pub fn run_statevector(c: &Circuit, psi: &StateVector) -> Result<StateVector, SimError> {
    guard(c.qubit_count())?;
    if psi.n != c.qubit_count() {
        return Err(SimError::WidthMismatch { circuit: c.qubit_count(), state: psi.n });
    }
    let mut out = psi.clone();
    for op in c.ops() {
        match op {
            Instruction::Gate(g) => out.apply_gate(g),
            Instruction::Phase(p) => out.apply_phase(p),
            Instruction::Relabel(..) => {}
        }
    }
    Ok(out)
}
