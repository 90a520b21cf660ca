#![allow(dead_code)]

use qfn_core::ir::{Circuit, Register};
use qfn_core::sim::{read_register, run_compiled, BasisProgram, BasisState, SimError};

/// A circuit compiled once and run on register-valued inputs.
pub struct Harness {
    pub circuit: Circuit,
    prog: BasisProgram,
    exit: Vec<Register>,
}

/// Register values of one run, read in the circuit's final layout.
pub struct Outcome {
    pub state: BasisState,
    exit: Vec<Register>,
}

impl Outcome {
    pub fn get(&self, name: &str) -> u64 {
        read_register(&self.exit, name, &self.state).unwrap_or_else(|| panic!("no register {name:?}"))
    }

    pub fn try_get(&self, name: &str) -> Option<u64> {
        read_register(&self.exit, name, &self.state)
    }

    /// Whether every qubit outside the named registers reads zero.
    pub fn clean_except(&self, keep: &[&str]) -> bool {
        let kept: Vec<_> = self.exit.iter().filter(|r| keep.contains(&r.name.as_str())).flat_map(|r| r.qubits.iter().copied()).collect();
        (0..self.state.width())
            .map(qfn_core::ir::QubitId)
            .filter(|q| !kept.contains(q))
            .all(|q| !self.state.get(q))
    }
}

impl Harness {
    pub fn new(circuit: Circuit) -> Self {
        let prog = BasisProgram::compile(&circuit).expect("gate-only circuit");
        let exit = circuit.final_layout();
        Harness { circuit, prog, exit }
    }

    pub fn try_run(&self, inputs: &[(&str, u64)], checks: bool) -> Result<Outcome, SimError> {
        let mut s = BasisState::zeros(self.circuit.qubit_count());
        for &(name, v) in inputs {
            let r = self.circuit.register(name).unwrap_or_else(|| panic!("no register {name:?}"));
            s.write(&r.qubits, v);
        }
        let state = run_compiled(&self.circuit, &self.prog, &s, checks)?;
        Ok(Outcome { state, exit: self.exit.clone() })
    }

    /// Runs with contract checks on.
    pub fn run(&self, inputs: &[(&str, u64)]) -> Outcome {
        self.try_run(inputs, true).unwrap_or_else(|e| panic!("inputs {inputs:?}: {e}"))
    }
}

/// All-ones value of an enable register with `n` qubits.
pub fn ones(n: usize) -> u64 {
    (1u64 << n) - 1
}
