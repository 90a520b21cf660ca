//! Circuit intermediate representation.
//!
//! A [`Circuit`] is an ordered stream of [`Instruction`]s over a fixed number of
//! qubits together with a named register layout. The first instruction acts
//! first. Bit 0 of every register is its least significant bit.

use smallvec::SmallVec;
use std::fmt;

mod text;

pub use text::{parse, serialize};

/// Index of a qubit within a circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitId(pub u32);

impl QubitId {
    /// Position of the qubit as a `usize`.
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for QubitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Value a control qubit must hold for the gate to fire.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    /// Fires when the control reads 1.
    Positive,
    /// Fires when the control reads 0.
    Negative,
}

impl Polarity {
    /// Polarity that fires on the given bit value.
    pub fn firing_on(bit: bool) -> Self {
        if bit {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }

    /// The opposite polarity.
    pub fn flipped(self) -> Self {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
        }
    }
}

/// A control qubit with its polarity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ControlSpec {
    pub qubit: QubitId,
    pub polarity: Polarity,
}

impl ControlSpec {
    /// Control that fires on 1.
    pub fn pos(qubit: QubitId) -> Self {
        ControlSpec { qubit, polarity: Polarity::Positive }
    }

    /// Control that fires on 0.
    pub fn neg(qubit: QubitId) -> Self {
        ControlSpec { qubit, polarity: Polarity::Negative }
    }

    /// Whether this control is satisfied by the given bit value.
    #[inline]
    pub fn fires_on(self, bit: bool) -> bool {
        bit == (self.polarity == Polarity::Positive)
    }
}

/// Inline capacity covers every gate the arithmetic networks emit on the enhanced machine.
pub type Controls = SmallVec<[ControlSpec; 4]>;

/// Controlled^k-NOT: flips `target` iff every control matches its polarity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gate {
    controls: Controls,
    target: QubitId,
}

impl Gate {
    /// Builds a gate, rejecting repeated controls or a control on the target.
    pub fn new(
        controls: impl IntoIterator<Item = ControlSpec>,
        target: QubitId,
    ) -> Result<Self, IrError> {
        let controls: Controls = controls.into_iter().collect();
        for (i, c) in controls.iter().enumerate() {
            if c.qubit == target {
                return Err(IrError::TargetIsControl { qubit: target.0 });
            }
            if controls[..i].iter().any(|d| d.qubit == c.qubit) {
                return Err(IrError::DuplicateControl { qubit: c.qubit.0 });
            }
        }
        Ok(Gate { controls, target })
    }

    /// Builder path for internally generated gates whose well-formedness is
    /// guaranteed by construction (and re-checked by [`Circuit::new`]).
    pub(crate) fn new_unchecked(controls: Controls, target: QubitId) -> Self {
        debug_assert!(Gate::new(controls.iter().copied(), target).is_ok());
        Gate { controls, target }
    }

    /// Uncontrolled NOT.
    pub fn not(target: QubitId) -> Self {
        Gate { controls: Controls::new(), target }
    }

    /// Controlled-NOT with a positive control.
    pub fn cnot(control: QubitId, target: QubitId) -> Result<Self, IrError> {
        Gate::new([ControlSpec::pos(control)], target)
    }

    /// Controlled^2-NOT with positive controls.
    pub fn toffoli(c1: QubitId, c2: QubitId, target: QubitId) -> Result<Self, IrError> {
        Gate::new([ControlSpec::pos(c1), ControlSpec::pos(c2)], target)
    }

    pub fn controls(&self) -> &[ControlSpec] {
        &self.controls
    }

    pub fn target(&self) -> QubitId {
        self.target
    }

    /// Number of controls.
    pub fn arity(&self) -> usize {
        self.controls.len()
    }

    fn max_qubit(&self) -> u32 {
        self.controls.iter().map(|c| c.qubit.0).fold(self.target.0, u32::max)
    }
}

/// Exact angle `num·π/den` with `den` a power of two, stored in lowest terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PhaseAngle {
    num: i64,
    den: u64,
}

impl PhaseAngle {
    /// Creates `num·π/den`; `den` must be a nonzero power of two.
    pub fn new(num: i64, den: u64) -> Result<Self, IrError> {
        if den == 0 || !den.is_power_of_two() {
            return Err(IrError::BadAngle { num, den });
        }
        let (mut num, mut den) = (num, den);
        while den > 1 && num % 2 == 0 {
            num /= 2;
            den /= 2;
        }
        Ok(PhaseAngle { num, den })
    }

    /// The angle `π/2^m`.
    pub fn pi_over_pow2(m: u32) -> Self {
        PhaseAngle { num: 1, den: 1u64 << m }
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    pub fn denominator(self) -> u64 {
        self.den
    }

    /// Angle in radians.
    pub fn radians(self) -> f64 {
        self.num as f64 * std::f64::consts::PI / self.den as f64
    }
}

impl std::ops::Neg for PhaseAngle {
    type Output = PhaseAngle;
    fn neg(self) -> PhaseAngle {
        PhaseAngle { num: -self.num, den: self.den }
    }
}

/// Single-qubit rotation flavour.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RotationKind {
    /// `[[1,1],[1,-1]]/√2` (self-inverse).
    Hat,
    /// Determinant-one rotation `[[1,1],[-1,1]]/√2` on the amplitude column.
    Tilde,
    /// Inverse of [`RotationKind::Tilde`], `[[1,-1],[1,1]]/√2`.
    TildeInverse,
}

impl RotationKind {
    pub fn inverse(self) -> Self {
        match self {
            RotationKind::Hat => RotationKind::Hat,
            RotationKind::Tilde => RotationKind::TildeInverse,
            RotationKind::TildeInverse => RotationKind::Tilde,
        }
    }
}

/// Non-classical gates used by the Fourier-transform stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PhaseGate {
    Rotation { qubit: QubitId, kind: RotationKind },
    /// Multiplies the `|11⟩` component of `(a, b)` by `e^{iθ}`.
    ConditionalPhase { a: QubitId, b: QubitId, theta: PhaseAngle },
}

impl PhaseGate {
    pub fn inverse(self) -> Self {
        match self {
            PhaseGate::Rotation { qubit, kind } => PhaseGate::Rotation { qubit, kind: kind.inverse() },
            PhaseGate::ConditionalPhase { a, b, theta } => {
                PhaseGate::ConditionalPhase { a, b, theta: -theta }
            }
        }
    }

    fn max_qubit(&self) -> u32 {
        match *self {
            PhaseGate::Rotation { qubit, .. } => qubit.0,
            PhaseGate::ConditionalPhase { a, b, .. } => a.0.max(b.0),
        }
    }
}

/// One step of a circuit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Instruction {
    Gate(Gate),
    Phase(PhaseGate),
    /// Swaps the qubit bindings of two equal-width registers; acts on no qubit.
    Relabel(String, String),
}

impl Instruction {
    /// Inverse instruction (gates and relabels are self-inverse).
    pub fn inverse(&self) -> Instruction {
        match self {
            Instruction::Phase(p) => Instruction::Phase(p.inverse()),
            other => other.clone(),
        }
    }
}

/// Named, ordered group of qubits (index 0 = least significant bit).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Register {
    pub name: String,
    pub qubits: Vec<QubitId>,
}

impl Register {
    pub fn new(name: impl Into<String>, qubits: Vec<QubitId>) -> Self {
        Register { name: name.into(), qubits }
    }

    pub fn width(&self) -> usize {
        self.qubits.len()
    }
}

/// When a contract predicate is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ContractPoint {
    Entry,
    Exit,
}

/// Predicate over the value held by a register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Predicate {
    Zero,
    Below(u64),
}

impl Predicate {
    pub fn holds(self, value: u64) -> bool {
        match self {
            Predicate::Zero => value == 0,
            Predicate::Below(n) => value < n,
        }
    }
}

/// Declared register predicate, checked by the simulator on request.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Contract {
    pub point: ContractPoint,
    pub register: String,
    pub predicate: Predicate,
}

impl Contract {
    pub fn new(point: ContractPoint, register: impl Into<String>, predicate: Predicate) -> Self {
        Contract { point, register: register.into(), predicate }
    }
}

/// Errors raised while constructing, combining or parsing circuits.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IrError {
    #[error("op {op}: qubit {qubit} out of range (qubit count {qubit_count})")]
    QubitOutOfRange { op: usize, qubit: u32, qubit_count: u32 },
    #[error("duplicate control on qubit {qubit}")]
    DuplicateControl { qubit: u32 },
    #[error("qubit {qubit} is both control and target")]
    TargetIsControl { qubit: u32 },
    #[error("conditional phase on a single qubit {qubit}")]
    PhaseOnSameQubit { qubit: u32 },
    #[error("angle {num}/{den} does not have a power-of-two denominator")]
    BadAngle { num: i64, den: u64 },
    #[error("register name {0:?} is declared twice")]
    DuplicateRegister(String),
    #[error("register name {0:?} is not a single non-empty token")]
    BadRegisterName(String),
    #[error("qubit {qubit} belongs to more than one register")]
    OverlappingRegisters { qubit: u32 },
    #[error("unknown register {0:?}")]
    UnknownRegister(String),
    #[error("relabel of {a:?} and {b:?} with widths {wa} and {wb}")]
    RelabelWidthMismatch { a: String, b: String, wa: usize, wb: usize },
    #[error("contract on register {register:?} of width {width} cannot be evaluated")]
    ContractTooWide { register: String, width: usize },
    #[error("register layouts are not compatible: {0}")]
    LayoutMismatch(String),
    #[error("internal swap does not match any register binding")]
    UnresolvedSwap,
    #[error("line {line}, field {field}: {message}")]
    Parse { line: usize, field: usize, message: String },
}

/// Immutable, validated circuit.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Circuit {
    qubit_count: u32,
    registers: Vec<Register>,
    ops: Vec<Instruction>,
    contracts: Vec<Contract>,
}

impl Default for Circuit {
    fn default() -> Self {
        Circuit::empty()
    }
}

impl Circuit {
    /// The circuit with no qubits, registers or ops.
    pub fn empty() -> Self {
        Circuit { qubit_count: 0, registers: Vec::new(), ops: Vec::new(), contracts: Vec::new() }
    }

    /// Validates and builds a circuit.
    pub fn new(
        qubit_count: u32,
        registers: Vec<Register>,
        ops: Vec<Instruction>,
    ) -> Result<Self, IrError> {
        validate_registers(qubit_count, &registers)?;
        for (i, op) in ops.iter().enumerate() {
            validate_op(i, op, qubit_count, &registers)?;
        }
        Ok(Circuit { qubit_count, registers, ops, contracts: Vec::new() })
    }

    /// Attaches contracts; each must name a register of width at most 64.
    pub fn with_contracts(mut self, contracts: Vec<Contract>) -> Result<Self, IrError> {
        for c in &contracts {
            let reg = self
                .register(&c.register)
                .ok_or_else(|| IrError::UnknownRegister(c.register.clone()))?;
            if reg.width() > 64 {
                return Err(IrError::ContractTooWide { register: c.register.clone(), width: reg.width() });
            }
        }
        self.contracts = contracts;
        Ok(self)
    }

    pub fn qubit_count(&self) -> u32 {
        self.qubit_count
    }

    /// Register layout at entry.
    pub fn registers(&self) -> &[Register] {
        &self.registers
    }

    pub fn ops(&self) -> &[Instruction] {
        &self.ops
    }

    pub fn contracts(&self) -> &[Contract] {
        &self.contracts
    }

    /// Register with the given name in the entry layout.
    pub fn register(&self, name: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.name == name)
    }

    /// Whether the circuit has no qubits, registers, ops or contracts.
    pub fn is_empty(&self) -> bool {
        self.qubit_count == 0 && self.registers.is_empty() && self.ops.is_empty() && self.contracts.is_empty()
    }

    /// Gates only, in execution order.
    pub fn gates(&self) -> impl Iterator<Item = &Gate> {
        self.ops.iter().filter_map(|op| match op {
            Instruction::Gate(g) => Some(g),
            _ => None,
        })
    }

    /// Whether any phase or rotation gate is present.
    pub fn has_phase_gates(&self) -> bool {
        self.ops.iter().any(|op| matches!(op, Instruction::Phase(_)))
    }

    /// Register layout after all relabels have been applied.
    pub fn final_layout(&self) -> Vec<Register> {
        let mut layout = self.registers.clone();
        for op in &self.ops {
            if let Instruction::Relabel(a, b) = op {
                let ia = layout.iter().position(|r| &r.name == a).expect("validated");
                let ib = layout.iter().position(|r| &r.name == b).expect("validated");
                let tmp = std::mem::take(&mut layout[ia].qubits);
                layout[ia].qubits = std::mem::replace(&mut layout[ib].qubits, tmp);
            }
        }
        layout
    }
}

fn validate_registers(qubit_count: u32, registers: &[Register]) -> Result<(), IrError> {
    let mut owner = vec![false; qubit_count as usize];
    for (i, r) in registers.iter().enumerate() {
        if r.name.is_empty() || r.name.chars().any(char::is_whitespace) || r.name.starts_with('#') {
            return Err(IrError::BadRegisterName(r.name.clone()));
        }
        if registers[..i].iter().any(|s| s.name == r.name) {
            return Err(IrError::DuplicateRegister(r.name.clone()));
        }
        for q in &r.qubits {
            if q.0 >= qubit_count {
                return Err(IrError::QubitOutOfRange { op: 0, qubit: q.0, qubit_count });
            }
            if std::mem::replace(&mut owner[q.index()], true) {
                return Err(IrError::OverlappingRegisters { qubit: q.0 });
            }
        }
    }
    Ok(())
}

fn validate_op(i: usize, op: &Instruction, qubit_count: u32, registers: &[Register]) -> Result<(), IrError> {
    let out_of_range = |q: u32| IrError::QubitOutOfRange { op: i, qubit: q, qubit_count };
    match op {
        Instruction::Gate(g) => {
            Gate::new(g.controls.iter().copied(), g.target)?;
            let m = g.max_qubit();
            if m >= qubit_count {
                return Err(out_of_range(m));
            }
        }
        Instruction::Phase(p) => {
            if let PhaseGate::ConditionalPhase { a, b, .. } = p {
                if a == b {
                    return Err(IrError::PhaseOnSameQubit { qubit: a.0 });
                }
            }
            let m = p.max_qubit();
            if m >= qubit_count {
                return Err(out_of_range(m));
            }
        }
        Instruction::Relabel(a, b) => {
            let find = |n: &String| {
                registers
                    .iter()
                    .find(|r| &r.name == n)
                    .ok_or_else(|| IrError::UnknownRegister(n.clone()))
            };
            let (ra, rb) = (find(a)?, find(b)?);
            if ra.width() != rb.width() {
                return Err(IrError::RelabelWidthMismatch {
                    a: a.clone(),
                    b: b.clone(),
                    wa: ra.width(),
                    wb: rb.width(),
                });
            }
        }
    }
    Ok(())
}

/// Runs `first` then `second`.
///
/// An empty circuit is the identity. Otherwise qubit counts must agree and
/// `second` must either declare no registers or start from the layout that
/// `first` ends in.
pub fn compose(first: &Circuit, second: &Circuit) -> Result<Circuit, IrError> {
    if second.is_empty() {
        return Ok(first.clone());
    }
    if first.is_empty() {
        return Ok(second.clone());
    }
    if first.qubit_count != second.qubit_count {
        return Err(IrError::LayoutMismatch(format!(
            "qubit counts {} and {}",
            first.qubit_count, second.qubit_count
        )));
    }
    if !second.registers.is_empty() && second.registers != first.final_layout() {
        return Err(IrError::LayoutMismatch(
            "second circuit does not start from the first circuit's final layout".into(),
        ));
    }
    let mut ops = first.ops.clone();
    ops.extend(second.ops.iter().cloned());
    let mut contracts: Vec<Contract> =
        first.contracts.iter().filter(|c| c.point == ContractPoint::Entry).cloned().collect();
    contracts.extend(second.contracts.iter().filter(|c| c.point == ContractPoint::Exit).cloned());
    Circuit::new(first.qubit_count, first.registers.clone(), ops)?.with_contracts(contracts)
}

/// Reverses the op stream; the result starts from `c`'s final layout.
///
/// Gates and relabels are self-inverse; conditional phases are negated and
/// determinant-one rotations are replaced by their inverse. Entry and exit
/// contracts trade places.
pub fn inverse(c: &Circuit) -> Circuit {
    let ops = c.ops.iter().rev().map(Instruction::inverse).collect();
    let contracts = c
        .contracts
        .iter()
        .map(|k| Contract {
            point: match k.point {
                ContractPoint::Entry => ContractPoint::Exit,
                ContractPoint::Exit => ContractPoint::Entry,
            },
            ..k.clone()
        })
        .collect();
    Circuit { qubit_count: c.qubit_count, registers: c.final_layout(), ops, contracts }
}
