use crate::{CliError, Context};
use clap::{Args, ValueEnum};
use qfn_core::ir::{parse, Circuit};
use qfn_core::sim::{
    distribution, read_register, run_compiled, run_statevector, BasisProgram, BasisState, StateVector,
    MAX_STATEVECTOR_QUBITS,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::path::PathBuf;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Basis simulation for gate-only circuits, state vector otherwise.
    Auto,
    Basis,
    Vector,
}

#[derive(Args, Debug, Serialize)]
pub struct SimulateArgs {
    /// Circuit document.
    pub circuit: PathBuf,
    /// Input bit pattern, qubit 0 first.
    #[arg(long, conflicts_with = "set")]
    pub bits: Option<String>,
    /// Register input `name=value` (repeatable).
    #[arg(long)]
    pub set: Vec<String>,
    /// Sweep one register over `name=lo..hi` (inclusive).
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    pub mode: Mode,
    /// Registers to print (default: all).
    #[arg(long, value_delimiter = ',')]
    pub show: Vec<String>,
    /// Register whose measurement law to print in vector mode.
    #[arg(long)]
    pub measure: Option<String>,
    /// Skip the circuit's entry and exit contracts.
    #[arg(long)]
    pub unchecked: bool,
}

fn split_assignment(s: &str) -> Result<(&str, &str), CliError> {
    s.split_once('=').ok_or_else(|| CliError::usage(format!("expected name=value, got {s:?}")))
}

fn parse_u64(s: &str) -> Result<u64, CliError> {
    s.trim().parse().map_err(|_| CliError::usage(format!("not a number: {s:?}")))
}

/// Parses `name=lo..hi` or `name=lo..=hi`, both inclusive.
fn parse_sweep(s: &str) -> Result<(String, u64, u64), CliError> {
    let (name, range) = split_assignment(s)?;
    let (lo, hi) = range.split_once("..").ok_or_else(|| CliError::usage(format!("expected lo..hi, got {range:?}")))?;
    let (lo, hi) = (parse_u64(lo)?, parse_u64(hi.trim_start_matches('='))?);
    if lo > hi {
        return Err(CliError::usage(format!("empty sweep {lo}..{hi}")));
    }
    Ok((name.to_string(), lo, hi))
}

fn initial_state(c: &Circuit, a: &SimulateArgs) -> Result<BasisState, CliError> {
    let mut s = match &a.bits {
        Some(bits) => {
            let s = BasisState::from_bit_string(bits).ok_or_else(|| CliError::usage("--bits takes 0s and 1s"))?;
            if s.width() != c.qubit_count() {
                return Err(CliError::usage(format!("--bits has {} qubits, circuit has {}", s.width(), c.qubit_count())));
            }
            s
        }
        None => BasisState::zeros(c.qubit_count()),
    };
    for item in &a.set {
        let (name, value) = split_assignment(item)?;
        let reg = c.register(name).ok_or_else(|| CliError::usage(format!("no register {name:?}")))?;
        s.write(&reg.qubits, parse_u64(value)?);
    }
    Ok(s)
}

fn shown(c: &Circuit, a: &SimulateArgs) -> Result<Vec<String>, CliError> {
    if a.show.is_empty() {
        return Ok(c.final_layout().into_iter().map(|r| r.name).collect());
    }
    for name in &a.show {
        if c.register(name).is_none() {
            return Err(CliError::usage(format!("no register {name:?}")));
        }
    }
    Ok(a.show.clone())
}

fn run_basis_mode(c: &Circuit, a: &SimulateArgs, ctx: &mut Context) -> Result<(), CliError> {
    let prog = BasisProgram::compile(c).map_err(|e| CliError::usage(format!("basis mode: {e}")))?;
    let start = initial_state(c, a)?;
    let sweep = a.sweep.as_deref().map(parse_sweep).transpose()?;
    let inputs: Vec<BasisState> = match &sweep {
        Some((name, lo, hi)) => {
            let reg = c.register(name).ok_or_else(|| CliError::usage(format!("no register {name:?}")))?;
            (*lo..=*hi)
                .map(|v| {
                    let mut s = start.clone();
                    s.write(&reg.qubits, v);
                    s
                })
                .collect()
        }
        None => vec![start],
    };
    let checks = !a.unchecked;
    let results: Vec<Result<BasisState, String>> = ctx.pool(|| {
        inputs.par_iter().map(|s| run_compiled(c, &prog, s, checks).map_err(|e| e.to_string())).collect()
    })?;
    let names = shown(c, a)?;
    let exit = c.final_layout();
    let entry = c.registers();
    for (input, result) in inputs.iter().zip(results) {
        let out = result.map_err(CliError::failed)?;
        let ins: Vec<(String, u64)> =
            entry.iter().map(|r| (r.name.clone(), read_register(entry, &r.name, input).unwrap_or(0))).collect();
        let outs: Vec<(String, u64)> =
            names.iter().map(|n| (n.clone(), read_register(&exit, n, &out).expect("register exists"))).collect();
        let fmt = |v: &[(String, u64)]| v.iter().map(|(n, x)| format!("{n}={x}")).collect::<Vec<_>>().join(" ");
        ctx.out.line(format!("{} -> {}", fmt(&ins), fmt(&outs)));
        ctx.out.record(json!({
            "record": "basis",
            "input_bits": input.to_bit_string(),
            "inputs": ins.iter().map(|(n, x)| (n.clone(), json!(x))).collect::<serde_json::Map<_, _>>(),
            "output_bits": out.to_bit_string(),
            "outputs": outs.iter().map(|(n, x)| (n.clone(), json!(x))).collect::<serde_json::Map<_, _>>(),
        }));
    }
    Ok(())
}

fn run_vector_mode(c: &Circuit, a: &SimulateArgs, ctx: &mut Context) -> Result<(), CliError> {
    if a.sweep.is_some() {
        return Err(CliError::usage("--sweep needs basis mode"));
    }
    if c.qubit_count() > MAX_STATEVECTOR_QUBITS {
        return Err(CliError::usage(format!(
            "vector mode handles at most {MAX_STATEVECTOR_QUBITS} qubits, circuit has {}",
            c.qubit_count()
        )));
    }
    let start = initial_state(c, a)?;
    let psi = StateVector::basis(c.qubit_count(), start.as_u64() as usize).map_err(CliError::failed)?;
    let out = run_statevector(c, &psi).map_err(CliError::failed)?;
    let width = c.qubit_count() as usize;
    for (i, amp) in out.amplitudes().iter().enumerate() {
        if amp.norm() < 1e-12 {
            continue;
        }
        let bits: String = (0..width).map(|q| if (i >> q) & 1 == 1 { '1' } else { '0' }).collect();
        ctx.out.line(format!("|{bits}> {:+.12} {:+.12}i  p={:.12}", amp.re, amp.im, amp.norm_sqr()));
        ctx.out.record(json!({"record": "amplitude", "bits": bits, "re": amp.re, "im": amp.im, "prob": amp.norm_sqr()}));
    }
    if let Some(name) = &a.measure {
        let reg = c
            .final_layout()
            .into_iter()
            .find(|r| &r.name == name)
            .ok_or_else(|| CliError::usage(format!("no register {name:?}")))?;
        let d = distribution(&out, &reg).map_err(CliError::failed)?;
        for (y, p) in d.support(1e-12) {
            ctx.out.line(format!("{name}={y} p={p:.12}"));
            ctx.out.record(json!({"record": "probability", "register": name, "value": y, "prob": p}));
        }
    }
    Ok(())
}

pub fn run(a: &SimulateArgs, ctx: &mut Context) -> Result<(), CliError> {
    let path = a.circuit.display().to_string();
    let text = std::fs::read_to_string(&a.circuit).map_err(|source| CliError::Io { path: path.clone(), source })?;
    let c = parse(&text).map_err(|e| CliError::failed(format!("{path}: {e}")))?;
    let vector = match a.mode {
        Mode::Auto => c.has_phase_gates(),
        Mode::Basis => false,
        Mode::Vector => true,
    };
    if vector {
        run_vector_mode(&c, a, ctx)
    } else {
        run_basis_mode(&c, a, ctx)
    }
}
