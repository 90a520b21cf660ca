use crate::{CliError, Context};
use clap::{Args, ValueEnum};
use qfn_core::arith::{self, ModulusContext, MuxForm, NetworkConfig, Variant};
use qfn_core::ir::{serialize, Circuit};
use qfn_core::machine::{count_gates, total_pulses, validate, MachineModel};
use qfn_core::minimal;
use qfn_core::shor::{self, LookupStyle};
use qfn_core::sim::{self, QftKind};
use serde::Serialize;
use serde_json::json;
use std::path::PathBuf;

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Network {
    Fa,
    Muxfa,
    Muxha,
    Madd,
    Lt,
    Xlt,
    Addn,
    Oaddn,
    Emul,
    Xor,
    Muln,
    Omuln,
    Expn,
    AddLtr,
    MaddPrime,
    OaddnMin,
    ExpnMin,
    Qft,
    Expn15,
    Mod2k,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormArg {
    Prime,
    Plain,
    DoublePrime,
    TriplePrime,
    QuadPrime,
}

impl From<FormArg> for MuxForm {
    fn from(f: FormArg) -> Self {
        match f {
            FormArg::Prime => MuxForm::Prime,
            FormArg::Plain => MuxForm::Plain,
            FormArg::DoublePrime => MuxForm::DoublePrime,
            FormArg::TriplePrime => MuxForm::TriplePrime,
            FormArg::QuadPrime => MuxForm::QuadPrime,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Hat,
    Tilde,
}

impl From<KindArg> for QftKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Hat => QftKind::Hat,
            KindArg::Tilde => QftKind::Tilde,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MachineArg {
    Basic,
    Enhanced,
    Unrestricted,
}

impl From<MachineArg> for MachineModel {
    fn from(m: MachineArg) -> Self {
        match m {
            MachineArg::Basic => MachineModel::BASIC,
            MachineArg::Enhanced => MachineModel::ENHANCED,
            MachineArg::Unrestricted => MachineModel::UNRESTRICTED,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct BuildArgs {
    /// Network to build.
    #[arg(value_enum)]
    pub network: Network,
    /// Classical addend, multiplier or comparand.
    #[arg(long)]
    pub a: Option<u64>,
    /// First multiplexed addend (select = 0).
    #[arg(long)]
    pub a0: Option<u64>,
    /// Second multiplexed addend (select = 1).
    #[arg(long)]
    pub a1: Option<u64>,
    /// Base of the exponentiation.
    #[arg(long)]
    pub x: Option<u64>,
    /// Odd modulus.
    #[arg(long = "N")]
    pub n: Option<u64>,
    /// Exponent width (transform width for qft and mod2k).
    #[arg(long = "L")]
    pub l: Option<u32>,
    /// Register width.
    #[arg(long = "K")]
    pub k: Option<u32>,
    /// Network variant.
    #[arg(long, default_value = "e2k1")]
    pub variant: String,
    /// Number of enable bits.
    #[arg(long, default_value_t = 0)]
    pub enables: usize,
    /// Multiplexed full-adder form.
    #[arg(long, value_enum, default_value_t = FormArg::Plain)]
    pub form: FormArg,
    /// Machine for the multiplexed half adder.
    #[arg(long, value_enum, default_value_t = MachineArg::Enhanced)]
    pub machine: MachineArg,
    /// Lookup style for expn15.
    #[arg(long, default_value = "standard")]
    pub style: String,
    /// Rotation kind for qft.
    #[arg(long, value_enum, default_value_t = KindArg::Hat)]
    pub kind: KindArg,
    /// Drop conditional phases finer than pi/2^prune.
    #[arg(long)]
    pub prune: Option<u32>,
    /// Write the document here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn need<T: Copy>(v: Option<T>, flag: &str, network: Network) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::usage(format!("{} needs --{flag}", network_name(network))))
}

pub fn network_name(n: Network) -> String {
    n.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn bit(v: u64, flag: &str) -> Result<bool, CliError> {
    match v {
        0 => Ok(false),
        1 => Ok(true),
        _ => Err(CliError::usage(format!("--{flag} must be 0 or 1 for a one-bit adder"))),
    }
}

/// Builds the requested network; the variant's machine when it has one.
pub fn build_network(a: &BuildArgs) -> Result<(Circuit, Option<MachineModel>), CliError> {
    let net = a.network;
    let variant: Variant = a.variant.parse().map_err(CliError::usage)?;
    let cfg = NetworkConfig::new(variant);
    let modulus = || -> Result<ModulusContext, CliError> {
        let n = need(a.n, "N", net)?;
        match a.k {
            Some(k) => ModulusContext::with_width(n, k),
            None => ModulusContext::new(n),
        }
        .map_err(CliError::usage)
    };
    let k = || need(a.k, "K", net);
    let circuit = match net {
        Network::Fa => arith::build_fa(bit(need(a.a, "a", net)?, "a")?),
        Network::Muxfa => {
            let (a0, a1) = (bit(need(a.a0, "a0", net)?, "a0")?, bit(need(a.a1, "a1", net)?, "a1")?);
            arith::build_muxfa(a.form.into(), a0, a1, a.enables).map_err(CliError::usage)?
        }
        Network::Muxha => {
            let (a0, a1) = (bit(need(a.a0, "a0", net)?, "a0")?, bit(need(a.a1, "a1", net)?, "a1")?);
            arith::build_muxha(a0, a1, a.enables, a.machine.into()).map_err(CliError::usage)?
        }
        Network::Madd => arith::build_madd(need(a.a0, "a0", net)?, need(a.a1, "a1", net)?, k()?, a.enables).map_err(CliError::usage)?,
        Network::Lt => arith::build_lt(need(a.a, "a", net)?, k()?).map_err(CliError::usage)?,
        Network::Xlt => arith::build_xlt(need(a.a, "a", net)?, k()?, a.enables).map_err(CliError::usage)?,
        Network::Addn => arith::build_addn(need(a.a, "a", net)?, modulus()?, a.enables, &cfg).map_err(CliError::usage)?,
        Network::Oaddn => arith::build_oaddn(need(a.a, "a", net)?, modulus()?, a.enables, &cfg).map_err(CliError::usage)?,
        Network::Emul => arith::build_emul(need(a.a, "a", net)?, k()?, a.enables).map_err(CliError::usage)?,
        Network::Xor => arith::build_xor(k()?, a.enables).map_err(CliError::usage)?,
        Network::Muln => arith::build_muln(need(a.a, "a", net)?, modulus()?, &cfg).map_err(CliError::usage)?,
        Network::Omuln => arith::build_omuln(need(a.a, "a", net)?, modulus()?, &cfg).map_err(CliError::usage)?,
        Network::Expn => arith::build_expn(need(a.x, "x", net)?, modulus()?, need(a.l, "L", net)?, &cfg).map_err(CliError::usage)?,
        Network::AddLtr => minimal::build_add_ltr(need(a.a, "a", net)?, k()?, a.enables).map_err(CliError::usage)?,
        Network::MaddPrime => {
            minimal::build_madd_prime(need(a.a0, "a0", net)?, need(a.a1, "a1", net)?, k()?, a.enables).map_err(CliError::usage)?
        }
        Network::OaddnMin => minimal::build_oaddn_min(need(a.a, "a", net)?, modulus()?, a.enables).map_err(CliError::usage)?,
        Network::ExpnMin => minimal::build_expn_min(need(a.x, "x", net)?, modulus()?, need(a.l, "L", net)?).map_err(CliError::usage)?,
        Network::Qft => sim::build_qft(need(a.l, "L", net)?, a.kind.into(), a.prune).map_err(CliError::usage)?,
        Network::Expn15 => {
            let style: LookupStyle = a.style.parse().map_err(CliError::usage)?;
            shor::build_expn15(need(a.x, "x", net)?, style).map_err(CliError::usage)?
        }
        Network::Mod2k => shor::build_mod2k(need(a.l, "L", net)?, k()?).map_err(CliError::usage)?,
    };
    let machine = match net {
        Network::Addn | Network::Oaddn | Network::Muln | Network::Omuln | Network::Expn => Some(variant.machine()),
        Network::Muxha => Some(a.machine.into()),
        _ => None,
    };
    Ok((circuit, machine))
}

pub fn run(a: &BuildArgs, ctx: &mut Context) -> Result<(), CliError> {
    let (circuit, machine) = build_network(a)?;
    let doc = serialize(&circuit);
    let gates = count_gates(&circuit);
    let pulses = total_pulses(&circuit);
    let fits = machine.map(|m| validate(&circuit, m).is_ok());
    let name = network_name(a.network);

    let mut record = json!({
        "record": "build",
        "network": name,
        "qubits": circuit.qubit_count(),
        "instructions": circuit.ops().len(),
        "gates_by_controls": gates.trimmed().iter().map(|g| g.to_integer()).collect::<Vec<_>>(),
        "pulses": pulses,
    });
    if let Some(f) = fits {
        record["fits_machine"] = json!(f);
    }
    match &a.out {
        Some(path) => {
            std::fs::write(path, &doc).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
            ctx.outputs.push(path.display().to_string());
            record["document_path"] = json!(path.display().to_string());
        }
        None if ctx.out.records() => record["document"] = json!(doc),
        None => print!("{doc}"),
    }
    let summary = format!(
        "{name}: {} qubits, {} instructions, gates by controls {gates}, {pulses} pulses{}",
        circuit.qubit_count(),
        circuit.ops().len(),
        match fits {
            Some(true) => ", fits its machine",
            Some(false) => ", EXCEEDS its machine",
            None => "",
        }
    );
    // Keep stdout a clean document when it carries one.
    if a.out.is_none() && !ctx.out.records() {
        eprintln!("{summary}");
    } else {
        ctx.out.line(summary);
    }
    ctx.out.record(record);

    if let Some(f) = fits {
        ctx.checks.expect("machine gate set", f, format!("{name} on its machine"));
    }
    match a.network {
        Network::Qft if a.prune.is_none() => {
            let l = u64::from(a.l.unwrap_or(0));
            ctx.checks.expect_eq("transform pulses L(2L-1)", pulses, l * (2 * l - 1));
            if l == 2 {
                ctx.checks.expect_eq("L=2 transform instructions", circuit.ops().len() as u64, 3);
            }
        }
        Network::Fa if a.a == Some(0) => ctx.checks.expect_eq("FA(0) gates", circuit.ops().len() as u64, 2),
        Network::Expn15 if a.x == Some(7) => {
            let want = match a.style.as_str() {
                "standard" => 34,
                "drop-final-not" => 33,
                _ => 30,
            };
            ctx.checks.expect_eq("N=15 lookup pulses", pulses, want);
        }
        Network::ExpnMin if a.n == Some(15) && a.l == Some(2) && a.k.unwrap_or(4) == 4 => {
            ctx.checks.expect_eq("minimal-space qubits", circuit.qubit_count(), 11);
        }
        _ => {}
    }
    Ok(())
}
