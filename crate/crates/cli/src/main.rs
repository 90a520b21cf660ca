mod build;
mod count;
mod factor;
mod output;
mod qft_test;
mod selfcheck;
mod simulate;

use clap::{CommandFactory, Parser, Subcommand, ValueEnum};
use output::{Checks, Output, RunManifest};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

/// Seed used when neither `--seed` nor `QFN_SEED` is given.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(name = "qfn", version, about = "Reversible modular-exponentiation networks: build, simulate, count, factor")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone, Serialize)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Seed for every random choice of the run.
    #[arg(long, global = true, env = "QFN_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads for sweeps and trials (0 = all cores).
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Gate the exit status on the built-in reference values.
    #[arg(long, global = true)]
    pub check: bool,
    /// Write the run manifest to this file instead of the output stream.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    /// Tables and prose.
    Human,
    /// One JSON object per line.
    Records,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a network and write its circuit document.
    Build(build::BuildArgs),
    /// Run a circuit document on basis states or a state vector.
    Simulate(simulate::SimulateArgs),
    /// Gate-count and pulse tables, from closed forms or constructed networks.
    Count(count::CountArgs),
    /// Sampled order finding and factoring.
    Factor(factor::FactorArgs),
    /// The `a mod 2^K` transform test.
    QftTest(qft_test::QftTestArgs),
    /// Check every reference value the tool reproduces.
    Selfcheck(selfcheck::SelfcheckArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Build(_) => "build",
            Command::Simulate(_) => "simulate",
            Command::Count(_) => "count",
            Command::Factor(_) => "factor",
            Command::QftTest(_) => "qft-test",
            Command::Selfcheck(_) => "selfcheck",
        }
    }

    fn parameters(&self) -> serde_json::Value {
        let v = match self {
            Command::Build(a) => serde_json::to_value(a),
            Command::Simulate(a) => serde_json::to_value(a),
            Command::Count(a) => serde_json::to_value(a),
            Command::Factor(a) => serde_json::to_value(a),
            Command::QftTest(a) => serde_json::to_value(a),
            Command::Selfcheck(a) => serde_json::to_value(a),
        };
        v.expect("arguments serialize")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad parameters; reported with the subcommand's usage.
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn failed(e: impl std::fmt::Display) -> Self {
        CliError::Failed(e.to_string())
    }

    pub fn usage(e: impl std::fmt::Display) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Shared state handed to each subcommand.
pub struct Context {
    pub global: GlobalArgs,
    pub out: Output,
    pub checks: Checks,
    pub outputs: Vec<String>,
}

impl Context {
    /// Runs `f` on the configured worker pool.
    pub fn pool<R: Send>(&self, f: impl FnOnce() -> R + Send) -> Result<R, CliError> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(self.global.jobs).build().map_err(CliError::failed)?;
        Ok(pool.install(f))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let mut manifest = RunManifest::new(name, cli.command.parameters(), cli.global.seed);
    let mut ctx = Context {
        out: Output::new(cli.global.format),
        checks: Checks::default(),
        global: cli.global,
        outputs: Vec::new(),
    };
    let result = match cli.command {
        Command::Build(a) => build::run(&a, &mut ctx),
        Command::Simulate(a) => simulate::run(&a, &mut ctx),
        Command::Count(a) => count::run(&a, &mut ctx),
        Command::Factor(a) => factor::run(&a, &mut ctx),
        Command::QftTest(a) => qft_test::run(&a, &mut ctx),
        Command::Selfcheck(a) => selfcheck::run(&a, &mut ctx),
    };
    if let Err(e) = result {
        return match e {
            CliError::Usage(msg) => {
                let mut cmd = Cli::command();
                let sub = cmd.find_subcommand_mut(name).expect("known subcommand").clone();
                sub.bin_name(format!("qfn {name}")).error(clap::error::ErrorKind::ValueValidation, msg).exit()
            }
            other => {
                eprintln!("error: {other}");
                ExitCode::from(2)
            }
        };
    }
    let gated = ctx.global.check || name == "selfcheck";
    if gated {
        ctx.checks.report(&mut ctx.out);
    }
    manifest.outputs = ctx.outputs.clone();
    if let Some(path) = &ctx.global.manifest {
        let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
        if let Err(e) = std::fs::write(path, text + "\n") {
            eprintln!("error: {}: {e}", path.display());
            return ExitCode::from(2);
        }
    } else if ctx.global.format == Format::Records {
        ctx.out.record(manifest.to_record());
    } else {
        eprintln!("manifest: {}", serde_json::to_string(&manifest).expect("manifest serializes"));
    }
    if gated && ctx.checks.failed() > 0 {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
