mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use degen_ma::Error;

use config::{ConfigError, ExperimentConfig};
use output::Output;

/// Runs degen-ma experiments described by a TOML config.
#[derive(Parser)]
#[command(name = "degen-ma", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Select barrier constants and certify H[W] against 1 on samples.
    VerifyBarrier(Common),
    /// Solve the Dirichlet problem on a 2-D grid.
    Solve(Common),
    /// Fit boundary-decay exponents and compare with the predictions.
    FitExponent(Common),
    /// Solve the radial problem on a ball with the ODE oracle.
    OracleRadial(Common),
    /// Certify sphere conditions and the (a, eta) type of the domain.
    CertifyDomain(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    #[arg(long, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Overrides solver.h_len.
    #[arg(long, value_name = "FLOAT")]
    h: Option<f64>,
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug)]
pub enum CliError {
    Lib(Error),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 4,
            CliError::Lib(e) if e.is_convergence() => 3,
            CliError::Lib(_) => 2,
        }
    }
}

fn run(name: &'static str, args: &Common, cmd: fn(&ExperimentConfig, &mut Output) -> Result<i32, CliError>) -> Result<i32, CliError> {
    let mut cfg = ExperimentConfig::load(&args.config).map_err(|e| match e {
        ConfigError::Io(m) => CliError::Io(m),
        ConfigError::Invalid(e) => CliError::Lib(e),
    })?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(h) = args.h {
        cfg.solver.h_len = h;
        cfg.validate()?;
    }
    let mut out = Output::new(&args.out, name, &cfg, args.quiet);
    cmd(&cfg, &mut out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::VerifyBarrier(a) => run("verify-barrier", a, commands::verify),
        Command::Solve(a) => run("solve", a, commands::solve),
        Command::FitExponent(a) => run("fit-exponent", a, commands::fit),
        Command::OracleRadial(a) => run("oracle-radial", a, commands::oracle),
        Command::CertifyDomain(a) => run("certify-domain", a, commands::certify),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            match &e {
                CliError::Lib(err) => eprintln!("error: {err}"),
                CliError::Io(m) => eprintln!("error: {m}"),
            }
            ExitCode::from(e.code())
        }
    }
}
