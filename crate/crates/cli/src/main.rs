use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use trapcs_cli::commands::{self, num, render_report};
use trapcs_cli::{CliError, RunConfig, RunOptions};

/// Semiclassical coherent-state dynamics of an ion in quadrupole traps.
#[derive(Parser)]
#[command(name = "trapcs", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a trajectory and write it as CSV.
    Simulate(Args),
    /// Floquet stability map over a (U0, V0) grid, written as CSV.
    Scan(Args),
    /// Check the classical model against the Fock-space oracle; writes a JSON report.
    Verify(Args),
    /// Print the Husimi coefficients and compare with the oracle expectation.
    Dequantize(Args),
}

#[derive(clap::Args)]
struct Args {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output file; defaults to output.path from the configuration, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = one per core).
    #[arg(long, env = "TRAPCS_THREADS", default_value_t = 0)]
    threads: usize,
    /// Seed for randomized verification samples.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Exit status when `verify` completes but a check fails.
const EXIT_CHECK_FAILED: u8 = 3;

fn write(text: &str, out: Option<PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let (Command::Simulate(args) | Command::Scan(args) | Command::Verify(args) | Command::Dequantize(args)) =
        &cli.command;
    let res = RunConfig::load(&args.config)?.resolve()?;
    let opts = RunOptions {
        threads: args.threads,
        seed: args.seed,
        timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    };
    let data_out = args.out.clone().or_else(|| res.config.output.path.clone().map(PathBuf::from));
    match &cli.command {
        Command::Simulate(_) => write(&commands::simulate(&res, &opts)?, data_out)?,
        Command::Scan(_) => write(&commands::scan(&res, &opts)?, data_out)?,
        Command::Dequantize(_) => write(&commands::dequantize(&res, &opts)?, args.out.clone())?,
        Command::Verify(_) => {
            let report = commands::verify(&res, &opts);
            write(&render_report(&report), args.out.clone())?;
            for c in &report.checks {
                let residual = c.residual.map(num).unwrap_or_else(|| "n/a".into());
                eprintln!("{}: {} residual {residual} tolerance {}", c.name, c.status.label(), num(c.tolerance));
            }
            if !report.pass {
                return Ok(EXIT_CHECK_FAILED);
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
