use clap::{Parser, Subcommand};
use softqed::harness::commands::{run, Command, Output};
use softqed::harness::config::SuiteConfig;
use softqed::Error;
use std::path::PathBuf;
use std::process::ExitCode;

/// Soft-photon QED numerics: verification suite and data products.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// JSON configuration; defaults are used when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file (JSON report or CSV).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Clone, Copy)]
enum Sub {
    /// Run every registered check and write a JSON report.
    Verify,
    /// Tabulate the loop current on the current grid as CSV.
    Current,
    /// Pole decomposition and Θ table of the configured line.
    Decompose,
    /// Photon number, normalization and phase along the k_min ladder as CSV.
    Coherent,
    /// Classical action of the action loop.
    Action,
}

impl From<Sub> for Command {
    fn from(s: Sub) -> Self {
        match s {
            Sub::Verify => Command::Verify,
            Sub::Current => Command::Current,
            Sub::Decompose => Command::Decompose,
            Sub::Coherent => Command::Coherent,
            Sub::Action => Command::Action,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => match SuiteConfig::from_path(path) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
        },
        None => SuiteConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let command = Command::from(cli.command);
    let out = cli
        .out
        .or_else(|| cfg.output_path.clone().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(command.default_output()));

    let output = match run(command, &cfg) {
        Ok(o) => o,
        Err(e @ Error::Config(_)) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    if let Err(e) = output.write(&out) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if let Output::Report(r) = &output {
        for c in &r.checks {
            println!("{} {:<28} residual {:.3e} tol {:.1e}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.residual, c.tolerance);
        }
        println!("{}/{} passed; report written to {}", r.summary.passed, r.summary.total, out.display());
    } else {
        println!("wrote {}", out.display());
    }
    if output.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
