use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use lrecover::{emit_profile, run_scenario, Failure, ProfileFormat, RunOptions};

#[derive(Parser)]
#[command(name = "lrecover", version, about = "Optimal recovery scenarios for L-space valued functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its report.
    Run {
        scenario: PathBuf,
        /// Report path.
        #[arg(short, long)]
        output: PathBuf,
        /// Include witness functions point by point.
        #[arg(long)]
        emit_witness: bool,
        /// Write the pointwise bound profile (.csv or .json).
        #[arg(long)]
        profile: Option<PathBuf>,
        /// Worker threads for the data-parallel parts.
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<i32, Failure> {
    let Command::Run { scenario, output, emit_witness, profile, threads } = cli.command;
    if let Some(n) = threads {
        if n == 0 {
            return Err(Failure::validation("--threads: must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::validation(format!("--threads: {e}")))?;
    }
    let format = profile.as_deref().map(ProfileFormat::from_path).transpose()?;
    let outcome = run_scenario(&scenario, &output, RunOptions { emit_witness })?;
    if let (Some(path), Some(format)) = (profile, format) {
        let report =
            outcome.recovery.as_ref().ok_or_else(|| Failure::precondition("profile: report has no per-point data"))?;
        emit_profile(report, format, &path)?;
    }
    if let Some(msg) = &outcome.message {
        eprintln!("lrecover: {msg}");
    }
    Ok(outcome.exit_code)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(f) => {
            eprintln!("lrecover: {f}");
            ExitCode::from(f.kind.exit_code() as u8)
        }
    }
}
