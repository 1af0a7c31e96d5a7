use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use maxsemi_cli::{exit_code, run, Command, RunOptions};

/// Construct, sample, simulate and verify max-semi-stable laws.
#[derive(Debug, Parser)]
#[command(name = "maxsemi", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Scenario file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the scenario file.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads for replicate fan-out.
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(n) = args.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("{{\"error\":\"workers\",\"detail\":\"{e}\"}}");
            return ExitCode::from(maxsemi_cli::EXIT_INVALID as u8);
        }
    }
    let opts = RunOptions {
        command: args.command,
        config: args.config,
        out: args.out,
        seed: args.seed,
    };
    let result = run(&opts);
    match &result {
        Ok(report) => {
            for c in &report.checks {
                eprintln!(
                    "{} {}{} err={:e} thr={:e}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.check,
                    c.at.map(|a| format!("@{a}")).unwrap_or_default(),
                    c.max_err,
                    c.threshold
                );
            }
        }
        Err(err) => eprintln!("{}", serde_json::to_string(err).expect("serializable")),
    }
    ExitCode::from(exit_code(&result) as u8)
}
