use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use clockbath_cli::{run, CliError, Invocation};

/// Hahn-echo decoherence of donor spin ensembles near clock transitions.
#[derive(Debug, Parser)]
#[command(version)]
struct Args {
    /// TOML configuration, or a manifest.json from an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// decay, detuning-sweep, field-scan or heuristics.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,
    /// `key.path=value`, value read as a TOML literal. Repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if let Some(k) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(k).build_global() {
            return fail(CliError::Config(format!("threads: {e}")));
        }
    }
    let inv = Invocation {
        config: args.config,
        scenario: args.scenario,
        seed: args.seed,
        overrides: args.overrides,
    };
    match run(&inv, &args.out_dir) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(2)
}
