use std::process::ExitCode;

use clap::{Parser, Subcommand};
use emitter_chain_cli::{load, presets, run_experiment, CliError};

/// Worker-pool size; defaults to the available parallelism.
const WORKERS_VAR: &str = "EMITTER_CHAIN_WORKERS";

#[derive(Parser)]
#[command(name = "emitter-chain", version, about = "Run emitter-chain experiments and write CSV tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config file or a named preset.
    Run {
        config: String,
        /// Replace a config key, e.g. `n_sites=200` or `sweep.h_max=0.6`.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// List the shipped presets.
    ListPresets,
}

fn init_workers() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(WORKERS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Validation {
            field: WORKERS_VAR.to_string(),
            message: format!("expected a positive integer, got {raw:?}"),
        })?;
    // Only fails if a pool already exists, which cannot happen this early.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}

fn run(config: &str, overrides: &[String]) -> Result<(), CliError> {
    init_workers()?;
    let (config, name) = load(config, overrides)?;
    if config.deterministic {
        faer::set_global_parallelism(faer::Par::Seq);
    }
    let bundle = run_experiment(&config)?;
    let dir = config.output_dir(&name);
    for path in bundle.write(&dir)? {
        println!("{}", path.display());
    }
    eprintln!(
        "{} finished in {:.2} s",
        config.experiment, bundle.metadata.wall_time_seconds
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, overrides } => run(&config, &overrides),
        Command::ListPresets => {
            for p in presets::PRESETS {
                println!("{:<30} {}", p.name, p.description());
            }
            Ok(())
        }
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {e}", e.class());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
