use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fbchan_cli::config::{self, CHANNELS};
use fbchan_cli::{run, CliError, Overrides, RunOptions};

#[derive(Parser)]
#[command(
    name = "fbchan",
    version,
    about = "Simulation laboratory for white Gaussian feedback channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file
    Run {
        config: PathBuf,
        /// Overrides the config seed
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores)
        #[arg(long)]
        threads: Option<usize>,
        /// Fixed reduction order; output is identical across thread counts
        #[arg(long)]
        deterministic: bool,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Check a config file without running it
    Validate {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List the builtin channels and their parameters
    ListChannels,
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Run {
            config,
            seed,
            threads,
            deterministic,
            output_dir,
        } => {
            if let Some(n) = threads {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global()
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
            }
            let cfg = config::load(&config, &Overrides { seed })?;
            let report = run(
                &cfg,
                &RunOptions {
                    output_dir,
                    deterministic,
                },
            )?;
            for c in &report.outcome.checks {
                println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            println!("wrote {}", report.output_dir.display());
            Ok(if report.all_passed() { 0 } else { 2 })
        }
        Command::Validate { config, seed } => {
            let cfg = config::load(&config, &Overrides { seed })?;
            println!("ok: {} (seed {})", cfg.experiment, cfg.seed);
            Ok(0)
        }
        Command::ListChannels => {
            for (name, params, about) in CHANNELS {
                println!("{name:<20} [{}]  {about}", params.join(", "));
            }
            Ok(0)
        }
    }
}
