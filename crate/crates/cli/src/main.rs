use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use oto_clock_cli::config::{ExperimentConfig, ExperimentKind, Format};
use oto_clock_cli::experiments::run_experiment;
use oto_clock_cli::output::{write, RunInfo};
use oto_clock_cli::presets::PRESETS;
use oto_clock_cli::resolve::{resolve, Overrides};
use oto_clock_cli::verify::run_all;

#[derive(Parser)]
#[command(name = "oto-clock", version, about = "Clock-qubit OTOC protocol simulator")]
struct Cli {
    /// Worker threads for ensemble averages (default: all cores).
    #[arg(long, global = true, env = "OTO_CLOCK_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its table.
    Run(RunArgs),
    /// Run the acceptance suite; exits nonzero if any criterion fails.
    Verify,
    /// List the named presets.
    Presets,
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    preset: Option<String>,
    #[arg(long, value_enum)]
    experiment: Option<ExperimentKind>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<String>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Chain length for chain models.
    #[arg(long = "L", value_name = "L")]
    chain_length: Option<usize>,
}

fn run(args: RunArgs) -> anyhow::Result<()> {
    let config = args.config.as_deref().map(ExperimentConfig::load).transpose()?;
    let flags = Overrides {
        experiment: args.experiment,
        preset: args.preset,
        seed: args.seed,
        chain_length: args.chain_length,
        format: args.format,
        out: args.out,
    };
    let (resolved, target) = resolve(config, &flags)?;
    let start = Instant::now();
    let table = run_experiment(&resolved)?;
    let runtime = start.elapsed().as_secs_f64();
    let info = RunInfo {
        experiment: resolved.experiment.to_string(),
        config_hash: resolved.config_hash(),
        seed: resolved.ensemble.seed,
        config_json: serde_json::to_string(&resolved)?,
    };
    let mut sink: Box<dyn Write> = match &target.path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {p}"))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    write(&mut sink, target.format, &table, &info, runtime)?;
    sink.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    }
    let outcome = match cli.command {
        Command::Run(args) => run(args).map(|_| true),
        Command::Verify => {
            let results = run_all();
            for r in &results {
                println!("{r}");
            }
            Ok(results.iter().all(|r| r.passed))
        }
        Command::Presets => {
            for p in PRESETS {
                println!("{:<12} {}", p.name, p.summary);
            }
            Ok(true)
        }
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
