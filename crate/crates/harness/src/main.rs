use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use mohollm::Exec;
use mohollm_harness::aggregate::{aggregate, discover, write_summary, Summary};
use mohollm_harness::config::{run_name, wire, RunArgs};
use mohollm_harness::output::execute;
use mohollm_harness::plot::plot_summary;
use mohollm_harness::sweep::{sweep, Manifest};
use mohollm_harness::HarnessError;

/// Hierarchical partition-based multi-objective optimization experiments.
#[derive(Parser)]
#[command(name = "mohollm", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Execute one optimization run.
    Run(Box<RunArgs>),
    /// Execute every run listed in a manifest.
    Sweep {
        #[arg(long)]
        manifest: PathBuf,
        /// Concurrent runs; overrides the manifest.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Summarize run directories (searched recursively) across seeds.
    Aggregate {
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        #[arg(long, default_value = "summary")]
        out: PathBuf,
    },
    /// Draw figures from a `summary.json`.
    Plot {
        summary: PathBuf,
        #[arg(long, default_value = "figures")]
        out: PathBuf,
    },
}

fn run(args: RunArgs) -> Result<(), HarnessError> {
    let config = args.resolve()?;
    let wiring = wire(&config, args.templates.as_deref(), args.prices.as_deref())?;
    let root = args.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    let dir = if args.exact_out {
        root
    } else {
        root.join(run_name(&config))
    };
    let exec = if args.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    };
    let record = execute(&config, &wiring, exec, &dir, args.overwrite)?;
    println!(
        "{}: {} evaluations, final HV {}",
        dir.display(),
        record.evaluations(),
        record.final_hv()
    );
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), HarnessError> {
    match cli.command {
        Cmd::Run(args) => run(*args),
        Cmd::Sweep { manifest, workers } => {
            let manifest = Manifest::load(&manifest)?;
            let exe = std::env::current_exe()?;
            let report = sweep(&manifest, &exe, workers)?;
            for dir in &report.skipped {
                eprintln!("skipped complete run {}", dir.display());
            }
            for (dir, reason) in &report.failed {
                eprintln!("failed {}: {reason}", dir.display());
            }
            println!(
                "{} runs completed, {} skipped, {} failed",
                report.completed.len(),
                report.skipped.len(),
                report.failed.len()
            );
            if report.failed.is_empty() {
                Ok(())
            } else {
                Err(HarnessError::Run(format!(
                    "{} of the sweep's runs failed",
                    report.failed.len()
                )))
            }
        }
        Cmd::Aggregate { runs, out } => {
            let dirs = discover(&runs)?;
            if dirs.is_empty() {
                return Err(HarnessError::Aggregate("no run directories found".into()));
            }
            let summary = aggregate(&dirs)?;
            for w in &summary.warnings {
                eprintln!("warning: {w}");
            }
            for path in write_summary(&summary, &out)? {
                println!("{}", path.display());
            }
            Ok(())
        }
        Cmd::Plot { summary, out } => {
            let text = std::fs::read_to_string(&summary)?;
            let summary: Summary = serde_json::from_str(&text)?;
            let (written, warnings) = plot_summary(&summary, &out)?;
            for w in &warnings {
                eprintln!("warning: {w}");
            }
            for path in written {
                println!("{}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
