use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use asaa_cli::error::CliError;
use asaa_cli::runner::{parse_paradigms, parse_seeds, run_sweep, RunSpec};
use asaa_cli::scenario_io::load_scenario;

/// Batch runner for the active sense-and-avoid simulation stack.
#[derive(Parser)]
#[command(name = "asaa", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a (paradigm, seed) sweep of one scenario and aggregate it.
    Run {
        /// Scenario JSON file.
        #[arg(long)]
        scenario: PathBuf,
        /// Comma-separated paradigm names.
        #[arg(long)]
        paradigm: String,
        /// Seed count `N` (runs 0..N) or explicit list `a,b,c`.
        #[arg(long)]
        seeds: String,
        /// Output directory for episode and aggregate files.
        #[arg(long)]
        out: PathBuf,
        /// Also write one trace CSV per episode.
        #[arg(long)]
        trace: bool,
        /// Dotted-path scenario override, repeatable (KEY=VALUE).
        #[arg(long = "set", value_name = "KEY=VALUE")]
        set: Vec<String>,
    },
    /// Check a scenario file and report diagnostics.
    Validate {
        /// Scenario JSON file.
        scenario: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run { scenario, paradigm, seeds, out, trace, set } => {
            let spec = RunSpec {
                scenario_path: scenario,
                paradigms: parse_paradigms(&paradigm)?,
                seeds: parse_seeds(&seeds)?,
                out_dir: out,
                trace,
                overrides: set,
            };
            let loaded = load_scenario(&spec.scenario_path, &spec.overrides)?;
            for w in &loaded.warnings {
                eprintln!("warning: {w}");
            }
            let report = run_sweep(&spec, &loaded.scenario)?;
            let episodes = spec.paradigms.len() * spec.seeds.len();
            println!(
                "ran {episodes} episodes of `{}` into {}",
                report.scenario,
                spec.out_dir.display()
            );
            for (name, stats) in &report.paradigms {
                println!(
                    "  {name}: collisions_moving {:.2} +- {:.2}, collisions_hovering {:.2} +- {:.2}, avg_speed {:.3} +- {:.3}",
                    stats.collisions_moving.mean,
                    stats.collisions_moving.std,
                    stats.collisions_hovering.mean,
                    stats.collisions_hovering.std,
                    stats.avg_speed.mean,
                    stats.avg_speed.std,
                );
            }
            for r in &report.reductions {
                if r.metric == "collisions_moving" {
                    println!(
                        "  {} of {} vs {}: {:+.1}%",
                        r.metric,
                        r.candidate,
                        r.baseline,
                        100.0 * r.reduction
                    );
                }
            }
            Ok(())
        }
        Command::Validate { scenario } => {
            let loaded = load_scenario(&scenario, &[])?;
            for w in &loaded.warnings {
                println!("warning: {w}");
            }
            println!("ok: {}", loaded.scenario.name);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
