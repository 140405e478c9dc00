use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use apfsa::campaign::{run_campaign_with, run_trial, Algorithm, CampaignOptions};
use apfsa::output::{write_stats_csv, write_trace_csv};
use apfsa::scenario::load_scenario;
use apfsa::svg::{write_svg, Projection};
use apfsa_core::PlanStatus;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "apfsa",
    version,
    about = "UAV path planning with potential fields and annealing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one trial and write trace.csv, topdown.svg and iso.svg.
    Plan {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        algo: Algorithm,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a seeded campaign and write stats.csv.
    Bench {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "apf,apf-sa,rrt,rrt-star")]
        algos: Vec<Algorithm>,
        #[arg(long, default_value_t = 100)]
        runs: usize,
        #[arg(long, default_value_t = 1)]
        base_seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Record wall-clock time in mean_elapsed (output is then not reproducible).
        #[arg(long)]
        timing: bool,
    },
    /// Load a scenario and check it without planning.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

enum Failure {
    Input(String),
    Planning(String),
}

impl Failure {
    fn input(e: impl std::fmt::Display) -> Self {
        Failure::Input(e.to_string())
    }
}

fn ensure_dir(dir: &Path) -> Result<(), Failure> {
    fs::create_dir_all(dir)
        .map_err(|e| Failure::Input(format!("cannot create {}: {e}", dir.display())))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Plan {
            scenario,
            algo,
            seed,
            out,
        } => {
            let sc = load_scenario(&scenario).map_err(Failure::input)?;
            let result =
                run_trial(&sc, algo, seed).map_err(|e| Failure::Planning(e.to_string()))?;
            ensure_dir(&out)?;
            write_trace_csv(&result, out.join("trace.csv")).map_err(Failure::input)?;
            let traces = std::slice::from_ref(&result);
            write_svg(
                &sc.scene,
                traces,
                out.join("topdown.svg"),
                Projection::TopDown,
            )
            .map_err(Failure::input)?;
            write_svg(&sc.scene, traces, out.join("iso.svg"), Projection::Iso)
                .map_err(Failure::input)?;
            println!(
                "{} {algo} seed {seed}: {} after {} steps, length {:.3}, energy {:.3}, escapes {}",
                sc.name,
                result.status,
                result.waypoints.len().saturating_sub(1),
                result.path_length,
                result.energy_used,
                result.escape_events.len()
            );
            if result.status == PlanStatus::Reached {
                Ok(())
            } else {
                Err(Failure::Planning(format!(
                    "goal not reached: {}",
                    result.status
                )))
            }
        }
        Command::Bench {
            scenario,
            algos,
            runs,
            base_seed,
            out,
            timing,
        } => {
            if runs == 0 {
                return Err(Failure::Input("--runs must be at least 1".into()));
            }
            let sc = load_scenario(&scenario).map_err(Failure::input)?;
            let options = CampaignOptions {
                timing,
                ..CampaignOptions::from_env()
            };
            let stats = run_campaign_with(&sc, &algos, runs, base_seed, &options);
            ensure_dir(&out)?;
            write_stats_csv(&stats, out.join("stats.csv")).map_err(Failure::input)?;
            for s in &stats {
                let outcomes: Vec<String> =
                    s.outcomes.iter().map(|(k, v)| format!("{k}={v}")).collect();
                println!(
                    "{:<9} reached {}/{} mean {:.3} best {:.3} worst {:.3} escapes {} [{}]",
                    s.algorithm.as_str(),
                    s.n_reached,
                    s.n_runs,
                    s.mean,
                    s.best,
                    s.worst,
                    s.total_escapes,
                    outcomes.join(" ")
                );
            }
            Ok(())
        }
        Command::Validate { scenario } => {
            let sc = load_scenario(&scenario).map_err(Failure::input)?;
            let (nx, ny, nz) = sc.scene.grid_dims();
            println!(
                "{}: ok ({} obstacles, grid {nx}x{ny}x{nz}, start {:?}, goal {:?})",
                sc.name,
                sc.scene.obstacles().len(),
                sc.scene.start().to_array(),
                sc.scene.goal().to_array()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Planning(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
