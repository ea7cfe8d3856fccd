//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bench::{
    evaluate_candidate, load_dataset, read_points, run_bench, write_pareto_outputs, write_report,
    BenchError, EvalConfig, Generator, GeneratorKind, HarnessConfig, HttpGenerator,
    ReplayGenerator,
};
use crate::bpmn_model::{parse_bpmn, ProcessGraph};
use crate::pareto::Projection;

#[derive(Debug, Parser)]
#[command(name = "procbench", version, about = "Benchmark generated BPMN process models on quality, cost and time")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score one candidate model against one gold model and print JSON.
    Evaluate {
        candidate: PathBuf,
        gold: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Run every configured model on a dataset and write reports.
    Bench {
        dataset: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Compute fronts and plots from a points.csv file.
    Pareto {
        points: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

/// Run the CLI on `args` (including the program name) and return the exit code.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn read_model(path: &Path) -> Result<ProcessGraph, BenchError> {
    let xml = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
    parse_bpmn(&xml).map_err(|e| BenchError::Data(format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<(), BenchError> {
    match command {
        Command::Evaluate {
            candidate,
            gold,
            config,
        } => {
            let eval = match config {
                Some(path) => HarnessConfig::load(&path)?.eval,
                None => EvalConfig::default(),
            };
            let metrics = evaluate_candidate(&read_model(&candidate)?, &read_model(&gold)?, &eval);
            let json = serde_json::to_string_pretty(&metrics)
                .map_err(|e| BenchError::Data(e.to_string()))?;
            println!("{json}");
        }
        Command::Bench {
            dataset,
            config,
            out,
        } => {
            let config = HarnessConfig::load(&config)?;
            if config.models.is_empty() {
                return Err(BenchError::Config("`models` lists no model".into()));
            }
            let cases = load_dataset(&dataset)?;
            let generator: Box<dyn Generator> = match &config.generator {
                GeneratorKind::Replay { dir } => Box::new(ReplayGenerator::new(dir)),
                GeneratorKind::Http {
                    endpoint,
                    api_key_env,
                } => Box::new(HttpGenerator::new(
                    endpoint.clone(),
                    api_key_env.clone(),
                    config.timeout_seconds,
                )),
            };
            let records = run_bench(&cases, generator.as_ref(), &config);
            let points = write_report(&out, &records, &config)?;
            let failures = records.iter().filter(|r| r.metrics.is_none()).count();
            println!(
                "{} runs ({} failed) over {} cases and {} models; {} model points written to {}",
                records.len(),
                failures,
                cases.len(),
                config.models.len(),
                points.len(),
                out.display()
            );
        }
        Command::Pareto { points, out } => {
            let points = read_points(&points)?;
            if points.is_empty() {
                return Err(BenchError::Data("points file is empty".into()));
            }
            let fronts = write_pareto_outputs(&out, &points)?;
            for (projection, front) in Projection::ALL.iter().zip(&fronts) {
                let names: Vec<&str> = front
                    .members
                    .iter()
                    .map(|&i| points[i].model_name.as_str())
                    .collect();
                println!("{}: {}", projection.stem(), names.join(", "));
            }
        }
    }
    Ok(())
}
