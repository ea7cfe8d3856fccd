//! Report files written by a benchmark run.
//!
//! * `runs.csv`: one row per repetition
//! * `summary.json`: per-model and per-case statistics plus the prompt template
//! * `points.csv`: mean quality, time and cost per model
//! * `pareto_<x>_<y>.csv` and `.svg`: front members and a plot per projection

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{EvalConfig, HarnessConfig};
use super::plot::render_svg;
use super::runner::RunRecord;
use super::BenchError;
use crate::economics::{aggregate_runs, MetricPoint, RunStats};
use crate::pareto::{pareto_front_2d, ParetoFront, Projection};

/// One row of `points.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub model_name: String,
    pub quality: f64,
    pub time_seconds: f64,
    pub cost_usd: f64,
}

impl ModelPoint {
    pub fn metric(&self) -> MetricPoint {
        MetricPoint {
            quality: self.quality,
            time_seconds: self.time_seconds,
            cost_usd: self.cost_usd,
        }
    }
}

#[derive(Serialize)]
struct RunRow<'a> {
    model_name: &'a str,
    case_id: &'a str,
    repetition: usize,
    attempts: usize,
    parse_ok: bool,
    deficit_count: Option<usize>,
    best_gold: Option<&'a str>,
    precision: Option<f64>,
    recall: Option<f64>,
    concept_f1: Option<f64>,
    ged_distance: Option<f64>,
    ged_exact: Option<bool>,
    ged_similarity: Option<f64>,
    behavioral_recall: Option<f64>,
    behavioral_precision: Option<f64>,
    behavioral_f1: Option<f64>,
    quality: Option<f64>,
    input_tokens: u64,
    output_tokens: u64,
    api_calls: u64,
    cost_usd: f64,
    elapsed_seconds: f64,
    error: Option<&'a str>,
}

impl<'a> From<&'a RunRecord> for RunRow<'a> {
    fn from(r: &'a RunRecord) -> Self {
        let m = r.metrics.as_ref();
        RunRow {
            model_name: &r.model_name,
            case_id: &r.case_id,
            repetition: r.repetition,
            attempts: r.attempts,
            parse_ok: r.parse_ok,
            deficit_count: r.deficit_count,
            best_gold: r.best_gold.as_deref(),
            precision: m.map(|m| m.precision),
            recall: m.map(|m| m.recall),
            concept_f1: m.map(|m| m.concept_f1),
            ged_distance: m.map(|m| m.ged_distance),
            ged_exact: m.map(|m| m.ged_exact),
            ged_similarity: m.map(|m| m.ged_similarity),
            behavioral_recall: m.map(|m| m.behavioral_recall),
            behavioral_precision: m.map(|m| m.behavioral_precision),
            behavioral_f1: m.map(|m| m.behavioral_f1),
            quality: m.map(|m| m.quality),
            input_tokens: r.usage.input_tokens,
            output_tokens: r.usage.output_tokens,
            api_calls: r.usage.api_calls,
            cost_usd: r.cost_usd,
            elapsed_seconds: r.elapsed_seconds,
            error: r.error.as_deref(),
        }
    }
}

#[derive(Serialize)]
struct CaseSummary {
    case_id: String,
    runs: usize,
    failures: usize,
    stats: Option<RunStats>,
}

#[derive(Serialize)]
struct ModelSummary {
    model_name: String,
    runs: usize,
    failures: usize,
    /// Over all successful runs of the model.
    overall: Option<RunStats>,
    cases: Vec<CaseSummary>,
}

#[derive(Serialize)]
struct GenerationSummary {
    seed: Option<u64>,
    temperature: f64,
    repetitions: usize,
    max_retries: usize,
}

#[derive(Serialize)]
struct Summary<'a> {
    prompt_template: &'a str,
    evaluation: &'a EvalConfig,
    generation: GenerationSummary,
    models: Vec<ModelSummary>,
}

fn stats_of<'a>(records: impl Iterator<Item = &'a RunRecord>) -> (usize, usize, Option<RunStats>) {
    let mut runs = 0;
    let mut points = Vec::new();
    for r in records {
        runs += 1;
        points.extend(r.metric_point());
    }
    (runs, runs - points.len(), aggregate_runs(&points).ok())
}

fn csv_error(path: &Path, e: impl std::fmt::Display) -> BenchError {
    BenchError::Data(format!("{}: {e}", path.display()))
}

fn write_csv<T: Serialize>(path: &Path, rows: impl IntoIterator<Item = T>) -> Result<(), BenchError> {
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for row in rows {
        writer.serialize(row).map_err(|e| csv_error(path, e))?;
    }
    writer.flush().map_err(|e| BenchError::io(path, e))
}

/// Write every report for a finished benchmark run into `out_dir`.
pub fn write_report(
    out_dir: &Path,
    records: &[RunRecord],
    config: &HarnessConfig,
) -> Result<Vec<ModelPoint>, BenchError> {
    fs::create_dir_all(out_dir).map_err(|e| BenchError::io(out_dir, e))?;
    write_csv(&out_dir.join("runs.csv"), records.iter().map(RunRow::from))?;

    let mut models = Vec::new();
    let mut points = Vec::new();
    for model in &config.models {
        let of_model = || records.iter().filter(move |r| &r.model_name == model);
        let mut case_ids: Vec<&str> = of_model().map(|r| r.case_id.as_str()).collect();
        case_ids.dedup();
        let cases = case_ids
            .into_iter()
            .map(|case_id| {
                let (runs, failures, stats) = stats_of(of_model().filter(|r| r.case_id == case_id));
                CaseSummary {
                    case_id: case_id.to_string(),
                    runs,
                    failures,
                    stats,
                }
            })
            .collect();
        let (runs, failures, overall) = stats_of(of_model());
        if let Some(stats) = &overall {
            let mean = stats.mean_point();
            points.push(ModelPoint {
                model_name: model.clone(),
                quality: mean.quality,
                time_seconds: mean.time_seconds,
                cost_usd: mean.cost_usd,
            });
        }
        models.push(ModelSummary {
            model_name: model.clone(),
            runs,
            failures,
            overall,
            cases,
        });
    }

    let summary = Summary {
        prompt_template: &config.prompt_template,
        evaluation: &config.eval,
        generation: GenerationSummary {
            seed: config.seed,
            temperature: config.temperature,
            repetitions: config.repetitions,
            max_retries: config.max_retries,
        },
        models,
    };
    let path = out_dir.join("summary.json");
    let json = serde_json::to_string_pretty(&summary).map_err(|e| csv_error(&path, e))?;
    fs::write(&path, json + "\n").map_err(|e| BenchError::io(&path, e))?;

    write_csv(&out_dir.join("points.csv"), &points)?;
    write_pareto_outputs(out_dir, &points)?;
    Ok(points)
}

/// Read a `points.csv` file (`model_name,quality,time_seconds,cost_usd`).
pub fn read_points(path: &Path) -> Result<Vec<ModelPoint>, BenchError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(path, e))?;
    let points: Vec<ModelPoint> = reader
        .deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| csv_error(path, e))?;
    if let Some(p) = points.iter().find(|p| {
        !(p.quality.is_finite() && p.time_seconds.is_finite() && p.cost_usd.is_finite())
    }) {
        return Err(BenchError::Data(format!(
            "{}: non-finite value for `{}`",
            path.display(),
            p.model_name
        )));
    }
    Ok(points)
}

/// Front table and plot for each projection. Returns the fronts in
/// [`Projection::ALL`] order.
pub fn write_pareto_outputs(
    out_dir: &Path,
    points: &[ModelPoint],
) -> Result<Vec<ParetoFront>, BenchError> {
    fs::create_dir_all(out_dir).map_err(|e| BenchError::io(out_dir, e))?;
    let metrics: Vec<MetricPoint> = points.iter().map(ModelPoint::metric).collect();
    let labels: Vec<String> = points.iter().map(|p| p.model_name.clone()).collect();
    let mut fronts = Vec::new();
    for projection in Projection::ALL {
        let projected = projection.project(&metrics);
        let front = if projected.is_empty() {
            ParetoFront { members: Vec::new() }
        } else {
            pareto_front_2d(&projected, projection.orientation())
                .map_err(|e| BenchError::Data(e.to_string()))?
        };
        let stem = projection.stem();
        write_csv(
            &out_dir.join(format!("{stem}.csv")),
            front.members.iter().map(|&i| &points[i]),
        )?;
        let svg_path = out_dir.join(format!("{stem}.svg"));
        fs::write(&svg_path, render_svg(projection, &labels, &projected, &front))
            .map_err(|e| BenchError::io(&svg_path, e))?;
        fronts.push(front);
    }
    Ok(fronts)
}
