//! The run loop: prompt, generate, extract, retry, evaluate.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use serde::Serialize;

use super::config::{EvalConfig, GenerationConfig, HarnessConfig};
use super::dataset::Case;
use super::evaluate::{evaluate_candidate, MetricComponents};
use super::extract::extract_xml_document;
use super::generator::{GenerationRequest, Generator, GeneratorError};
use crate::bpmn_model::{validate_syntax, ProcessGraph};
use crate::economics::{compute_cost, MetricPoint, PricingEntry, TokenUsage};

/// Everything `run_case` needs besides the case and the generator.
#[derive(Debug, Clone)]
pub struct RunSettings {
    pub generation: GenerationConfig,
    pub eval: EvalConfig,
    pub pricing: PricingEntry,
    pub prompt_template: String,
}

/// One repetition of one model on one case.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub model_name: String,
    pub case_id: String,
    pub repetition: usize,
    /// Generation calls made, including retries.
    pub attempts: usize,
    pub usage: TokenUsage,
    pub cost_usd: f64,
    pub elapsed_seconds: f64,
    pub parse_ok: bool,
    pub deficit_count: Option<usize>,
    /// Name of the gold model the candidate scored best against.
    pub best_gold: Option<String>,
    pub metrics: Option<MetricComponents>,
    pub error: Option<String>,
    pub raw_output: String,
}

impl RunRecord {
    /// The run's position in quality/time/cost space; `None` for failures.
    pub fn metric_point(&self) -> Option<MetricPoint> {
        self.metrics.as_ref().map(|m| MetricPoint {
            quality: m.quality,
            time_seconds: self.elapsed_seconds,
            cost_usd: self.cost_usd,
        })
    }
}

fn render_prompt(template: &str, description: &str) -> String {
    template.replace("{description}", description)
}

/// Best gold by quality; ties keep the first gold in name order.
fn best_against(
    candidate: &ProcessGraph,
    case: &Case,
    eval: &EvalConfig,
) -> (String, MetricComponents) {
    let mut best: Option<(String, MetricComponents)> = None;
    for gold in &case.gold_models {
        let m = evaluate_candidate(candidate, &gold.graph, eval);
        if best.as_ref().is_none_or(|(_, b)| m.quality > b.quality) {
            best = Some((gold.name.clone(), m));
        }
    }
    best.expect("cases always carry at least one gold model")
}

/// Run all repetitions of one model on one case.
///
/// Output that yields no parseable model is retried up to `max_retries`
/// times; usage and time accumulate over attempts. A transport failure
/// ends the case: the failing repetition is recorded and the rest skipped.
pub fn run_case(case: &Case, generator: &dyn Generator, settings: &RunSettings) -> Vec<RunRecord> {
    let gen = &settings.generation;
    let prompt = render_prompt(&settings.prompt_template, &case.description);
    let mut records = Vec::new();
    let mut call_index = 0;

    for repetition in 0..gen.repetitions {
        let mut usage = TokenUsage::default();
        let mut elapsed = 0.0;
        let mut attempts = 0;
        let mut raw_output = String::new();
        let mut outcome: Result<ProcessGraph, String> = Err("no attempt made".into());
        let mut unreachable = false;

        for _ in 0..=gen.max_retries {
            let request = GenerationRequest {
                model: gen.model_name.clone(),
                prompt: prompt.clone(),
                temperature: gen.temperature,
                seed: gen.seed.map(|s| s.wrapping_add(repetition as u64)),
                case_id: case.case_id.clone(),
                call_index,
            };
            call_index += 1;
            attempts += 1;
            let started = Instant::now();
            let response = generator.generate(&request);
            let measured = started.elapsed().as_secs_f64();
            match response {
                Ok(resp) => {
                    usage += TokenUsage::single_call(resp.input_tokens, resp.output_tokens);
                    elapsed += resp.elapsed_seconds.unwrap_or(measured);
                    outcome = extract_xml_document(&resp.text)
                        .map_err(|e| format!("parse failure: {e}"));
                    raw_output = resp.text;
                    if outcome.is_ok() {
                        break;
                    }
                }
                Err(e @ GeneratorError::GeneratorUnreachable(_)) => {
                    elapsed += measured;
                    outcome = Err(e.to_string());
                    unreachable = true;
                    break;
                }
                Err(e @ GeneratorError::InvalidResponse(_)) => {
                    usage += TokenUsage::new(0, 0, 1);
                    elapsed += measured;
                    outcome = Err(e.to_string());
                }
            }
        }

        let cost_usd = compute_cost(&usage, &settings.pricing);
        let mut record = RunRecord {
            model_name: gen.model_name.clone(),
            case_id: case.case_id.clone(),
            repetition,
            attempts,
            usage,
            cost_usd,
            elapsed_seconds: elapsed,
            parse_ok: false,
            deficit_count: None,
            best_gold: None,
            metrics: None,
            error: None,
            raw_output,
        };
        match outcome {
            Ok(candidate) => {
                let (gold_name, metrics) = best_against(&candidate, case, &settings.eval);
                record.parse_ok = true;
                record.deficit_count = Some(validate_syntax(&candidate).deficit_count);
                record.best_gold = Some(gold_name);
                record.metrics = Some(metrics);
            }
            Err(note) => record.error = Some(note),
        }
        records.push(record);
        if unreachable {
            break;
        }
    }
    records
}

/// Every configured model on every case. Records come back ordered by
/// model (config order), then case, then repetition, whatever the
/// parallelism.
pub fn run_bench(cases: &[Case], generator: &dyn Generator, config: &HarnessConfig) -> Vec<RunRecord> {
    let jobs: Vec<(RunSettings, &Case)> = config
        .models
        .iter()
        .flat_map(|model| {
            let settings = RunSettings {
                generation: config.generation(model),
                eval: config.eval.clone(),
                pricing: config.pricing_for(model),
                prompt_template: config.prompt_template.clone(),
            };
            cases.iter().map(move |case| (settings.clone(), case))
        })
        .collect();

    let results: Vec<Mutex<Vec<RunRecord>>> = jobs.iter().map(|_| Mutex::new(Vec::new())).collect();
    let next = AtomicUsize::new(0);
    let workers = config.parallelism.clamp(1, jobs.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((settings, case)) = jobs.get(i) else {
                    break;
                };
                let records = run_case(case, generator, settings);
                *results[i].lock().expect("result slot poisoned") = records;
            });
        }
    });
    results
        .into_iter()
        .flat_map(|slot| slot.into_inner().expect("result slot poisoned"))
        .collect()
}
