//! Harness configuration: a flat `key = value` file.
//!
//! Blank lines and lines starting with `#` are ignored. Numbers may be
//! written as decimals or simple fractions (`1/3`). Relative paths are
//! resolved against the directory holding the config file.
//!
//! | key | default |
//! |---|---|
//! | `threshold` | 0.5 |
//! | `cost.node_insert`, `cost.node_delete`, `cost.node_substitute`, `cost.edge_insert`, `cost.edge_delete` | 1 |
//! | `weight.pr`, `weight.ged`, `weight.behavior` | 1/3 each |
//! | `ged.node_budget` | 12 |
//! | `trace.loop_bound` / `trace.max_traces` / `trace.max_len` / `trace.token_cap` | 1 / 10000 / 64 / 64 |
//! | `trace.max_states` | 200000 |
//! | `models` | comma-separated model names, required for `bench` |
//! | `seed` | unset |
//! | `temperature` | 0 |
//! | `repetitions` | 1 |
//! | `max_retries` | 0 |
//! | `timeout_seconds` | 120 |
//! | `generator` | `replay` or `http` |
//! | `replay_dir` | `replay` |
//! | `endpoint` | required for `http` |
//! | `api_key_env` | `PROCBENCH_API_KEY` |
//! | `pricing_table` | unset (all prices zero) |
//! | `prompt_template` | built-in template |
//! | `parallelism` | 1 |

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::BenchError;
use crate::behavior::TraceBounds;
use crate::economics::PricingEntry;
use crate::matching::DEFAULT_THRESHOLD;
use crate::quality_metrics::{EditCostModel, QualityWeights, DEFAULT_NODE_BUDGET};

pub const DEFAULT_PROMPT_TEMPLATE: &str = "You are an expert business process modeler.\n\
Model the process described below as BPMN 2.0.\n\
Use only startEvent, endEvent, task, exclusiveGateway, parallelGateway and sequenceFlow \
elements inside a single process element.\n\
Respond with a single BPMN 2.0 XML document and nothing else.\n\n\
Process description:\n{description}\n";

pub const DEFAULT_API_KEY_ENV: &str = "PROCBENCH_API_KEY";

/// Everything the metric pipeline needs to compare two models.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalConfig {
    pub threshold: f64,
    pub costs: EditCostModel,
    pub weights: QualityWeights,
    pub bounds: TraceBounds,
    pub node_budget: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            costs: EditCostModel::default(),
            weights: QualityWeights::default(),
            bounds: TraceBounds::default(),
            node_budget: DEFAULT_NODE_BUDGET,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationConfig {
    pub model_name: String,
    /// Base seed; repetition `i` is sent `seed + i`.
    pub seed: Option<u64>,
    pub temperature: f64,
    pub repetitions: usize,
    pub max_retries: usize,
    pub timeout_seconds: f64,
}

impl GenerationConfig {
    pub fn new(model_name: impl Into<String>) -> Self {
        Self {
            model_name: model_name.into(),
            seed: None,
            temperature: 0.0,
            repetitions: 1,
            max_retries: 0,
            timeout_seconds: 120.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GeneratorKind {
    Replay { dir: PathBuf },
    Http { endpoint: String, api_key_env: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct HarnessConfig {
    pub eval: EvalConfig,
    pub models: Vec<String>,
    pub seed: Option<u64>,
    pub temperature: f64,
    pub repetitions: usize,
    pub max_retries: usize,
    pub timeout_seconds: f64,
    pub generator: GeneratorKind,
    pub pricing: BTreeMap<String, PricingEntry>,
    pub prompt_template: String,
    pub parallelism: usize,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        Self {
            eval: EvalConfig::default(),
            models: Vec::new(),
            seed: None,
            temperature: 0.0,
            repetitions: 1,
            max_retries: 0,
            timeout_seconds: 120.0,
            generator: GeneratorKind::Replay {
                dir: PathBuf::from("replay"),
            },
            pricing: BTreeMap::new(),
            prompt_template: DEFAULT_PROMPT_TEMPLATE.to_string(),
            parallelism: 1,
        }
    }
}

impl HarnessConfig {
    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let text = fs::read_to_string(path).map_err(|e| BenchError::io(path, e))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    /// Parse config text; relative paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, BenchError> {
        let entries = parse_entries(text)?;
        let mut cfg = HarnessConfig::default();
        let mut weights = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0);
        let mut generator = "replay".to_string();
        let mut replay_dir = base_dir.join("replay");
        let mut endpoint = None;
        let mut api_key_env = DEFAULT_API_KEY_ENV.to_string();

        for (line, key, value) in &entries {
            let line = *line;
            let num = || parse_number(value).ok_or_else(|| bad(line, key, value));
            let int = || value.parse::<usize>().map_err(|_| bad(line, key, value));
            match key.as_str() {
                "threshold" => cfg.eval.threshold = num()?,
                "cost.node_insert" => cfg.eval.costs.node_insert = num()?,
                "cost.node_delete" => cfg.eval.costs.node_delete = num()?,
                "cost.node_substitute" => cfg.eval.costs.node_substitute = num()?,
                "cost.edge_insert" => cfg.eval.costs.edge_insert = num()?,
                "cost.edge_delete" => cfg.eval.costs.edge_delete = num()?,
                "weight.pr" => weights.0 = num()?,
                "weight.ged" => weights.1 = num()?,
                "weight.behavior" => weights.2 = num()?,
                "ged.node_budget" => cfg.eval.node_budget = int()?,
                "trace.loop_bound" => cfg.eval.bounds.loop_bound = int()?,
                "trace.max_traces" => cfg.eval.bounds.max_traces = int()?,
                "trace.max_len" => cfg.eval.bounds.max_len = int()?,
                "trace.token_cap" => cfg.eval.bounds.token_cap = int()?,
                "trace.max_states" => cfg.eval.bounds.max_states = int()?,
                "models" => {
                    cfg.models = value
                        .split(',')
                        .map(str::trim)
                        .filter(|m| !m.is_empty())
                        .map(String::from)
                        .collect()
                }
                "seed" => cfg.seed = Some(value.parse().map_err(|_| bad(line, key, value))?),
                "temperature" => cfg.temperature = num()?,
                "repetitions" => cfg.repetitions = int()?,
                "max_retries" => cfg.max_retries = int()?,
                "timeout_seconds" => cfg.timeout_seconds = num()?,
                "generator" => generator = value.clone(),
                "replay_dir" => replay_dir = base_dir.join(value),
                "endpoint" => endpoint = Some(value.clone()),
                "api_key_env" => api_key_env = value.clone(),
                "pricing_table" => cfg.pricing = load_pricing(&base_dir.join(value))?,
                "prompt_template" => {
                    let path = base_dir.join(value);
                    cfg.prompt_template =
                        fs::read_to_string(&path).map_err(|e| BenchError::io(&path, e))?;
                }
                "parallelism" => cfg.parallelism = int()?,
                _ => {
                    return Err(BenchError::Config(format!(
                        "line {line}: unknown key `{key}`"
                    )))
                }
            }
        }

        cfg.eval.weights = QualityWeights::new(weights.0, weights.1, weights.2)
            .map_err(|e| BenchError::Config(e.to_string()))?;
        cfg.generator = match generator.as_str() {
            "replay" => GeneratorKind::Replay { dir: replay_dir },
            "http" => GeneratorKind::Http {
                endpoint: endpoint.ok_or_else(|| {
                    BenchError::Config("generator `http` requires `endpoint`".into())
                })?,
                api_key_env,
            },
            other => {
                return Err(BenchError::Config(format!(
                    "unknown generator `{other}` (expected `replay` or `http`)"
                )))
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), BenchError> {
        let fail = |msg: &str| Err(BenchError::Config(msg.to_string()));
        if !(0.0..=1.0).contains(&self.eval.threshold) {
            return fail("threshold must lie in [0, 1]");
        }
        self.eval
            .costs
            .validate()
            .map_err(|e| BenchError::Config(e.to_string()))?;
        let b = &self.eval.bounds;
        if b.max_traces == 0 || b.max_len == 0 || b.max_states == 0 {
            return fail("trace.max_traces, trace.max_len and trace.max_states must be at least 1");
        }
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return fail("temperature must be non-negative");
        }
        if self.repetitions == 0 {
            return fail("repetitions must be at least 1");
        }
        if !(self.timeout_seconds.is_finite() && self.timeout_seconds > 0.0) {
            return fail("timeout_seconds must be positive");
        }
        if self.parallelism == 0 {
            return fail("parallelism must be at least 1");
        }
        if !self.prompt_template.contains("{description}") {
            return fail("prompt template lacks the {description} placeholder");
        }
        Ok(())
    }

    pub fn generation(&self, model_name: &str) -> GenerationConfig {
        GenerationConfig {
            model_name: model_name.to_string(),
            seed: self.seed,
            temperature: self.temperature,
            repetitions: self.repetitions,
            max_retries: self.max_retries,
            timeout_seconds: self.timeout_seconds,
        }
    }

    /// Pricing for a model; unknown models are free.
    pub fn pricing_for(&self, model_name: &str) -> PricingEntry {
        self.pricing
            .get(model_name)
            .cloned()
            .unwrap_or_else(|| PricingEntry::free(model_name))
    }
}

fn bad(line: usize, key: &str, value: &str) -> BenchError {
    BenchError::Config(format!("line {line}: invalid value `{value}` for `{key}`"))
}

fn parse_entries(text: &str) -> Result<Vec<(usize, String, String)>, BenchError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            BenchError::Config(format!("line {}: expected `key = value`", i + 1))
        })?;
        out.push((i + 1, key.trim().to_string(), value.trim().to_string()));
    }
    Ok(out)
}

/// Decimal or `numerator/denominator`.
fn parse_number(value: &str) -> Option<f64> {
    let v = match value.split_once('/') {
        Some((n, d)) => n.trim().parse::<f64>().ok()? / d.trim().parse::<f64>().ok()?,
        None => value.parse::<f64>().ok()?,
    };
    v.is_finite().then_some(v)
}

/// Read a pricing table: CSV with header
/// `model_name,usd_per_million_input,usd_per_million_output,usd_per_call`.
pub fn load_pricing(path: &Path) -> Result<BTreeMap<String, PricingEntry>, BenchError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| BenchError::Data(format!("{}: {e}", path.display())))?;
    let mut table = BTreeMap::new();
    for row in reader.deserialize::<PricingEntry>() {
        let entry = row.map_err(|e| BenchError::Data(format!("{}: {e}", path.display())))?;
        let prices = [
            entry.usd_per_million_input,
            entry.usd_per_million_output,
            entry.usd_per_call,
        ];
        if prices.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(BenchError::Data(format!(
                "{}: negative or non-finite price for `{}`",
                path.display(),
                entry.model_name
            )));
        }
        table.insert(entry.model_name.clone(), entry);
    }
    Ok(table)
}
