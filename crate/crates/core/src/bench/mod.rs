//! Benchmark harness: datasets, generators, the per-case run loop, reports
//! and plots.

pub mod config;
pub mod dataset;
pub mod evaluate;
pub mod extract;
pub mod generator;
pub mod plot;
pub mod report;
pub mod runner;

use std::io;
use std::path::Path;

use thiserror::Error;

use crate::bpmn_model::ModelError;

pub use config::{EvalConfig, GenerationConfig, GeneratorKind, HarnessConfig};
pub use dataset::{load_dataset, Case, GoldModel};
pub use evaluate::{evaluate_candidate, MetricComponents};
pub use extract::extract_xml_document;
pub use generator::{
    GenerationRequest, GenerationResponse, Generator, GeneratorError, HttpGenerator,
    ReplayGenerator, ScriptedGenerator,
};
pub use report::{read_points, write_pareto_outputs, write_report, ModelPoint};
pub use runner::{run_bench, run_case, RunRecord, RunSettings};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("case `{0}` has no description.txt")]
    MissingDescription(String),
    #[error("case `{0}` has no gold*.bpmn model")]
    NoGoldModel(String),
    #[error("gold model {file} does not parse: {source}")]
    GoldParseError {
        file: String,
        #[source]
        source: ModelError,
    },
    #[error("{0}")]
    Data(String),
}

impl BenchError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        BenchError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
