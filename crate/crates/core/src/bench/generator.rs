//! Sources of candidate models: recorded replays, an HTTP endpoint, and a
//! scripted generator for tests.

use std::collections::HashMap;
use std::fs;
use std::path::PathBuf;
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GenerationRequest {
    pub model: String,
    pub prompt: String,
    pub temperature: f64,
    pub seed: Option<u64>,
    /// Not sent over the wire; replay generators key on it.
    #[serde(skip)]
    pub case_id: String,
    /// Number of earlier calls for this model and case in the current run.
    #[serde(skip)]
    pub call_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationResponse {
    pub text: String,
    #[serde(default)]
    pub input_tokens: u64,
    #[serde(default)]
    pub output_tokens: u64,
    /// Latency recorded alongside a replayed response. Live generators
    /// leave it unset and the runner measures wall-clock time instead.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_seconds: Option<f64>,
}

impl GenerationResponse {
    pub fn new(text: impl Into<String>, input_tokens: u64, output_tokens: u64) -> Self {
        Self {
            text: text.into(),
            input_tokens,
            output_tokens,
            elapsed_seconds: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeneratorError {
    /// Transport-level failure; the runner abandons the case.
    #[error("generator unreachable: {0}")]
    GeneratorUnreachable(String),
    #[error("invalid generator response: {0}")]
    InvalidResponse(String),
}

pub trait Generator: Sync {
    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResponse, GeneratorError>;
}

/// Serves recorded responses from `<dir>/<model>/<case_id>.jsonl`, one JSON
/// object per line. Call `k` gets line `k mod lines`.
#[derive(Debug)]
pub struct ReplayGenerator {
    dir: PathBuf,
    cache: Mutex<HashMap<PathBuf, Vec<GenerationResponse>>>,
}

impl ReplayGenerator {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            cache: Mutex::new(HashMap::new()),
        }
    }

    fn load(&self, path: &PathBuf) -> Result<Vec<GenerationResponse>, GeneratorError> {
        let text = fs::read_to_string(path).map_err(|e| {
            GeneratorError::GeneratorUnreachable(format!("{}: {e}", path.display()))
        })?;
        let responses = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .enumerate()
            .map(|(i, line)| {
                serde_json::from_str(line).map_err(|e| {
                    GeneratorError::InvalidResponse(format!("{}:{}: {e}", path.display(), i + 1))
                })
            })
            .collect::<Result<Vec<GenerationResponse>, _>>()?;
        if responses.is_empty() {
            return Err(GeneratorError::InvalidResponse(format!(
                "{}: no recorded responses",
                path.display()
            )));
        }
        Ok(responses)
    }
}

impl Generator for ReplayGenerator {
    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResponse, GeneratorError> {
        let path = self
            .dir
            .join(&request.model)
            .join(format!("{}.jsonl", request.case_id));
        let mut cache = self.cache.lock().expect("replay cache poisoned");
        if !cache.contains_key(&path) {
            let loaded = self.load(&path)?;
            cache.insert(path.clone(), loaded);
        }
        let responses = &cache[&path];
        Ok(responses[request.call_index % responses.len()].clone())
    }
}

/// POSTs `{model, prompt, temperature, seed}` as JSON and expects
/// `{text, input_tokens, output_tokens}` back. The API key, when present in
/// the named environment variable, is sent as a bearer token.
#[derive(Debug)]
pub struct HttpGenerator {
    endpoint: String,
    api_key_env: String,
    agent: ureq::Agent,
}

impl HttpGenerator {
    pub fn new(endpoint: impl Into<String>, api_key_env: impl Into<String>, timeout_seconds: f64) -> Self {
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_secs_f64(timeout_seconds))
            .build();
        Self {
            endpoint: endpoint.into(),
            api_key_env: api_key_env.into(),
            agent,
        }
    }
}

impl Generator for HttpGenerator {
    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResponse, GeneratorError> {
        let mut req = self
            .agent
            .post(&self.endpoint)
            .set("Content-Type", "application/json");
        if let Ok(key) = std::env::var(&self.api_key_env) {
            req = req.set("Authorization", &format!("Bearer {key}"));
        }
        let body = serde_json::to_value(request)
            .map_err(|e| GeneratorError::InvalidResponse(e.to_string()))?;
        match req.send_json(body) {
            Ok(resp) => {
                let mut parsed: GenerationResponse = resp
                    .into_json()
                    .map_err(|e| GeneratorError::InvalidResponse(e.to_string()))?;
                parsed.elapsed_seconds = None;
                Ok(parsed)
            }
            Err(ureq::Error::Status(code, _)) => Err(GeneratorError::InvalidResponse(format!(
                "endpoint returned HTTP {code}"
            ))),
            Err(ureq::Error::Transport(t)) => {
                Err(GeneratorError::GeneratorUnreachable(t.to_string()))
            }
        }
    }
}

/// Returns a fixed script of outcomes per model, cycling when exhausted.
/// Meant for tests and dry runs.
#[derive(Debug, Default)]
pub struct ScriptedGenerator {
    scripts: HashMap<String, Vec<Result<GenerationResponse, GeneratorError>>>,
    calls: Mutex<Vec<GenerationRequest>>,
}

impl ScriptedGenerator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_script(
        mut self,
        model: impl Into<String>,
        outcomes: Vec<Result<GenerationResponse, GeneratorError>>,
    ) -> Self {
        self.scripts.insert(model.into(), outcomes);
        self
    }

    /// Requests received so far, in order.
    pub fn calls(&self) -> Vec<GenerationRequest> {
        self.calls.lock().expect("call log poisoned").clone()
    }
}

impl Generator for ScriptedGenerator {
    fn generate(&self, request: &GenerationRequest) -> Result<GenerationResponse, GeneratorError> {
        self.calls
            .lock()
            .expect("call log poisoned")
            .push(request.clone());
        match self.scripts.get(&request.model) {
            Some(script) if !script.is_empty() => script[request.call_index % script.len()].clone(),
            _ => Err(GeneratorError::GeneratorUnreachable(format!(
                "no script for model `{}`",
                request.model
            ))),
        }
    }
}
