//! Variable generation cost and aggregation of repeated runs.

use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenUsage {
    pub input_tokens: u64,
    pub output_tokens: u64,
    pub api_calls: u64,
}

impl TokenUsage {
    pub fn new(input_tokens: u64, output_tokens: u64, api_calls: u64) -> Self {
        Self {
            input_tokens,
            output_tokens,
            api_calls,
        }
    }

    /// Usage of one API call.
    pub fn single_call(input_tokens: u64, output_tokens: u64) -> Self {
        Self::new(input_tokens, output_tokens, 1)
    }

    /// Tokens without an API call cannot be billed.
    pub fn is_consistent(&self) -> bool {
        self.input_tokens + self.output_tokens == 0 || self.api_calls >= 1
    }

    pub fn scaled(&self, factor: u64) -> Self {
        Self::new(
            self.input_tokens * factor,
            self.output_tokens * factor,
            self.api_calls * factor,
        )
    }
}

impl Add for TokenUsage {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self::new(
            self.input_tokens + rhs.input_tokens,
            self.output_tokens + rhs.output_tokens,
            self.api_calls + rhs.api_calls,
        )
    }
}

impl AddAssign for TokenUsage {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// Prices of one model, in US dollars.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PricingEntry {
    pub model_name: String,
    pub usd_per_million_input: f64,
    pub usd_per_million_output: f64,
    pub usd_per_call: f64,
}

impl PricingEntry {
    pub fn free(model_name: impl Into<String>) -> Self {
        Self {
            model_name: model_name.into(),
            usd_per_million_input: 0.0,
            usd_per_million_output: 0.0,
            usd_per_call: 0.0,
        }
    }
}

/// Variable cost in USD of the given usage.
pub fn compute_cost(usage: &TokenUsage, pricing: &PricingEntry) -> f64 {
    usage.input_tokens as f64 / 1e6 * pricing.usd_per_million_input
        + usage.output_tokens as f64 / 1e6 * pricing.usd_per_million_output
        + usage.api_calls as f64 * pricing.usd_per_call
}

/// Outcome of one successful generation on the three compared dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricPoint {
    pub quality: f64,
    pub time_seconds: f64,
    pub cost_usd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DimensionStats {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single sample.
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl DimensionStats {
    fn of(values: impl Iterator<Item = f64> + Clone) -> Self {
        let n = values.clone().count() as f64;
        let mean = values.clone().sum::<f64>() / n;
        let (min, max) = values
            .clone()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                (lo.min(v), hi.max(v))
            });
        let std = if n > 1.0 {
            (values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        // Keep min <= mean <= max despite rounding.
        Self {
            mean: mean.clamp(min, max),
            std,
            min,
            max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunStats {
    pub quality: DimensionStats,
    pub time_seconds: DimensionStats,
    pub cost_usd: DimensionStats,
    pub n: usize,
}

impl RunStats {
    /// The mean of each dimension as a point.
    pub fn mean_point(&self) -> MetricPoint {
        MetricPoint {
            quality: self.quality.mean,
            time_seconds: self.time_seconds.mean,
            cost_usd: self.cost_usd.mean,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EconomicsError {
    #[error("cannot aggregate an empty sample")]
    EmptySample,
}

pub fn aggregate_runs(points: &[MetricPoint]) -> Result<RunStats, EconomicsError> {
    if points.is_empty() {
        return Err(EconomicsError::EmptySample);
    }
    Ok(RunStats {
        quality: DimensionStats::of(points.iter().map(|p| p.quality)),
        time_seconds: DimensionStats::of(points.iter().map(|p| p.time_seconds)),
        cost_usd: DimensionStats::of(points.iter().map(|p| p.cost_usd)),
        n: points.len(),
    })
}
