//! Structural quality measures of a candidate model against a gold model:
//! concept precision/recall over matched nodes, weighted graph edit
//! distance, and the scalar quality score that combines them with the
//! behavioral F1.

mod ged;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bpmn_model::ProcessGraph;
use crate::matching::NodeMatching;

pub use ged::{
    ged_approx, ged_exact, ged_similarity, EditCostModel, EditDistanceResult, EditOp, EditOpKind,
    GedError, DEFAULT_NODE_BUDGET,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrecisionRecall {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PrecisionRecall {
    pub fn new(precision: f64, recall: f64) -> Self {
        Self {
            precision,
            recall,
            f1: harmonic_mean(precision, recall),
        }
    }
}

/// Harmonic mean of two rates; 0 when both are 0.
pub fn harmonic_mean(a: f64, b: f64) -> f64 {
    if a + b <= 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

/// Node-level precision and recall. Flows are not concepts here; the edit
/// distance accounts for them.
pub fn concept_precision_recall(
    matching: &NodeMatching,
    candidate: &ProcessGraph,
    gold: &ProcessGraph,
) -> PrecisionRecall {
    let matched = matching.len() as f64;
    let ratio = |total: usize| {
        if total == 0 {
            0.0
        } else {
            matched / total as f64
        }
    };
    PrecisionRecall::new(ratio(candidate.node_count()), ratio(gold.node_count()))
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("quality weights must be non-negative and sum to 1 (got {pr}, {ged}, {behavior})")]
pub struct InvalidWeights {
    pub pr: f64,
    pub ged: f64,
    pub behavior: f64,
}

/// Convex weights for the three quality components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityWeights {
    pr: f64,
    ged: f64,
    behavior: f64,
}

impl QualityWeights {
    pub fn new(pr: f64, ged: f64, behavior: f64) -> Result<Self, InvalidWeights> {
        let ok = [pr, ged, behavior]
            .iter()
            .all(|w| w.is_finite() && *w >= 0.0)
            && (pr + ged + behavior - 1.0).abs() <= 1e-9;
        if ok {
            Ok(Self { pr, ged, behavior })
        } else {
            Err(InvalidWeights { pr, ged, behavior })
        }
    }

    pub fn pr(&self) -> f64 {
        self.pr
    }

    pub fn ged(&self) -> f64 {
        self.ged
    }

    pub fn behavior(&self) -> f64 {
        self.behavior
    }
}

impl Default for QualityWeights {
    fn default() -> Self {
        Self {
            pr: 1.0 / 3.0,
            ged: 1.0 / 3.0,
            behavior: 1.0 / 3.0,
        }
    }
}

/// Weighted sum of concept F1, edit-distance similarity and behavioral F1.
pub fn quality_score(
    pr: &PrecisionRecall,
    ged_sim: f64,
    behavior_f1: f64,
    weights: &QualityWeights,
) -> f64 {
    let q = weights.pr * pr.f1 + weights.ged * ged_sim + weights.behavior * behavior_f1;
    q.clamp(0.0, 1.0)
}
