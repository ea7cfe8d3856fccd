//! The full metric pipeline for one candidate against one gold model.

use serde::Serialize;

use super::config::EvalConfig;
use crate::behavior::{
    behavioral_f1, behavioral_precision, behavioral_recall, enumerate_traces_with, BehaviorError,
    TraceSet,
};
use crate::bpmn_model::{validate_syntax, ProcessGraph};
use crate::matching::compute_node_matching;
use crate::quality_metrics::{
    concept_precision_recall, ged_approx, ged_exact, ged_similarity, quality_score, GedError,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricComponents {
    pub matched_nodes: usize,
    pub precision: f64,
    pub recall: f64,
    pub concept_f1: f64,
    pub ged_distance: f64,
    /// False when the graphs exceeded the node budget and the
    /// matching-induced upper bound was used.
    pub ged_exact: bool,
    pub ged_similarity: f64,
    pub behavioral_recall: f64,
    pub behavioral_precision: f64,
    pub behavioral_f1: f64,
    pub candidate_traces: usize,
    pub gold_traces: usize,
    pub traces_truncated: bool,
    pub candidate_deadlocks: usize,
    pub quality: f64,
    pub candidate_deficits: usize,
    pub diagnostics: Vec<String>,
}

fn traces(
    graph: &ProcessGraph,
    config: &EvalConfig,
    side: &str,
    diagnostics: &mut Vec<String>,
) -> Option<TraceSet> {
    match enumerate_traces_with(graph, &config.bounds) {
        Ok(set) => {
            if set.state_limit_reached {
                diagnostics.push(format!("{side} trace enumeration hit the state limit"));
            } else if set.truncated {
                diagnostics.push(format!("{side} trace enumeration hit its bounds"));
            }
            Some(set)
        }
        Err(BehaviorError::NoStartEvent) => {
            diagnostics.push(format!(
                "{side} model has no start event; behavioral component set to 0"
            ));
            None
        }
        Err(e) => {
            diagnostics.push(format!("{side} trace enumeration failed: {e}"));
            None
        }
    }
}

/// Match, then score concepts, structure and behavior, and combine.
pub fn evaluate_candidate(
    candidate: &ProcessGraph,
    gold: &ProcessGraph,
    config: &EvalConfig,
) -> MetricComponents {
    let mut diagnostics = Vec::new();
    let syntax = validate_syntax(candidate);
    if !syntax.is_clean() {
        diagnostics.push(format!(
            "candidate has {} syntax deficit(s)",
            syntax.deficit_count
        ));
    }

    let matching = compute_node_matching(candidate, gold, config.threshold);
    let pr = concept_precision_recall(&matching, candidate, gold);

    let ged = match ged_exact(candidate, gold, &config.costs, config.node_budget) {
        Ok(result) => result,
        Err(GedError::BudgetExceeded { .. }) => {
            ged_approx(candidate, gold, &config.costs, &matching)
        }
        Err(e) => {
            diagnostics.push(format!("edit distance failed: {e}"));
            ged_approx(candidate, gold, &config.costs, &matching)
        }
    };
    let ged_sim = ged_similarity(&ged, candidate, gold, &config.costs);

    let cand_traces = traces(candidate, config, "candidate", &mut diagnostics);
    let gold_traces = traces(gold, config, "gold", &mut diagnostics);
    let (b_recall, b_precision, b_f1) = match (&cand_traces, &gold_traces) {
        (Some(c), Some(g)) => {
            let r = behavioral_recall(c, g, &matching);
            let p = behavioral_precision(c, g, &matching);
            (r, p, behavioral_f1(r, p))
        }
        _ => (0.0, 0.0, 0.0),
    };

    let quality = quality_score(&pr, ged_sim, b_f1, &config.weights);
    MetricComponents {
        matched_nodes: matching.len(),
        precision: pr.precision,
        recall: pr.recall,
        concept_f1: pr.f1,
        ged_distance: ged.distance,
        ged_exact: ged.exact,
        ged_similarity: ged_sim,
        behavioral_recall: b_recall,
        behavioral_precision: b_precision,
        behavioral_f1: b_f1,
        candidate_traces: cand_traces.as_ref().map_or(0, TraceSet::len),
        gold_traces: gold_traces.as_ref().map_or(0, TraceSet::len),
        traces_truncated: cand_traces.as_ref().is_some_and(|t| t.truncated)
            || gold_traces.as_ref().is_some_and(|t| t.truncated),
        candidate_deadlocks: cand_traces.as_ref().map_or(0, |t| t.deadlocks),
        quality,
        candidate_deficits: syntax.deficit_count,
        diagnostics,
    }
}
