//! Token-game semantics for process graphs and trace-based comparison.
//!
//! Tokens live on sequence flows. Start events emit one token on each of
//! their outgoing flows when a run begins. Tasks, events and exclusive
//! gateways consume a single token from any incoming flow; tasks and events
//! then emit on every outgoing flow while an exclusive gateway picks exactly
//! one. A parallel gateway fires once each incoming flow holds a token and
//! emits on every outgoing flow. A run completes when no token is left and
//! at least one end event consumed a token; only tasks contribute to the
//! trace.
//!
//! Every node fires at most `loop_bound + 1` times per run. Runs cut short by
//! a bound are dropped and flag the resulting [`TraceSet`] as truncated.
//! Exploration also stops after `max_states` distinct states, which keeps
//! highly concurrent cyclic models from exhausting memory.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bpmn_model::{normalize_label, NodeKind, ProcessGraph};
use crate::matching::NodeMatching;
use crate::quality_metrics::harmonic_mean;

/// An execution path: normalized labels of the tasks fired, in order.
pub type Trace = Vec<String>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceBounds {
    pub loop_bound: usize,
    pub max_traces: usize,
    pub max_len: usize,
    pub token_cap: usize,
    /// Distinct execution states explored before giving up.
    pub max_states: usize,
}

impl Default for TraceBounds {
    fn default() -> Self {
        Self {
            loop_bound: 1,
            max_traces: 10_000,
            max_len: 64,
            token_cap: 64,
            max_states: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BehaviorError {
    #[error("process has no start event")]
    NoStartEvent,
    #[error("invalid trace bounds: {0}")]
    InvalidBounds(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct TraceSet {
    pub traces: BTreeSet<Trace>,
    /// True if some run was cut by a bound, so `traces` may be incomplete.
    pub truncated: bool,
    /// Distinct reachable states in which tokens are stuck or the run ended
    /// without reaching an end event.
    pub deadlocks: usize,
    /// True if exploration stopped at `max_states`.
    pub state_limit_reached: bool,
}

impl TraceSet {
    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn contains(&self, trace: &[&str]) -> bool {
        let owned: Trace = trace.iter().map(|s| s.to_string()).collect();
        self.traces.contains(&owned)
    }
}

/// Marking plus per-run bookkeeping; parallel joins need no extra state
/// because they read the marking of every incoming flow.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct ExecutionState {
    /// Tokens per flow index.
    marking: Vec<u16>,
    /// Firings per node index.
    fired: Vec<u16>,
    end_reached: bool,
    /// Task node indices fired so far.
    trace: Vec<u32>,
}

impl ExecutionState {
    fn tokens(&self) -> usize {
        self.marking.iter().map(|&t| t as usize).sum()
    }
}

struct Net {
    kinds: Vec<NodeKind>,
    labels: Vec<String>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
    flow_count: usize,
}

impl Net {
    fn new(graph: &ProcessGraph) -> Self {
        let n = graph.node_count();
        let mut incoming = vec![Vec::new(); n];
        let mut outgoing = vec![Vec::new(); n];
        for (f, (s, t)) in graph.edge_indices().into_iter().enumerate() {
            outgoing[s].push(f);
            incoming[t].push(f);
        }
        Self {
            kinds: graph.nodes().iter().map(|node| node.kind).collect(),
            labels: graph
                .nodes()
                .iter()
                .map(|node| normalize_label(&node.label))
                .collect(),
            incoming,
            outgoing,
            flow_count: graph.flows().len(),
        }
    }

    /// Successor states by firing `node`, ignoring bounds.
    fn fire(&self, state: &ExecutionState, node: usize, out: &mut Vec<ExecutionState>) {
        let kind = self.kinds[node];
        let emit_all = |s: &mut ExecutionState| {
            for &o in &self.outgoing[node] {
                s.marking[o] += 1;
            }
        };
        if kind == NodeKind::ParallelGateway {
            let inc = &self.incoming[node];
            if inc.is_empty() || inc.iter().any(|&f| state.marking[f] == 0) {
                return;
            }
            let mut next = state.clone();
            for &f in inc {
                next.marking[f] -= 1;
            }
            next.fired[node] += 1;
            emit_all(&mut next);
            out.push(next);
            return;
        }
        for &f in &self.incoming[node] {
            if state.marking[f] == 0 {
                continue;
            }
            let mut next = state.clone();
            next.marking[f] -= 1;
            next.fired[node] += 1;
            match kind {
                NodeKind::ExclusiveGateway => {
                    for &o in &self.outgoing[node] {
                        let mut branch = next.clone();
                        branch.marking[o] += 1;
                        out.push(branch);
                    }
                    if self.outgoing[node].is_empty() {
                        out.push(next);
                    }
                }
                NodeKind::Task => {
                    next.trace.push(node as u32);
                    emit_all(&mut next);
                    out.push(next);
                }
                NodeKind::EndEvent => {
                    next.end_reached = true;
                    emit_all(&mut next);
                    out.push(next);
                }
                NodeKind::StartEvent => {
                    emit_all(&mut next);
                    out.push(next);
                }
                NodeKind::ParallelGateway => unreachable!(),
            }
        }
    }

    fn labels_of(&self, trace: &[u32]) -> Trace {
        trace
            .iter()
            .map(|&i| self.labels[i as usize].clone())
            .collect()
    }
}

/// Enumerate traces with the default token cap.
pub fn enumerate_traces(
    graph: &ProcessGraph,
    loop_bound: usize,
    max_traces: usize,
    max_len: usize,
) -> Result<TraceSet, BehaviorError> {
    enumerate_traces_with(
        graph,
        &TraceBounds {
            loop_bound,
            max_traces,
            max_len,
            ..TraceBounds::default()
        },
    )
}

/// Exhaustive depth-first exploration of the token game under `bounds`.
pub fn enumerate_traces_with(
    graph: &ProcessGraph,
    bounds: &TraceBounds,
) -> Result<TraceSet, BehaviorError> {
    if bounds.max_traces == 0 {
        return Err(BehaviorError::InvalidBounds("max_traces must be at least 1"));
    }
    if bounds.max_len == 0 {
        return Err(BehaviorError::InvalidBounds("max_len must be at least 1"));
    }
    if bounds.max_states == 0 {
        return Err(BehaviorError::InvalidBounds("max_states must be at least 1"));
    }
    let starts: Vec<usize> = graph
        .nodes()
        .iter()
        .enumerate()
        .filter(|(_, node)| node.kind == NodeKind::StartEvent)
        .map(|(i, _)| i)
        .collect();
    if starts.is_empty() {
        return Err(BehaviorError::NoStartEvent);
    }
    let net = Net::new(graph);
    let max_fire = bounds.loop_bound.saturating_add(1).min(u16::MAX as usize) as u16;

    let mut initial = ExecutionState {
        marking: vec![0; net.flow_count],
        fired: vec![0; graph.node_count()],
        end_reached: false,
        trace: Vec::new(),
    };
    for &s in &starts {
        initial.fired[s] = 1;
        for &o in &net.outgoing[s] {
            initial.marking[o] += 1;
        }
    }

    let mut result = TraceSet::default();
    if initial.tokens() > bounds.token_cap {
        result.truncated = true;
        return Ok(result);
    }
    let mut visited: HashSet<ExecutionState> = HashSet::new();
    let mut stack = vec![initial];
    let mut successors = Vec::new();
    while let Some(state) = stack.pop() {
        if !visited.insert(state.clone()) {
            continue;
        }
        if visited.len() > bounds.max_states {
            result.truncated = true;
            result.state_limit_reached = true;
            break;
        }
        let mut progressed = false;
        let mut cut = false;
        for node in 0..net.kinds.len() {
            successors.clear();
            net.fire(&state, node, &mut successors);
            if successors.is_empty() {
                continue;
            }
            progressed = true;
            if state.fired[node] >= max_fire {
                cut = true;
                continue;
            }
            for next in successors.drain(..) {
                if next.trace.len() > bounds.max_len || next.tokens() > bounds.token_cap {
                    cut = true;
                } else if !visited.contains(&next) {
                    stack.push(next);
                }
            }
        }
        if cut {
            result.truncated = true;
        }
        if progressed {
            continue;
        }
        if state.tokens() == 0 && state.end_reached {
            let trace = net.labels_of(&state.trace);
            if !result.traces.contains(&trace) {
                if result.traces.len() == bounds.max_traces {
                    result.truncated = true;
                    break;
                }
                result.traces.insert(trace);
            }
        } else {
            result.deadlocks += 1;
        }
    }
    Ok(result)
}

/// Marker for candidate labels with no gold counterpart; cannot collide with
/// a normalized label.
const UNMATCHED: &str = "\u{0}unmatched:";

/// Rewrite candidate traces into the gold vocabulary through the matched
/// task pairs. When one candidate label is matched to several gold labels the
/// highest-scoring pair wins.
fn rewrite(candidate: &TraceSet, matching: &NodeMatching) -> BTreeSet<Trace> {
    let mut map: HashMap<&str, (&str, f64)> = HashMap::new();
    for p in matching.pairs().iter().filter(|p| p.kind == NodeKind::Task) {
        let entry = map
            .entry(p.candidate_label.as_str())
            .or_insert((p.gold_label.as_str(), p.score));
        if p.score > entry.1 {
            *entry = (p.gold_label.as_str(), p.score);
        }
    }
    candidate
        .traces
        .iter()
        .map(|trace| {
            trace
                .iter()
                .map(|label| match map.get(label.as_str()) {
                    Some((gold, _)) => gold.to_string(),
                    None => format!("{UNMATCHED}{label}"),
                })
                .collect()
        })
        .collect()
}

/// Share of gold traces the candidate can reproduce; 1 for an empty gold set.
pub fn behavioral_recall(
    candidate_traces: &TraceSet,
    gold_traces: &TraceSet,
    matching: &NodeMatching,
) -> f64 {
    if gold_traces.is_empty() {
        return 1.0;
    }
    let rewritten = rewrite(candidate_traces, matching);
    let common = gold_traces.traces.intersection(&rewritten).count();
    common as f64 / gold_traces.len() as f64
}

/// Share of candidate traces allowed by the gold model; 0 for an empty
/// candidate set.
pub fn behavioral_precision(
    candidate_traces: &TraceSet,
    gold_traces: &TraceSet,
    matching: &NodeMatching,
) -> f64 {
    let rewritten = rewrite(candidate_traces, matching);
    if rewritten.is_empty() {
        return 0.0;
    }
    let common = gold_traces.traces.intersection(&rewritten).count();
    common as f64 / rewritten.len() as f64
}

pub fn behavioral_f1(recall: f64, precision: f64) -> f64 {
    harmonic_mean(recall, precision)
}
