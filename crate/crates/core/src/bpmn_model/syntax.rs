use std::collections::VecDeque;
use std::fmt;

use serde::Serialize;

use super::{NodeKind, ProcessGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ViolationKind {
    NoStartEvent,
    NoEndEvent,
    /// Not reachable from any start event.
    UnreachableNode,
    /// Non-end node without outgoing flow.
    DeadEndNode,
    /// Gateway with at most one incoming and at most one outgoing flow.
    GatewayDegenerate,
    StartHasIncoming,
    EndHasOutgoing,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    /// Offending node id; empty for graph-level violations.
    pub element: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct SyntaxReport {
    pub violations: Vec<Violation>,
    pub deficit_count: usize,
}

impl SyntaxReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

/// Count syntactic deficits. Graph-level rules come first, then per-node
/// rules in document order.
pub fn validate_syntax(graph: &ProcessGraph) -> SyntaxReport {
    let n = graph.node_count();
    let mut indegree = vec![0usize; n];
    let mut outdegree = vec![0usize; n];
    let mut successors = vec![Vec::new(); n];
    for (s, t) in graph.edge_indices() {
        outdegree[s] += 1;
        indegree[t] += 1;
        successors[s].push(t);
    }

    let mut reachable = vec![false; n];
    let mut queue: VecDeque<usize> = graph
        .nodes()
        .iter()
        .enumerate()
        .filter(|(_, node)| node.kind == NodeKind::StartEvent)
        .map(|(i, _)| i)
        .collect();
    for &i in &queue {
        reachable[i] = true;
    }
    while let Some(i) = queue.pop_front() {
        for &j in &successors[i] {
            if !reachable[j] {
                reachable[j] = true;
                queue.push_back(j);
            }
        }
    }

    let mut violations = Vec::new();
    let mut push = |kind, element: &str, message: String| {
        violations.push(Violation {
            kind,
            element: element.to_string(),
            message,
        })
    };
    if graph.nodes_of_kind(NodeKind::StartEvent).next().is_none() {
        push(ViolationKind::NoStartEvent, "", "process has no start event".into());
    }
    if graph.nodes_of_kind(NodeKind::EndEvent).next().is_none() {
        push(ViolationKind::NoEndEvent, "", "process has no end event".into());
    }
    for (i, node) in graph.nodes().iter().enumerate() {
        let id = node.id.as_str();
        if !reachable[i] {
            push(
                ViolationKind::UnreachableNode,
                id,
                format!("{} `{id}` is not reachable from a start event", node.kind),
            );
        }
        if node.kind != NodeKind::EndEvent && outdegree[i] == 0 {
            push(
                ViolationKind::DeadEndNode,
                id,
                format!("{} `{id}` has no outgoing flow", node.kind),
            );
        }
        if node.kind.is_gateway() && indegree[i] <= 1 && outdegree[i] <= 1 {
            push(
                ViolationKind::GatewayDegenerate,
                id,
                format!("gateway `{id}` neither splits nor joins"),
            );
        }
        if node.kind == NodeKind::StartEvent && indegree[i] > 0 {
            push(
                ViolationKind::StartHasIncoming,
                id,
                format!("start event `{id}` has {} incoming flow(s)", indegree[i]),
            );
        }
        if node.kind == NodeKind::EndEvent && outdegree[i] > 0 {
            push(
                ViolationKind::EndHasOutgoing,
                id,
                format!("end event `{id}` has {} outgoing flow(s)", outdegree[i]),
            );
        }
    }
    let deficit_count = violations.len();
    SyntaxReport {
        violations,
        deficit_count,
    }
}
