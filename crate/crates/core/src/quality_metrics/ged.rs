//! Weighted graph edit distance between process graphs.
//!
//! An edit script is induced by a partial node mapping from candidate to
//! gold: mapped nodes are kept (or substituted when kind or normalized label
//! differ), unmapped candidate nodes are deleted, unmapped gold nodes are
//! inserted, and flows are reconciled as multisets under the mapping.
//! [`ged_exact`] searches all mappings with A*; [`ged_approx`] evaluates the
//! mapping given by a [`NodeMatching`].

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bpmn_model::{normalize_label, NodeKind, ProcessGraph};
use crate::matching::NodeMatching;

pub const DEFAULT_NODE_BUDGET: usize = 12;

/// Hard ceiling on gold nodes for the exact search (used-set is a `u64`).
const MAX_EXACT_GOLD: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GedError {
    #[error("exact edit distance over {nodes} nodes exceeds the budget of {budget}")]
    BudgetExceeded { nodes: usize, budget: usize },
    #[error("edit costs must be finite and strictly positive: {0}")]
    InvalidCostModel(String),
}

/// Per-operation edit costs. The same model is applied in both directions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EditCostModel {
    pub node_insert: f64,
    pub node_delete: f64,
    pub node_substitute: f64,
    pub edge_insert: f64,
    pub edge_delete: f64,
}

impl Default for EditCostModel {
    fn default() -> Self {
        Self::uniform(1.0)
    }
}

impl EditCostModel {
    pub fn uniform(cost: f64) -> Self {
        Self {
            node_insert: cost,
            node_delete: cost,
            node_substitute: cost,
            edge_insert: cost,
            edge_delete: cost,
        }
    }

    pub fn validate(&self) -> Result<(), GedError> {
        let all = [
            ("node_insert", self.node_insert),
            ("node_delete", self.node_delete),
            ("node_substitute", self.node_substitute),
            ("edge_insert", self.edge_insert),
            ("edge_delete", self.edge_delete),
        ];
        for (name, v) in all {
            if !(v.is_finite() && v > 0.0) {
                return Err(GedError::InvalidCostModel(format!("{name} = {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EditOpKind {
    NodeInsert,
    NodeDelete,
    NodeSubstitute,
    EdgeInsert,
    EdgeDelete,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EditOp {
    pub kind: EditOpKind,
    /// Candidate-side element id (node or flow), if any.
    pub candidate: Option<String>,
    /// Gold-side element id (node or flow), if any.
    pub gold: Option<String>,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EditDistanceResult {
    pub distance: f64,
    pub script: Vec<EditOp>,
    /// True when `distance` is the minimum over all edit scripts.
    pub exact: bool,
}

impl EditDistanceResult {
    pub fn count(&self, kind: EditOpKind) -> usize {
        self.script.iter().filter(|op| op.kind == kind).count()
    }
}

/// Dense view of a graph used by both distance routines.
struct Dense {
    keys: Vec<(NodeKind, String)>,
    /// `adj[i][j]` = number of flows from node i to node j.
    adj: Vec<Vec<u32>>,
}

impl Dense {
    fn new(graph: &ProcessGraph) -> Self {
        let n = graph.node_count();
        let keys = graph
            .nodes()
            .iter()
            .map(|node| (node.kind, normalize_label(&node.label)))
            .collect();
        let mut adj = vec![vec![0u32; n]; n];
        for (s, t) in graph.edge_indices() {
            adj[s][t] += 1;
        }
        Self { keys, adj }
    }
}

/// Edit script induced by a candidate-index to gold-index mapping.
fn script_for_mapping(
    candidate: &ProcessGraph,
    gold: &ProcessGraph,
    costs: &EditCostModel,
    mapping: &[Option<usize>],
    exact: bool,
) -> EditDistanceResult {
    let cd = Dense::new(candidate);
    let gd = Dense::new(gold);
    let mut script = Vec::new();
    let mut in_image = vec![false; gold.node_count()];

    for (ci, image) in mapping.iter().enumerate() {
        let cid = &candidate.nodes()[ci].id;
        match *image {
            Some(gi) => {
                in_image[gi] = true;
                if cd.keys[ci] != gd.keys[gi] {
                    script.push(EditOp {
                        kind: EditOpKind::NodeSubstitute,
                        candidate: Some(cid.clone()),
                        gold: Some(gold.nodes()[gi].id.clone()),
                        cost: costs.node_substitute,
                    });
                }
            }
            None => script.push(EditOp {
                kind: EditOpKind::NodeDelete,
                candidate: Some(cid.clone()),
                gold: None,
                cost: costs.node_delete,
            }),
        }
    }
    for (gi, node) in gold.nodes().iter().enumerate() {
        if !in_image[gi] {
            script.push(EditOp {
                kind: EditOpKind::NodeInsert,
                candidate: None,
                gold: Some(node.id.clone()),
                cost: costs.node_insert,
            });
        }
    }

    // Gold flows keyed by endpoints; candidate flows consume them in order.
    let mut gold_flows: HashMap<(usize, usize), Vec<&str>> = HashMap::new();
    for (flow, (s, t)) in gold.flows().iter().zip(gold.edge_indices()) {
        gold_flows.entry((s, t)).or_default().push(flow.id.as_str());
    }
    for v in gold_flows.values_mut() {
        v.reverse();
    }
    for (flow, (s, t)) in candidate.flows().iter().zip(candidate.edge_indices()) {
        let kept = match (mapping[s], mapping[t]) {
            (Some(gs), Some(gt)) => gold_flows.get_mut(&(gs, gt)).and_then(Vec::pop),
            _ => None,
        };
        if kept.is_none() {
            script.push(EditOp {
                kind: EditOpKind::EdgeDelete,
                candidate: Some(flow.id.clone()),
                gold: None,
                cost: costs.edge_delete,
            });
        }
    }
    let mut remaining: Vec<&str> = gold_flows.into_values().flatten().collect();
    // Report inserts in gold document order.
    let order: HashMap<&str, usize> = gold
        .flows()
        .iter()
        .enumerate()
        .map(|(i, f)| (f.id.as_str(), i))
        .collect();
    remaining.sort_by_key(|id| order[id]);
    for id in remaining {
        script.push(EditOp {
            kind: EditOpKind::EdgeInsert,
            candidate: None,
            gold: Some(id.to_string()),
            cost: costs.edge_insert,
        });
    }

    let distance = script.iter().fold(0.0, |acc, op| acc + op.cost);
    EditDistanceResult {
        distance,
        script,
        exact,
    }
}

#[derive(Debug)]
struct SearchNode {
    f: f64,
    g: f64,
    depth: usize,
    seq: u64,
    complete: bool,
    /// Images of the first `depth` candidate nodes in search order.
    images: Vec<Option<u8>>,
    used: u64,
}

impl PartialEq for SearchNode {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for SearchNode {}

impl PartialOrd for SearchNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SearchNode {
    // BinaryHeap is a max-heap: smaller f is "greater"; deeper first on ties.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| self.complete.cmp(&other.complete))
            .then_with(|| self.depth.cmp(&other.depth))
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

struct Search<'a> {
    cd: Dense,
    gd: Dense,
    costs: &'a EditCostModel,
    /// Candidate node indices in the order they are assigned.
    order: Vec<usize>,
    gold_edges: Vec<(usize, usize)>,
    cand_edges: Vec<(usize, usize)>,
}

impl Search<'_> {
    fn edge_term(&self, c_count: u32, g_count: u32) -> f64 {
        match c_count.cmp(&g_count) {
            Ordering::Greater => (c_count - g_count) as f64 * self.costs.edge_delete,
            Ordering::Less => (g_count - c_count) as f64 * self.costs.edge_insert,
            Ordering::Equal => 0.0,
        }
    }

    /// Cost added by assigning the candidate node at position `depth` to `image`.
    fn step_cost(&self, images: &[Option<u8>], depth: usize, image: Option<usize>) -> f64 {
        let u = self.order[depth];
        let mut cost = match image {
            Some(v) if self.cd.keys[u] != self.gd.keys[v] => self.costs.node_substitute,
            Some(_) => 0.0,
            None => self.costs.node_delete,
        };
        let image_of = |pos: usize| -> Option<usize> {
            if pos == depth {
                image
            } else {
                images[pos].map(usize::from)
            }
        };
        for pos in 0..=depth {
            let w = self.order[pos];
            let xw = image_of(pos);
            let directions = [
                (u, w, image.zip(xw)),
                (w, u, xw.zip(image)),
            ];
            let take = if pos == depth { 1 } else { 2 };
            for &(a, b, g) in &directions[..take] {
                let c_count = self.cd.adj[a][b];
                let g_count = g.map_or(0, |(ga, gb)| self.gd.adj[ga][gb]);
                cost += self.edge_term(c_count, g_count);
            }
        }
        cost
    }

    /// Cost of inserting every gold node and flow not covered by the mapping.
    fn completion_cost(&self, used: u64) -> f64 {
        let unused_nodes = self.gd.keys.len() - used.count_ones() as usize;
        let open_edges = self
            .gold_edges
            .iter()
            .filter(|&&(s, t)| used & (1 << s) == 0 || used & (1 << t) == 0)
            .count();
        unused_nodes as f64 * self.costs.node_insert + open_edges as f64 * self.costs.edge_insert
    }

    /// Admissible lower bound on the cost of completing a partial mapping.
    fn heuristic(&self, depth: usize, used: u64) -> f64 {
        let remaining = &self.order[depth..];
        let r = remaining.len();
        let free_gold: Vec<usize> = (0..self.gd.keys.len())
            .filter(|&v| used & (1 << v) == 0)
            .collect();
        let s = free_gold.len();

        // Pairs that could be kept without substitution.
        let mut key_counts: HashMap<&(NodeKind, String), i64> = HashMap::new();
        for &v in &free_gold {
            *key_counts.entry(&self.gd.keys[v]).or_default() += 1;
        }
        let mut identical = 0usize;
        for &u in remaining {
            if let Some(c) = key_counts.get_mut(&self.cd.keys[u]) {
                if *c > 0 {
                    *c -= 1;
                    identical += 1;
                }
            }
        }
        let c = self.costs;
        let node_lb = (0..=r.min(s))
            .map(|p| {
                (r - p) as f64 * c.node_delete
                    + (s - p) as f64 * c.node_insert
                    + p.saturating_sub(identical) as f64 * c.node_substitute
            })
            .fold(f64::INFINITY, f64::min);

        let mut pending = vec![false; self.cd.keys.len()];
        for &u in remaining {
            pending[u] = true;
        }
        let cand_open = self
            .cand_edges
            .iter()
            .filter(|&&(a, b)| pending[a] || pending[b])
            .count() as u32;
        let gold_open = self
            .gold_edges
            .iter()
            .filter(|&&(a, b)| used & (1 << a) == 0 || used & (1 << b) == 0)
            .count() as u32;
        node_lb + self.edge_term(cand_open, gold_open)
    }
}

/// Exact minimum-cost edit distance by A* over partial node assignments.
///
/// Fails with [`GedError::BudgetExceeded`] when the two graphs together have
/// more than `node_budget` nodes.
pub fn ged_exact(
    candidate: &ProcessGraph,
    gold: &ProcessGraph,
    costs: &EditCostModel,
    node_budget: usize,
) -> Result<EditDistanceResult, GedError> {
    costs.validate()?;
    let total = candidate.node_count() + gold.node_count();
    if total > node_budget || gold.node_count() > MAX_EXACT_GOLD {
        return Err(GedError::BudgetExceeded {
            nodes: total,
            budget: node_budget.min(MAX_EXACT_GOLD),
        });
    }
    let cd = Dense::new(candidate);
    let gd = Dense::new(gold);
    let mut order: Vec<usize> = (0..candidate.node_count()).collect();
    let degree = |i: usize| -> u32 {
        cd.adj[i].iter().sum::<u32>() + cd.adj.iter().map(|row| row[i]).sum::<u32>()
    };
    order.sort_by_key(|&i| (std::cmp::Reverse(degree(i)), i));
    let search = Search {
        cd,
        gd,
        costs,
        order,
        gold_edges: gold.edge_indices(),
        cand_edges: candidate.edge_indices(),
    };
    let n = candidate.node_count();
    let m = gold.node_count();

    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    let root = if n == 0 {
        let g = search.completion_cost(0);
        SearchNode {
            f: g,
            g,
            depth: 0,
            seq,
            complete: true,
            images: Vec::new(),
            used: 0,
        }
    } else {
        SearchNode {
            f: search.heuristic(0, 0),
            g: 0.0,
            depth: 0,
            seq,
            complete: false,
            images: Vec::new(),
            used: 0,
        }
    };
    heap.push(root);

    let best = loop {
        let node = heap.pop().expect("search space always contains a complete mapping");
        if node.complete {
            break node;
        }
        let depth = node.depth;
        let options = (0..m)
            .filter(|&v| node.used & (1 << v) == 0)
            .map(Some)
            .chain(std::iter::once(None));
        for image in options {
            let mut g = node.g + search.step_cost(&node.images, depth, image);
            let used = image.map_or(node.used, |v| node.used | (1 << v));
            let mut images = node.images.clone();
            images.push(image.map(|v| v as u8));
            let next_depth = depth + 1;
            let (f, complete) = if next_depth == n {
                g += search.completion_cost(used);
                (g, true)
            } else {
                (g + search.heuristic(next_depth, used), false)
            };
            seq += 1;
            heap.push(SearchNode {
                f,
                g,
                depth: next_depth,
                seq,
                complete,
                images,
                used,
            });
        }
    };

    let mut mapping = vec![None; n];
    for (pos, image) in best.images.iter().enumerate() {
        mapping[search.order[pos]] = image.map(usize::from);
    }
    let result = script_for_mapping(candidate, gold, costs, &mapping, true);
    debug_assert!((result.distance - best.g).abs() <= 1e-9 * best.g.max(1.0));
    Ok(result)
}

/// Upper bound on the edit distance induced by a node matching.
pub fn ged_approx(
    candidate: &ProcessGraph,
    gold: &ProcessGraph,
    costs: &EditCostModel,
    matching: &NodeMatching,
) -> EditDistanceResult {
    let mapping: Vec<Option<usize>> = candidate
        .nodes()
        .iter()
        .map(|node| {
            matching
                .gold_for(&node.id)
                .and_then(|gid| gold.node_index(gid))
        })
        .collect();
    script_for_mapping(candidate, gold, costs, &mapping, false)
}

/// Cost of deleting the whole candidate and inserting the whole gold model.
pub fn worst_case_distance(
    candidate: &ProcessGraph,
    gold: &ProcessGraph,
    costs: &EditCostModel,
) -> f64 {
    candidate.node_count() as f64 * costs.node_delete
        + candidate.flows().len() as f64 * costs.edge_delete
        + gold.node_count() as f64 * costs.node_insert
        + gold.flows().len() as f64 * costs.edge_insert
}

/// `1 - distance / worst_case`, clamped to `[0, 1]`; two empty graphs give 1.
pub fn ged_similarity(
    result: &EditDistanceResult,
    candidate: &ProcessGraph,
    gold: &ProcessGraph,
    costs: &EditCostModel,
) -> f64 {
    let worst = worst_case_distance(candidate, gold, costs);
    if worst <= 0.0 {
        return 1.0;
    }
    (1.0 - result.distance / worst).clamp(0.0, 1.0)
}
