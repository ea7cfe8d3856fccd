//! Optimal partial node correspondence between a candidate and a gold model.
//!
//! Nodes are compared only within their kind (tasks with tasks, each gateway
//! kind with itself, start with start, end with end). Within each kind the
//! pairwise similarity matrix is solved as a maximum-weight assignment, with
//! sub-threshold pairs forbidden. Among equally good matchings the one whose
//! pair list, sorted by candidate id, is lexicographically smallest wins.

use std::collections::{BTreeSet, HashMap, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::assignment::max_weight_assignment;
use crate::bpmn_model::{normalize_label, NodeKind, ProcessGraph};

pub const DEFAULT_THRESHOLD: f64 = 0.5;

const TIE_EPS: f64 = 1e-9;

/// Text similarity between two normalized labels, in `[0, 1]`.
///
/// Implementations must be symmetric.
pub trait LabelSimilarity {
    fn similarity(&self, a: &str, b: &str) -> f64;
}

/// Maximum of token-set Jaccard and normalized Levenshtein similarity.
#[derive(Debug, Clone, Copy, Default)]
pub struct TokenEditSimilarity;

impl LabelSimilarity for TokenEditSimilarity {
    fn similarity(&self, a: &str, b: &str) -> f64 {
        label_similarity(a, b)
    }
}

/// `max(jaccard(tokens), 1 - levenshtein / max_len)`; two empty labels score 0.
pub fn label_similarity(a: &str, b: &str) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let ta: HashSet<&str> = a.split_whitespace().collect();
    let tb: HashSet<&str> = b.split_whitespace().collect();
    let union = ta.union(&tb).count();
    let jaccard = if union == 0 {
        0.0
    } else {
        ta.intersection(&tb).count() as f64 / union as f64
    };
    let max_len = a.chars().count().max(b.chars().count());
    let edit = 1.0 - strsim::levenshtein(a, b) as f64 / max_len as f64;
    jaccard.max(edit)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatchPair {
    pub candidate: String,
    pub gold: String,
    pub score: f64,
    pub kind: NodeKind,
    /// Normalized labels of both nodes, kept for trace rewriting.
    pub candidate_label: String,
    pub gold_label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("node `{0}` appears in more than one pair")]
    NotInjective(String),
    #[error("pair ({0}, {1}) scores below the threshold")]
    BelowThreshold(String, String),
    #[error("threshold {0} outside [0, 1]")]
    InvalidThreshold(String),
}

/// Injective partial correspondence from candidate node ids to gold node ids.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeMatching {
    pairs: Vec<MatchPair>,
    threshold: f64,
}

impl NodeMatching {
    /// Build a matching from explicit pairs, checking injectivity and the threshold.
    pub fn new(mut pairs: Vec<MatchPair>, threshold: f64) -> Result<Self, MatchingError> {
        if !(0.0..=1.0).contains(&threshold) {
            return Err(MatchingError::InvalidThreshold(threshold.to_string()));
        }
        let mut seen_c = HashSet::new();
        let mut seen_g = HashSet::new();
        for p in &pairs {
            if !seen_c.insert(p.candidate.as_str()) {
                return Err(MatchingError::NotInjective(p.candidate.clone()));
            }
            if !seen_g.insert(p.gold.as_str()) {
                return Err(MatchingError::NotInjective(p.gold.clone()));
            }
            if p.score < threshold {
                return Err(MatchingError::BelowThreshold(
                    p.candidate.clone(),
                    p.gold.clone(),
                ));
            }
        }
        pairs.sort_by(|a, b| (&a.candidate, &a.gold).cmp(&(&b.candidate, &b.gold)));
        Ok(Self { pairs, threshold })
    }

    pub fn empty(threshold: f64) -> Self {
        Self {
            pairs: Vec::new(),
            threshold,
        }
    }

    /// Pairs sorted by (candidate id, gold id).
    pub fn pairs(&self) -> &[MatchPair] {
        &self.pairs
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn total_score(&self) -> f64 {
        self.pairs.iter().map(|p| p.score).sum()
    }

    pub fn gold_for(&self, candidate_id: &str) -> Option<&str> {
        self.pairs
            .iter()
            .find(|p| p.candidate == candidate_id)
            .map(|p| p.gold.as_str())
    }

    /// Candidate-to-gold id map.
    pub fn id_map(&self) -> HashMap<&str, &str> {
        self.pairs
            .iter()
            .map(|p| (p.candidate.as_str(), p.gold.as_str()))
            .collect()
    }

    /// The same correspondence seen from the gold side.
    pub fn mirrored(&self) -> Self {
        let pairs = self
            .pairs
            .iter()
            .map(|p| MatchPair {
                candidate: p.gold.clone(),
                gold: p.candidate.clone(),
                score: p.score,
                kind: p.kind,
                candidate_label: p.gold_label.clone(),
                gold_label: p.candidate_label.clone(),
            })
            .collect();
        Self::new(pairs, self.threshold).expect("mirror of a valid matching is valid")
    }
}

/// Per-node comparison data shared by all pairs.
struct NodeView {
    kind: NodeKind,
    label: String,
    /// Labels of the nearest labeled neighbours, tagged with direction.
    context: BTreeSet<String>,
}

fn node_views(graph: &ProcessGraph) -> Vec<NodeView> {
    let labels: Vec<String> = graph
        .nodes()
        .iter()
        .map(|n| normalize_label(&n.label))
        .collect();
    let n = graph.node_count();
    let mut succ = vec![Vec::new(); n];
    let mut pred = vec![Vec::new(); n];
    for (s, t) in graph.edge_indices() {
        succ[s].push(t);
        pred[t].push(s);
    }
    let nearest = |start: usize, adj: &[Vec<usize>], tag: char| {
        let mut out = BTreeSet::new();
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut stack: Vec<usize> = adj[start].clone();
        while let Some(i) = stack.pop() {
            if std::mem::replace(&mut seen[i], true) {
                continue;
            }
            let node = &graph.nodes()[i];
            if !labels[i].is_empty() {
                out.insert(format!("{tag}{}", labels[i]));
            } else if node.kind.is_event() {
                out.insert(format!("{tag}#{}", node.kind));
            } else {
                stack.extend(adj[i].iter().copied());
            }
        }
        out
    };
    graph
        .nodes()
        .iter()
        .enumerate()
        .map(|(i, node)| {
            let context = if labels[i].is_empty() {
                let mut c = nearest(i, &pred, '<');
                c.extend(nearest(i, &succ, '>'));
                c
            } else {
                BTreeSet::new()
            };
            NodeView {
                kind: node.kind,
                label: labels[i].clone(),
                context,
            }
        })
        .collect()
}

fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let union = a.union(b).count();
    if union == 0 {
        0.0
    } else {
        a.intersection(b).count() as f64 / union as f64
    }
}

/// Similarity of two same-kind nodes.
///
/// Labeled pairs use the text measure. A pair where only one side is labeled
/// scores 0. Unlabeled pairs score 1 when they are the unique start (or end)
/// event on both sides, otherwise the Jaccard overlap of their labeled
/// neighbourhoods.
fn pair_score(
    c: &NodeView,
    g: &NodeView,
    unique_anchor: bool,
    sim: &dyn LabelSimilarity,
) -> f64 {
    debug_assert_eq!(c.kind, g.kind);
    match (c.label.is_empty(), g.label.is_empty()) {
        (false, false) => sim.similarity(&c.label, &g.label),
        (true, true) if unique_anchor && c.kind.is_event() => 1.0,
        (true, true) => jaccard(&c.context, &g.context),
        _ => 0.0,
    }
}

/// Raw similarity of every (candidate, gold) node pair, indexed in document
/// order. Pairs of different kinds score 0; no threshold is applied.
pub fn pair_scores(
    candidate: &ProcessGraph,
    gold: &ProcessGraph,
    sim: &dyn LabelSimilarity,
) -> Vec<Vec<f64>> {
    let cv = node_views(candidate);
    let gv = node_views(gold);
    let count = |views: &[NodeView], kind: NodeKind| views.iter().filter(|v| v.kind == kind).count();
    cv.iter()
        .map(|c| {
            let unique_anchor = count(&cv, c.kind) == 1 && count(&gv, c.kind) == 1;
            gv.iter()
                .map(|g| {
                    if c.kind == g.kind {
                        pair_score(c, g, unique_anchor, sim)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect()
}

/// Optimal matching under the default [`TokenEditSimilarity`].
pub fn compute_node_matching(
    candidate: &ProcessGraph,
    gold: &ProcessGraph,
    threshold: f64,
) -> NodeMatching {
    compute_node_matching_with(candidate, gold, threshold, &TokenEditSimilarity)
}

/// Optimal matching under a caller-supplied label similarity.
///
/// Pairs scoring 0 are never matched, even at threshold 0.
pub fn compute_node_matching_with(
    candidate: &ProcessGraph,
    gold: &ProcessGraph,
    threshold: f64,
    sim: &dyn LabelSimilarity,
) -> NodeMatching {
    let threshold = threshold.clamp(0.0, 1.0);
    let scores = pair_scores(candidate, gold, sim);
    let mut pairs = Vec::new();
    for kind in [
        NodeKind::StartEvent,
        NodeKind::EndEvent,
        NodeKind::Task,
        NodeKind::ExclusiveGateway,
        NodeKind::ParallelGateway,
    ] {
        let mut rows: Vec<usize> = (0..candidate.node_count()).filter(|&i| candidate.nodes()[i].kind == kind).collect();
        let mut cols: Vec<usize> = (0..gold.node_count()).filter(|&j| gold.nodes()[j].kind == kind).collect();
        if rows.is_empty() || cols.is_empty() {
            continue;
        }
        rows.sort_by(|&a, &b| candidate.nodes()[a].id.cmp(&candidate.nodes()[b].id));
        cols.sort_by(|&a, &b| gold.nodes()[a].id.cmp(&gold.nodes()[b].id));
        let weights: Vec<Vec<f64>> = rows
            .iter()
            .map(|&i| {
                cols.iter()
                    .map(|&j| {
                        let s = scores[i][j];
                        if s >= threshold && s > 0.0 {
                            s
                        } else {
                            0.0
                        }
                    })
                    .collect()
            })
            .collect();
        for (r, c) in lexicographic_optimum(&weights) {
            let (i, j) = (rows[r], cols[c]);
            pairs.push(MatchPair {
                candidate: candidate.nodes()[i].id.clone(),
                gold: gold.nodes()[j].id.clone(),
                score: weights[r][c],
                kind,
                candidate_label: normalize_label(&candidate.nodes()[i].label),
                gold_label: normalize_label(&gold.nodes()[j].label),
            });
        }
    }
    NodeMatching::new(pairs, threshold).expect("assignment yields an injective matching")
}

/// Among all maximum-weight assignments (zero entries mean "not matched"),
/// pick the lexicographically smallest list of (row, column) pairs. Rows and
/// columns are expected in id order.
fn lexicographic_optimum(weights: &[Vec<f64>]) -> Vec<(usize, usize)> {
    let cols = weights[0].len();
    let (optimum, _) = max_weight_assignment(weights);
    let tolerance = TIE_EPS * optimum.max(1.0);

    let residual = |from_row: usize, used: &[bool]| -> f64 {
        let free: Vec<usize> = (0..cols).filter(|&j| !used[j]).collect();
        let sub: Vec<Vec<f64>> = weights[from_row..]
            .iter()
            .map(|row| free.iter().map(|&j| row[j]).collect())
            .collect();
        if sub.is_empty() || free.is_empty() {
            0.0
        } else {
            max_weight_assignment(&sub).0
        }
    };

    let mut used = vec![false; cols];
    let mut fixed = 0.0;
    let mut chosen = Vec::new();
    for (r, row) in weights.iter().enumerate() {
        let mut picked = None;
        for c in 0..cols {
            if used[c] || row[c] <= 0.0 {
                continue;
            }
            used[c] = true;
            let total = fixed + row[c] + residual(r + 1, &used);
            if total >= optimum - tolerance {
                picked = Some(c);
                break;
            }
            used[c] = false;
        }
        if let Some(c) = picked {
            fixed += row[c];
            chosen.push((r, c));
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bpmn_model::{Node, SequenceFlow};

    fn tasks(labels: &[(&str, &str)]) -> ProcessGraph {
        ProcessGraph::new(
            "p",
            labels
                .iter()
                .map(|(id, l)| Node::new(*id, NodeKind::Task, *l))
                .collect(),
            vec![],
        )
        .unwrap()
    }

    #[test]
    fn label_similarity_examples() {
        assert_eq!(label_similarity("check invoice", "check invoice"), 1.0);
        // Token sets are equal: Jaccard 2/2.
        assert_eq!(label_similarity("check invoice", "invoice check"), 1.0);
        assert_eq!(label_similarity("", "anything"), 0.0);
        assert_eq!(label_similarity("", ""), 0.0);
        // "abcd" vs "abce": Jaccard 0, edit 1 - 1/4.
        assert!((label_similarity("abcd", "abce") - 0.75).abs() < 1e-12);
    }

    #[test]
    fn identical_graphs_match_identically() {
        let g = ProcessGraph::new(
            "p",
            vec![
                Node::new("s", NodeKind::StartEvent, ""),
                Node::new("x", NodeKind::ExclusiveGateway, ""),
                Node::new("a", NodeKind::Task, "Approve"),
                Node::new("b", NodeKind::Task, "Reject"),
                Node::new("y", NodeKind::ExclusiveGateway, ""),
                Node::new("e", NodeKind::EndEvent, ""),
            ],
            vec![
                SequenceFlow::new("f1", "s", "x"),
                SequenceFlow::new("f2", "x", "a"),
                SequenceFlow::new("f3", "x", "b"),
                SequenceFlow::new("f4", "a", "y"),
                SequenceFlow::new("f5", "b", "y"),
                SequenceFlow::new("f6", "y", "e"),
            ],
        )
        .unwrap();
        let m = compute_node_matching(&g, &g, 0.5);
        assert_eq!(m.len(), 6);
        for p in m.pairs() {
            assert_eq!(p.candidate, p.gold);
            assert_eq!(p.score, 1.0);
        }
    }

    #[test]
    fn nothing_above_threshold() {
        let c = tasks(&[("1", "ship goods")]);
        let g = tasks(&[("2", "archive file")]);
        assert!(compute_node_matching(&c, &g, 0.5).is_empty());
    }

    #[test]
    fn optimal_beats_greedy() {
        // Greedy on the best single pair (c1, g1) forces c2 onto a poor g2.
        let c = tasks(&[("c1", "review claim"), ("c2", "review claim form")]);
        let g = tasks(&[("g1", "review claim form"), ("g2", "review claim details")]);
        let s = |a: &str, b: &str| label_similarity(a, b);
        let greedy = s("review claim form", "review claim form") + s("review claim", "review claim details");
        let swapped = s("review claim", "review claim form") + s("review claim form", "review claim details");
        let m = compute_node_matching(&c, &g, 0.0);
        assert!((m.total_score() - greedy.max(swapped)).abs() < 1e-12);
        assert_eq!(m.len(), 2);
    }

    #[test]
    fn ties_break_lexicographically() {
        let c = tasks(&[("b", "pay"), ("a", "pay")]);
        let g = tasks(&[("y", "pay"), ("x", "pay")]);
        let m = compute_node_matching(&c, &g, 0.5);
        let pairs: Vec<_> = m
            .pairs()
            .iter()
            .map(|p| (p.candidate.as_str(), p.gold.as_str()))
            .collect();
        assert_eq!(pairs, [("a", "x"), ("b", "y")]);
    }

    #[test]
    fn kinds_never_mix() {
        let c = tasks(&[("t", "decide")]);
        let g = ProcessGraph::new(
            "p",
            vec![Node::new("x", NodeKind::ExclusiveGateway, "decide")],
            vec![],
        )
        .unwrap();
        assert!(compute_node_matching(&c, &g, 0.0).is_empty());
    }

    #[test]
    fn unique_unlabeled_events_anchor() {
        let mk = |s: &str, e: &str| {
            ProcessGraph::new(
                "p",
                vec![
                    Node::new(s, NodeKind::StartEvent, ""),
                    Node::new(e, NodeKind::EndEvent, ""),
                ],
                vec![],
            )
            .unwrap()
        };
        let m = compute_node_matching(&mk("s1", "e1"), &mk("s2", "e2"), 0.5);
        assert_eq!(m.len(), 2);
        assert_eq!(m.gold_for("s1"), Some("s2"));
    }

    #[test]
    fn explicit_matching_validation() {
        let pair = |c: &str, g: &str, s: f64| MatchPair {
            candidate: c.into(),
            gold: g.into(),
            score: s,
            kind: NodeKind::Task,
            candidate_label: String::new(),
            gold_label: String::new(),
        };
        assert!(matches!(
            NodeMatching::new(vec![pair("a", "x", 1.0), pair("a", "y", 1.0)], 0.5),
            Err(MatchingError::NotInjective(_))
        ));
        assert!(matches!(
            NodeMatching::new(vec![pair("a", "x", 0.2)], 0.5),
            Err(MatchingError::BelowThreshold(..))
        ));
    }
}
