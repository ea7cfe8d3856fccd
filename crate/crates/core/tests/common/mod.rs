//! Generators and independent brute-force oracles shared by the integration
//! and acceptance tests. Nothing here calls the algorithms under test.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use procbench::bpmn_model::{normalize_label, Node, NodeKind, ProcessGraph, SequenceFlow};
use procbench::pareto::{Direction, Orientation, Point2};
use procbench::quality_metrics::EditCostModel;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const KINDS: [NodeKind; 5] = [
    NodeKind::StartEvent,
    NodeKind::EndEvent,
    NodeKind::Task,
    NodeKind::ExclusiveGateway,
    NodeKind::ParallelGateway,
];

/// Small vocabulary so that equal, similar and unrelated labels all occur.
pub const VOCAB: [&str; 8] = [
    "check invoice",
    "check order",
    "approve payment",
    "reject invoice",
    "ship goods",
    "archive",
    "notify customer",
    "pack goods",
];

fn random_label(rng: &mut ChaCha8Rng, kind: NodeKind) -> String {
    match kind {
        NodeKind::Task => VOCAB.choose(rng).unwrap().to_string(),
        NodeKind::StartEvent | NodeKind::EndEvent if rng.gen_bool(0.3) => {
            VOCAB.choose(rng).unwrap().to_string()
        }
        _ => String::new(),
    }
}

/// Arbitrary graph: any kinds, any edges, including self-loops and
/// parallel flows.
pub fn random_graph(rng: &mut ChaCha8Rng, min_nodes: usize, max_nodes: usize) -> ProcessGraph {
    let n = rng.gen_range(min_nodes..=max_nodes);
    let nodes: Vec<Node> = (0..n)
        .map(|i| {
            let kind = *KINDS.choose(rng).unwrap();
            Node::new(format!("n{i}"), kind, random_label(rng, kind))
        })
        .collect();
    let m = if n == 0 { 0 } else { rng.gen_range(0..=n + 2) };
    let flows = (0..m)
        .map(|k| {
            let s = rng.gen_range(0..n);
            let t = rng.gen_range(0..n);
            SequenceFlow::new(format!("f{k}"), format!("n{s}"), format!("n{t}"))
        })
        .collect();
    ProcessGraph::new("random", nodes, flows).unwrap()
}

/// Copy of `g` with shuffled ids and a few random edits (relabel, drop or
/// add a node, rewire an edge).
pub fn perturb(rng: &mut ChaCha8Rng, g: &ProcessGraph, max_nodes: usize) -> ProcessGraph {
    let mut nodes: Vec<(NodeKind, String)> = g.nodes().iter().map(|n| (n.kind, n.label.clone())).collect();
    let mut edges: Vec<(usize, usize)> = g.edge_indices();
    for _ in 0..rng.gen_range(0..=3) {
        match rng.gen_range(0..5) {
            0 if !nodes.is_empty() => {
                let i = rng.gen_range(0..nodes.len());
                nodes[i].1 = random_label(rng, nodes[i].0);
            }
            1 if !nodes.is_empty() => {
                let i = rng.gen_range(0..nodes.len());
                nodes.remove(i);
                edges.retain(|&(s, t)| s != i && t != i);
                for e in &mut edges {
                    if e.0 > i {
                        e.0 -= 1;
                    }
                    if e.1 > i {
                        e.1 -= 1;
                    }
                }
            }
            2 if nodes.len() < max_nodes => {
                let kind = *KINDS.choose(rng).unwrap();
                nodes.push((kind, random_label(rng, kind)));
            }
            3 if !edges.is_empty() => {
                let k = rng.gen_range(0..edges.len());
                edges.remove(k);
            }
            _ if !nodes.is_empty() => {
                let n = nodes.len();
                edges.push((rng.gen_range(0..n), rng.gen_range(0..n)));
            }
            _ => {}
        }
    }
    let mut ids: Vec<usize> = (0..nodes.len()).collect();
    ids.shuffle(rng);
    let node_list = nodes
        .iter()
        .enumerate()
        .map(|(i, (k, l))| Node::new(format!("m{}", ids[i]), *k, l.clone()))
        .collect();
    let flows = edges
        .iter()
        .enumerate()
        .map(|(k, &(s, t))| SequenceFlow::new(format!("e{k}"), format!("m{}", ids[s]), format!("m{}", ids[t])))
        .collect();
    ProcessGraph::new("perturbed", node_list, flows).unwrap()
}

/// Either an independent random graph or a perturbation of `base`.
pub fn random_partner(rng: &mut ChaCha8Rng, base: &ProcessGraph, max_nodes: usize) -> ProcessGraph {
    if rng.gen_bool(0.5) {
        random_graph(rng, 0, max_nodes)
    } else {
        perturb(rng, base, max_nodes)
    }
}

/// Minimum edit cost over every partial injective node mapping. Each
/// mapping is scored by the cheapest script it induces: substitute mapped
/// nodes whose kind or label differ, delete/insert the unmapped ones, and
/// delete/insert the flows that the mapping does not carry over.
pub fn brute_force_ged(c: &ProcessGraph, g: &ProcessGraph, costs: &EditCostModel) -> f64 {
    let key = |n: &Node| (n.kind, normalize_label(&n.label));
    let ck: Vec<_> = c.nodes().iter().map(key).collect();
    let gk: Vec<_> = g.nodes().iter().map(key).collect();
    let cedges = c.edge_indices();
    let gedges = g.edge_indices();
    let mut best = f64::INFINITY;
    let mut mapping: Vec<Option<usize>> = Vec::new();
    let mut used = vec![false; g.node_count()];

    fn rec(
        i: usize,
        mapping: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
        eval: &dyn Fn(&[Option<usize>]) -> f64,
        n: usize,
        best: &mut f64,
    ) {
        if i == n {
            *best = best.min(eval(mapping));
            return;
        }
        mapping.push(None);
        rec(i + 1, mapping, used, eval, n, best);
        mapping.pop();
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                mapping.push(Some(j));
                rec(i + 1, mapping, used, eval, n, best);
                mapping.pop();
                used[j] = false;
            }
        }
    }

    let eval = |m: &[Option<usize>]| -> f64 {
        let mut cost = 0.0;
        let mut hit = vec![false; gk.len()];
        for (i, image) in m.iter().enumerate() {
            match image {
                Some(j) => {
                    hit[*j] = true;
                    if ck[i] != gk[*j] {
                        cost += costs.node_substitute;
                    }
                }
                None => cost += costs.node_delete,
            }
        }
        cost += hit.iter().filter(|h| !**h).count() as f64 * costs.node_insert;
        let mut remaining: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &e in &gedges {
            *remaining.entry(e).or_default() += 1;
        }
        let mut carried = 0;
        for &(s, t) in &cedges {
            if let (Some(a), Some(b)) = (m[s], m[t]) {
                if let Some(k) = remaining.get_mut(&(a, b)) {
                    if *k > 0 {
                        *k -= 1;
                        carried += 1;
                    }
                }
            }
        }
        cost += (cedges.len() - carried) as f64 * costs.edge_delete;
        cost += (gedges.len() - carried) as f64 * costs.edge_insert;
        cost
    };
    rec(0, &mut mapping, &mut used, &eval, c.node_count(), &mut best);
    best
}

/// Every injective kind-compatible matching over a score matrix with its
/// total, keeping only pairs with score >= threshold and score > 0.
pub fn all_matchings(scores: &[Vec<f64>], threshold: f64) -> Vec<(f64, Vec<(usize, usize)>)> {
    let cols = scores.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    fn rec(
        r: usize,
        scores: &[Vec<f64>],
        threshold: f64,
        used: &mut Vec<bool>,
        cur: &mut Vec<(usize, usize)>,
        total: f64,
        out: &mut Vec<(f64, Vec<(usize, usize)>)>,
    ) {
        if r == scores.len() {
            out.push((total, cur.clone()));
            return;
        }
        rec(r + 1, scores, threshold, used, cur, total, out);
        for c in 0..used.len() {
            let s = scores[r][c];
            if !used[c] && s > 0.0 && s >= threshold {
                used[c] = true;
                cur.push((r, c));
                rec(r + 1, scores, threshold, used, cur, total + s, out);
                cur.pop();
                used[c] = false;
            }
        }
    }
    rec(0, scores, threshold, &mut vec![false; cols], &mut Vec::new(), 0.0, &mut out);
    out
}

/// Breadth-first exploration of every reachable marking without bounds.
/// Returns the completed traces (task labels, normalized) and the number of
/// distinct dead states that are not proper completions.
pub fn bfs_traces(g: &ProcessGraph) -> (BTreeSet<Vec<String>>, usize) {
    let n = g.node_count();
    let edges = g.edge_indices();
    let inc: Vec<Vec<usize>> = (0..n)
        .map(|v| (0..edges.len()).filter(|&f| edges[f].1 == v).collect())
        .collect();
    let out: Vec<Vec<usize>> = (0..n)
        .map(|v| (0..edges.len()).filter(|&f| edges[f].0 == v).collect())
        .collect();
    let kinds: Vec<NodeKind> = g.nodes().iter().map(|x| x.kind).collect();
    let labels: Vec<String> = g.nodes().iter().map(|x| normalize_label(&x.label)).collect();

    // (tokens per flow, task trace, end reached)
    type State = (Vec<u32>, Vec<usize>, bool);
    let mut init = vec![0u32; edges.len()];
    for v in 0..n {
        if kinds[v] == NodeKind::StartEvent {
            for &f in &out[v] {
                init[f] += 1;
            }
        }
    }
    let mut seen: HashSet<State> = HashSet::new();
    let mut queue: VecDeque<State> = VecDeque::new();
    let start: State = (init, Vec::new(), false);
    seen.insert(start.clone());
    queue.push_back(start);
    let mut traces = BTreeSet::new();
    let mut dead = 0;
    while let Some((marking, trace, ended)) = queue.pop_front() {
        let mut next_states: Vec<State> = Vec::new();
        for v in 0..n {
            let produce = |m: &mut Vec<u32>| {
                for &f in &out[v] {
                    m[f] += 1;
                }
            };
            if kinds[v] == NodeKind::ParallelGateway {
                if !inc[v].is_empty() && inc[v].iter().all(|&f| marking[f] > 0) {
                    let mut m = marking.clone();
                    for &f in &inc[v] {
                        m[f] -= 1;
                    }
                    produce(&mut m);
                    next_states.push((m, trace.clone(), ended));
                }
                continue;
            }
            for &f in &inc[v] {
                if marking[f] == 0 {
                    continue;
                }
                let mut m = marking.clone();
                m[f] -= 1;
                match kinds[v] {
                    NodeKind::ExclusiveGateway if !out[v].is_empty() => {
                        for &o in &out[v] {
                            let mut b = m.clone();
                            b[o] += 1;
                            next_states.push((b, trace.clone(), ended));
                        }
                    }
                    NodeKind::ExclusiveGateway => next_states.push((m, trace.clone(), ended)),
                    NodeKind::Task => {
                        produce(&mut m);
                        let mut t = trace.clone();
                        t.push(v);
                        next_states.push((m, t, ended));
                    }
                    NodeKind::EndEvent => {
                        produce(&mut m);
                        next_states.push((m, trace.clone(), true));
                    }
                    _ => {
                        produce(&mut m);
                        next_states.push((m, trace.clone(), ended));
                    }
                }
            }
        }
        if next_states.is_empty() {
            if ended && marking.iter().all(|&t| t == 0) {
                traces.insert(trace.iter().map(|&v| labels[v].clone()).collect());
            } else {
                dead += 1;
            }
            continue;
        }
        for s in next_states {
            if seen.insert(s.clone()) {
                queue.push_back(s);
            }
        }
    }
    (traces, dead)
}

/// Block of a structured process: a task, a sequence, or a split/join
/// pair whose kinds may disagree (a mismatched join).
#[derive(Debug, Clone)]
pub enum Block {
    Task,
    Seq(Box<Block>, Box<Block>),
    Gate {
        split: NodeKind,
        join: NodeKind,
        left: Option<Box<Block>>,
        right: Option<Box<Block>>,
    },
}

impl Block {
    pub fn size(&self) -> usize {
        match self {
            Block::Task => 1,
            Block::Seq(a, b) => a.size() + b.size(),
            Block::Gate { left, right, .. } => {
                2 + left.as_ref().map_or(0, |b| b.size()) + right.as_ref().map_or(0, |b| b.size())
            }
        }
    }
}

const GATES: [NodeKind; 2] = [NodeKind::ExclusiveGateway, NodeKind::ParallelGateway];

/// Every block with at most `budget` nodes and gateway nesting depth at most
/// `depth`.
pub fn blocks(depth: usize, budget: usize) -> Vec<Block> {
    let mut out = Vec::new();
    if budget == 0 {
        return out;
    }
    out.push(Block::Task);
    // Sequences: left operand is never itself a sequence, to avoid
    // enumerating the same shape twice by associativity.
    for left in blocks(depth, budget - 1).into_iter().filter(|b| !matches!(b, Block::Seq(..))) {
        for right in blocks(depth, budget - left.size()) {
            out.push(Block::Seq(Box::new(left.clone()), Box::new(right)));
        }
    }
    if depth > 0 && budget >= 3 {
        let inner = budget - 2;
        let mut branches: Vec<Option<Block>> = vec![None];
        branches.extend(blocks(depth - 1, inner).into_iter().map(Some));
        for (i, l) in branches.iter().enumerate() {
            for r in &branches[i..] {
                let used = l.as_ref().map_or(0, Block::size) + r.as_ref().map_or(0, Block::size);
                if used == 0 || used > inner {
                    continue;
                }
                for split in GATES {
                    for join in GATES {
                        out.push(Block::Gate {
                            split,
                            join,
                            left: l.clone().map(Box::new),
                            right: r.clone().map(Box::new),
                        });
                    }
                }
            }
        }
    }
    out
}

struct Builder {
    nodes: Vec<Node>,
    flows: Vec<SequenceFlow>,
    tasks: usize,
}

impl Builder {
    fn node(&mut self, kind: NodeKind, label: &str) -> String {
        let id = format!("v{}", self.nodes.len());
        self.nodes.push(Node::new(id.clone(), kind, label));
        id
    }

    fn flow(&mut self, s: &str, t: &str) {
        let id = format!("f{}", self.flows.len());
        self.flows.push(SequenceFlow::new(id, s, t));
    }

    /// Returns (entry, exit) node ids.
    fn block(&mut self, b: &Block) -> (String, String) {
        match b {
            Block::Task => {
                let label = ((b'a' + self.tasks as u8) as char).to_string();
                self.tasks += 1;
                let id = self.node(NodeKind::Task, &label);
                (id.clone(), id)
            }
            Block::Seq(x, y) => {
                let (xs, xe) = self.block(x);
                let (ys, ye) = self.block(y);
                self.flow(&xe, &ys);
                (xs, ye)
            }
            Block::Gate {
                split,
                join,
                left,
                right,
            } => {
                let s = self.node(*split, "");
                let j = self.node(*join, "");
                for branch in [left, right] {
                    match branch {
                        Some(inner) => {
                            let (bs, be) = self.block(inner);
                            self.flow(&s, &bs);
                            self.flow(&be, &j);
                        }
                        None => self.flow(&s, &j),
                    }
                }
                (s, j)
            }
        }
    }
}

/// Wrap a block between a start and an end event.
pub fn structured_graph(b: &Block) -> ProcessGraph {
    let mut builder = Builder {
        nodes: Vec::new(),
        flows: Vec::new(),
        tasks: 0,
    };
    let s = builder.node(NodeKind::StartEvent, "");
    let (bs, be) = builder.block(b);
    let e = builder.node(NodeKind::EndEvent, "");
    builder.flow(&s, &bs);
    builder.flow(&be, &e);
    ProcessGraph::new("structured", builder.nodes, builder.flows).unwrap()
}

/// All structured graphs with at most `max_nodes` nodes and depth <= 2.
pub fn structured_family(max_nodes: usize) -> Vec<ProcessGraph> {
    blocks(2, max_nodes - 2).iter().map(structured_graph).collect()
}

/// Indices not dominated by any other point, by direct pairwise comparison.
pub fn naive_front(points: &[Point2], o: Orientation) -> BTreeSet<usize> {
    let better = |d: Direction, a: f64, b: f64| match d {
        Direction::Maximize => a > b,
        Direction::Minimize => a < b,
    };
    let no_worse = |d: Direction, a: f64, b: f64| a == b || better(d, a, b);
    (0..points.len())
        .filter(|&i| {
            let p = points[i];
            !points.iter().any(|q| {
                no_worse(o.x, q.x, p.x)
                    && no_worse(o.y, q.y, p.y)
                    && (better(o.x, q.x, p.x) || better(o.y, q.y, p.y))
            })
        })
        .collect()
}

/// Random process-like graph: one start event, one end event, and random
/// tasks and gateways wired by random flows. May be cyclic.
pub fn random_process(rng: &mut ChaCha8Rng, max_nodes: usize) -> ProcessGraph {
    let n = rng.gen_range(3..=max_nodes.max(3));
    let inner = [
        NodeKind::Task,
        NodeKind::Task,
        NodeKind::ExclusiveGateway,
        NodeKind::ParallelGateway,
    ];
    let mut nodes = vec![
        Node::new("n0", NodeKind::StartEvent, ""),
        Node::new("n1", NodeKind::EndEvent, ""),
    ];
    for i in 2..n {
        let kind = *inner.choose(rng).unwrap();
        let label = if kind == NodeKind::Task {
            ((b'a' + i as u8) as char).to_string()
        } else {
            String::new()
        };
        nodes.push(Node::new(format!("n{i}"), kind, label));
    }
    // A chain start -> inner... -> end, plus random extra flows.
    let mut order: Vec<usize> = (2..n).collect();
    order.shuffle(rng);
    let mut path = vec![0];
    path.extend(order);
    path.push(1);
    let mut edges: Vec<(usize, usize)> = path.windows(2).map(|w| (w[0], w[1])).collect();
    for _ in 0..rng.gen_range(0..=n / 2 + 1) {
        let s = rng.gen_range(2..n);
        let t = rng.gen_range(1..n);
        edges.push((s, t));
    }
    let flows = edges
        .iter()
        .enumerate()
        .map(|(k, &(s, t))| SequenceFlow::new(format!("f{k}"), format!("n{s}"), format!("n{t}")))
        .collect();
    ProcessGraph::new("process", nodes, flows).unwrap()
}
